#include "grm3d/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "grm3d/errors.hpp"

namespace grm3d {
namespace {

std::string shape_str(const TensorMap& m) {
  return "(" + std::to_string(m.channels()) + "," + std::to_string(m.height()) + "," +
         std::to_string(m.width()) + ")";
}

void require_finite(const TensorMap& m, const char* op) {
  if (!m.all_finite()) {
    throw DomainError(std::string(op) + ": result contains non-finite values");
  }
}

}  // namespace

TensorMap::TensorMap(int channels, int height, int width, float fill)
    : channels_(channels), height_(height), width_(width) {
  if (channels < 0 || height < 0 || width < 0) {
    throw ShapeError("negative tensor dimension");
  }
  values_.assign(static_cast<std::size_t>(channels) * height * width, fill);
}

TensorMap::TensorMap(int channels, int height, int width, std::vector<float> values)
    : channels_(channels), height_(height), width_(width), values_(std::move(values)) {
  if (channels < 0 || height < 0 || width < 0) {
    throw ShapeError("negative tensor dimension");
  }
  if (values_.size() != static_cast<std::size_t>(channels) * height * width) {
    throw ShapeError("value count " + std::to_string(values_.size()) + " does not match shape " +
                     shape_str(*this));
  }
}

TensorMap TensorMap::generate(int channels, int height, int width,
                              const std::function<float(int, int, int)>& fn) {
  TensorMap m(channels, height, width);
  for (int c = 0; c < channels; ++c)
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) m.at(c, y, x) = fn(c, y, x);
  return m;
}

std::span<const float> TensorMap::plane(int c) const {
  if (c < 0 || c >= channels_) throw BoundsError("channel " + std::to_string(c) + " out of range");
  return std::span<const float>(values_).subspan(static_cast<std::size_t>(c) * plane_size(),
                                                 plane_size());
}

std::span<float> TensorMap::plane(int c) {
  if (c < 0 || c >= channels_) throw BoundsError("channel " + std::to_string(c) + " out of range");
  return std::span<float>(values_).subspan(static_cast<std::size_t>(c) * plane_size(),
                                           plane_size());
}

bool TensorMap::all_finite() const noexcept {
  for (float v : values_)
    if (!std::isfinite(v)) return false;
  return true;
}

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0f;
  return m;
}

void DataMapSet::validate() const {
  const int k = joint_count;
  if (k <= 0) throw ShapeError("joint count must be positive");
  if (heat.channels() != k + 1) throw ShapeError("heat map must have K+1 channels, got " + shape_str(heat));
  if (scale.channels() != 2) throw ShapeError("scale map must have 2 channels, got " + shape_str(scale));
  if (depth.channels() != k) throw ShapeError("depth map must have K channels, got " + shape_str(depth));
  if (offset3d.channels() != 3 * k)
    throw ShapeError("offset map must have 3K channels, got " + shape_str(offset3d));
  if (!heat.same_plane_shape(scale) || !heat.same_plane_shape(depth) ||
      !heat.same_plane_shape(offset3d)) {
    throw ShapeError("data maps disagree on height/width");
  }
  if (feature && !heat.same_plane_shape(*feature)) {
    throw ShapeError("feature map disagrees on height/width");
  }
}

std::vector<double> sample_at(const TensorMap& map, Pixel point, ChannelRange channels) {
  if (!map.contains(point)) {
    throw BoundsError("sample point (" + std::to_string(point.x) + "," + std::to_string(point.y) +
                      ") outside " + shape_str(map));
  }
  if (channels.begin < 0 || channels.end > map.channels() || channels.begin > channels.end) {
    throw BoundsError("channel range [" + std::to_string(channels.begin) + "," +
                      std::to_string(channels.end) + ") outside " + shape_str(map));
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(channels.end - channels.begin));
  for (int c = channels.begin; c < channels.end; ++c) out.push_back(map.at(c, point.y, point.x));
  return out;
}

std::vector<double> sample_at(const TensorMap& map, Pixel point) {
  return sample_at(map, point, {0, map.channels()});
}

TensorMap concat(const TensorMap& a, const TensorMap& b) {
  if (!a.same_plane_shape(b)) {
    throw ShapeError("concat: " + shape_str(a) + " vs " + shape_str(b));
  }
  std::vector<float> values;
  values.reserve(a.size() + b.size());
  values.insert(values.end(), a.values().begin(), a.values().end());
  values.insert(values.end(), b.values().begin(), b.values().end());
  return TensorMap(a.channels() + b.channels(), a.height(), a.width(), std::move(values));
}

std::pair<TensorMap, TensorMap> split(const TensorMap& map, int first_channels) {
  if (first_channels < 0 || first_channels > map.channels()) {
    throw ShapeError("split: cannot take " + std::to_string(first_channels) + " channels from " +
                     shape_str(map));
  }
  const auto vals = map.values();
  const std::size_t cut = static_cast<std::size_t>(first_channels) * map.plane_size();
  TensorMap head(first_channels, map.height(), map.width(),
                 std::vector<float>(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(cut)));
  TensorMap tail(map.channels() - first_channels, map.height(), map.width(),
                 std::vector<float>(vals.begin() + static_cast<std::ptrdiff_t>(cut), vals.end()));
  return {std::move(head), std::move(tail)};
}

TensorMap conv1x1(const TensorMap& input, const Matrix& weights, std::span<const float> bias) {
  if (weights.cols != input.channels()) {
    throw ShapeError("conv1x1: weights have " + std::to_string(weights.cols) +
                     " input columns, map has " + std::to_string(input.channels()) + " channels");
  }
  if (bias.size() != static_cast<std::size_t>(weights.rows)) {
    throw ShapeError("conv1x1: bias length " + std::to_string(bias.size()) + " != " +
                     std::to_string(weights.rows) + " outputs");
  }
  TensorMap out(weights.rows, input.height(), input.width());
  const std::size_t plane = input.plane_size();
  const auto in = input.values();
  auto dst = out.values();
  std::vector<double> acc(plane);
  for (int o = 0; o < weights.rows; ++o) {
    std::fill(acc.begin(), acc.end(), static_cast<double>(bias[static_cast<std::size_t>(o)]));
    for (int i = 0; i < weights.cols; ++i) {
      const double w = weights(o, i);
      if (w == 0.0) continue;
      const float* src = in.data() + static_cast<std::size_t>(i) * plane;
      for (std::size_t p = 0; p < plane; ++p) acc[p] += w * src[p];
    }
    float* d = dst.data() + static_cast<std::size_t>(o) * plane;
    for (std::size_t p = 0; p < plane; ++p) d[p] = static_cast<float>(acc[p]);
  }
  require_finite(out, "conv1x1");
  return out;
}

TensorMap ewise_combine(const TensorMap& a, const TensorMap& b, CombineOp op, Broadcast broadcast) {
  if (!a.same_plane_shape(b)) {
    throw ShapeError("ewise_combine: " + shape_str(a) + " vs " + shape_str(b));
  }
  if (broadcast == Broadcast::none && a.channels() != b.channels()) {
    throw ShapeError("ewise_combine: channel mismatch " + shape_str(a) + " vs " + shape_str(b));
  }
  if (broadcast == Broadcast::b_single_channel && b.channels() != 1) {
    throw ShapeError("ewise_combine: broadcast operand must have one channel, got " + shape_str(b));
  }
  TensorMap out(a.channels(), a.height(), a.width());
  const std::size_t plane = a.plane_size();
  const auto av = a.values();
  const auto bv = b.values();
  auto ov = out.values();
  for (int c = 0; c < a.channels(); ++c) {
    const std::size_t base = static_cast<std::size_t>(c) * plane;
    const std::size_t bbase = broadcast == Broadcast::none ? base : 0;
    for (std::size_t p = 0; p < plane; ++p) {
      const float x = av[base + p];
      const float y = bv[bbase + p];
      ov[base + p] = op == CombineOp::mul ? x * y : x + y;
    }
  }
  require_finite(out, "ewise_combine");
  return out;
}

double delta_transform(double x) {
  // 1/sigmoid(x) - 1 = (1 + e^-x) - 1
  return std::exp(-x);
}

double delta_inverse(double d) {
  if (!(d > 0.0)) throw DomainError("delta_inverse: argument must be positive");
  return -std::log(d);
}

TensorMap apply_delta(const TensorMap& map) {
  TensorMap out(map.channels(), map.height(), map.width());
  auto dst = out.values();
  const auto src = map.values();
  for (std::size_t i = 0; i < src.size(); ++i)
    dst[i] = static_cast<float>(delta_transform(src[i]));
  require_finite(out, "apply_delta");
  return out;
}

TensorMap apply_delta_inverse(const TensorMap& map) {
  TensorMap out(map.channels(), map.height(), map.width());
  auto dst = out.values();
  const auto src = map.values();
  for (std::size_t i = 0; i < src.size(); ++i)
    dst[i] = static_cast<float>(delta_inverse(src[i]));
  return out;
}

}  // namespace grm3d
