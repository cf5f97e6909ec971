#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace grm3d {

/// Integer pixel coordinate. x is the column, y the row, origin top-left.
struct Pixel {
  int x = 0;
  int y = 0;

  friend bool operator==(const Pixel&, const Pixel&) = default;
};

/// Half-open channel interval [begin, end).
struct ChannelRange {
  int begin = 0;
  int end = 0;
};

/// Dense (channels, height, width) float map stored channel-major, row-major.
class TensorMap {
 public:
  TensorMap() = default;
  TensorMap(int channels, int height, int width, float fill = 0.0f);
  TensorMap(int channels, int height, int width, std::vector<float> values);

  static TensorMap generate(int channels, int height, int width,
                            const std::function<float(int c, int y, int x)>& fn);

  int channels() const noexcept { return channels_; }
  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t plane_size() const noexcept {
    return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
  }
  std::size_t size() const noexcept { return values_.size(); }

  std::span<const float> values() const noexcept { return values_; }
  std::span<float> values() noexcept { return values_; }
  std::span<const float> plane(int c) const;
  std::span<float> plane(int c);

  float at(int c, int y, int x) const { return values_[index(c, y, x)]; }
  float& at(int c, int y, int x) { return values_[index(c, y, x)]; }

  bool contains(Pixel p) const noexcept {
    return p.x >= 0 && p.y >= 0 && p.x < width_ && p.y < height_;
  }
  bool same_plane_shape(const TensorMap& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_;
  }
  bool all_finite() const noexcept;

  friend bool operator==(const TensorMap&, const TensorMap&) = default;

 private:
  std::size_t index(int c, int y, int x) const noexcept {
    return (static_cast<std::size_t>(c) * height_ + static_cast<std::size_t>(y)) * width_ +
           static_cast<std::size_t>(x);
  }

  int channels_ = 0;
  int height_ = 0;
  int width_ = 0;
  std::vector<float> values_;
};

/// Row-major out×in matrix used as 1×1 convolution weights.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<float> values;

  Matrix() = default;
  Matrix(int r, int c, float fill = 0.0f)
      : rows(r), cols(c), values(static_cast<std::size_t>(r) * c, fill) {}

  float operator()(int r, int c) const { return values[static_cast<std::size_t>(r) * cols + c]; }
  float& operator()(int r, int c) { return values[static_cast<std::size_t>(r) * cols + c]; }

  static Matrix identity(int n);
  friend bool operator==(const Matrix&, const Matrix&) = default;
};

/// The per-image map bundle. Heat has K+1 channels (the last one is the body
/// center), scale 2, depth K, offset3d 3K. The feature map is only needed by
/// the refinement stage.
struct DataMapSet {
  int joint_count = 0;
  TensorMap heat;
  TensorMap scale;
  TensorMap depth;
  TensorMap offset3d;
  std::optional<TensorMap> feature;

  int height() const noexcept { return heat.height(); }
  int width() const noexcept { return heat.width(); }
  int center_channel() const noexcept { return joint_count; }

  /// Throws ShapeError when channel counts or plane sizes disagree.
  void validate() const;

  friend bool operator==(const DataMapSet&, const DataMapSet&) = default;
};

enum class CombineOp { mul, add };
enum class Broadcast { none, b_single_channel };

std::vector<double> sample_at(const TensorMap& map, Pixel point, ChannelRange channels);
std::vector<double> sample_at(const TensorMap& map, Pixel point);

TensorMap concat(const TensorMap& a, const TensorMap& b);
std::pair<TensorMap, TensorMap> split(const TensorMap& map, int first_channels);

TensorMap conv1x1(const TensorMap& input, const Matrix& weights, std::span<const float> bias);

TensorMap ewise_combine(const TensorMap& a, const TensorMap& b, CombineOp op,
                        Broadcast broadcast = Broadcast::none);

/// delta(x) = 1/sigmoid(x) - 1, which simplifies to exp(-x).
double delta_transform(double x);
/// Inverse of delta_transform; throws DomainError for d <= 0.
double delta_inverse(double d);

TensorMap apply_delta(const TensorMap& map);
TensorMap apply_delta_inverse(const TensorMap& map);

}  // namespace grm3d
