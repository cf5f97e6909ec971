#include "grm3d/sdar.hpp"

#include <array>
#include <cmath>
#include <string>

#include "grm3d/errors.hpp"

namespace grm3d {
namespace {

void check_block(const LinearMap& m, int out, int in, const char* name) {
  if (m.weights.rows != out || m.weights.cols != in ||
      m.weights.values.size() != static_cast<std::size_t>(out) * in ||
      m.bias.size() != static_cast<std::size_t>(out)) {
    throw ShapeError(std::string(name) + ": expected " + std::to_string(out) + "x" + std::to_string(in) +
                     ", got " + std::to_string(m.weights.rows) + "x" + std::to_string(m.weights.cols));
  }
  for (float v : m.weights.values)
    if (!std::isfinite(v)) throw DomainError(std::string(name) + ": non-finite weight");
  for (float v : m.bias)
    if (!std::isfinite(v)) throw DomainError(std::string(name) + ": non-finite bias");
}

constexpr std::array<const char*, 5> kBlocks = {"conv_s", "conv_d", "proj_s", "proj_d", "conv_f"};

const LinearMap& block(const SdarWeights& w, std::size_t i) {
  switch (i) {
    case 0: return w.conv_s;
    case 1: return w.conv_d;
    case 2: return w.proj_s;
    case 3: return w.proj_d;
    default: return w.conv_f;
  }
}

LinearMap& block(SdarWeights& w, std::size_t i) {
  return const_cast<LinearMap&>(block(static_cast<const SdarWeights&>(w), i));
}

// M^I + M^R, leaving elements with a zero residual untouched so -0.0 survives.
TensorMap add_residual(const TensorMap& base, const TensorMap& residual) {
  TensorMap out = ewise_combine(base, residual, CombineOp::add);
  const auto r = residual.values();
  const auto b = base.values();
  auto o = out.values();
  for (std::size_t i = 0; i < o.size(); ++i)
    if (r[i] == 0.0f) o[i] = b[i];
  return out;
}

}  // namespace

SdarWeights SdarWeights::zeros(int k, int c) {
  return SdarWeights{LinearMap::zeros(2, k + 3), LinearMap::zeros(k, 4 * k), LinearMap::zeros(1, 2),
                     LinearMap::zeros(1, k), LinearMap::zeros(4 * k + 1, c)};
}

void SdarWeights::validate(int k, int c) const {
  check_block(conv_s, 2, k + 3, "conv_s");
  check_block(conv_d, k, 4 * k, "conv_d");
  check_block(proj_s, 1, 2, "proj_s");
  check_block(proj_d, 1, k, "proj_d");
  check_block(conv_f, 4 * k + 1, c, "conv_f");
}

TensorMap refine_scale(const TensorMap& heat_init, const TensorMap& scale_init, const SdarWeights& w) {
  if (scale_init.channels() != 2) throw ShapeError("refine_scale: scale map must have 2 channels");
  const int k = heat_init.channels() - 1;
  if (k < 1) throw ShapeError("refine_scale: heat map must have K+1 channels");
  check_block(w.conv_s, 2, k + 3, "conv_s");
  return w.conv_s.apply(concat(heat_init, scale_init));
}

TensorMap refine_depth(const TensorMap& offset_init, const TensorMap& depth_init, const SdarWeights& w) {
  const int k = depth_init.channels();
  if (k < 1 || offset_init.channels() != 3 * k) {
    throw ShapeError("refine_depth: offset map must have 3K channels for a K-channel depth map");
  }
  check_block(w.conv_d, k, 4 * k, "conv_d");
  return w.conv_d.apply(concat(offset_init, depth_init));
}

std::pair<TensorMap, TensorMap> refine_heat_offset(const TensorMap& feature, const TensorMap& scale_gate,
                                                   const TensorMap& depth_gate, const SdarWeights& w) {
  if (scale_gate.channels() != 2) throw ShapeError("refine_heat_offset: scale map must have 2 channels");
  const int k = depth_gate.channels();
  if (k < 1) throw ShapeError("refine_heat_offset: depth map must have K channels");
  if (!feature.same_plane_shape(scale_gate) || !feature.same_plane_shape(depth_gate)) {
    throw ShapeError("refine_heat_offset: maps disagree on height/width");
  }
  check_block(w.proj_s, 1, 2, "proj_s");
  check_block(w.proj_d, 1, k, "proj_d");
  check_block(w.conv_f, 4 * k + 1, feature.channels(), "conv_f");

  const TensorMap scale_attention = w.proj_s.apply(scale_gate);
  const TensorMap depth_attention = w.proj_d.apply(depth_gate);
  const TensorMap gated = ewise_combine(
      ewise_combine(feature, scale_attention, CombineOp::mul, Broadcast::b_single_channel),
      ewise_combine(feature, depth_attention, CombineOp::mul, Broadcast::b_single_channel), CombineOp::add);
  return split(w.conv_f.apply(gated), k + 1);
}

DataMapSet sdar_apply(const DataMapSet& in, const SdarWeights& w, const SdarOptions& options) {
  in.validate();
  if (!in.feature) throw PreconditionError("sdar_apply: the map set carries no feature map");
  const int k = in.joint_count;
  w.validate(k, in.feature->channels());

  DataMapSet out;
  out.joint_count = k;
  out.feature = in.feature;

  const TensorMap scale_residual = refine_scale(in.heat, in.scale, w);
  const TensorMap depth_residual = refine_depth(in.offset3d, in.depth, w);
  out.scale = add_residual(in.scale, scale_residual);
  out.depth = add_residual(in.depth, depth_residual);

  const TensorMap& scale_gate = options.gate_uses_refined ? out.scale : scale_residual;
  const TensorMap& depth_gate = options.gate_uses_refined ? out.depth : depth_residual;
  auto [heat_residual, offset_residual] = refine_heat_offset(*in.feature, scale_gate, depth_gate, w);
  out.heat = add_residual(in.heat, heat_residual);
  out.offset3d = add_residual(in.offset3d, offset_residual);
  return out;
}

TensorBundle to_bundle(const SdarWeights& w) {
  TensorBundle bundle;
  for (std::size_t i = 0; i < kBlocks.size(); ++i) {
    const LinearMap& m = block(w, i);
    const std::string name = kBlocks[i];
    bundle.emplace(name + ".w", TensorMap(1, m.weights.rows, m.weights.cols, m.weights.values));
    bundle.emplace(name + ".b", TensorMap(1, 1, static_cast<int>(m.bias.size()), m.bias));
  }
  return bundle;
}

SdarWeights from_bundle(const TensorBundle& bundle) {
  SdarWeights w;
  for (std::size_t i = 0; i < kBlocks.size(); ++i) {
    const std::string name = kBlocks[i];
    auto wit = bundle.find(name + ".w");
    auto bit = bundle.find(name + ".b");
    if (wit == bundle.end() || bit == bundle.end()) {
      throw FormatError("weights bundle is missing \"" + name + (wit == bundle.end() ? ".w" : ".b") + "\"", 0);
    }
    const TensorMap& wt = wit->second;
    const TensorMap& bt = bit->second;
    if (wt.channels() != 1 || bt.channels() != 1 || bt.height() != 1 || bt.width() != wt.height()) {
      throw FormatError("weights bundle entry \"" + name + "\" has inconsistent shapes", 0);
    }
    LinearMap& m = block(w, i);
    m.weights.rows = wt.height();
    m.weights.cols = wt.width();
    m.weights.values.assign(wt.values().begin(), wt.values().end());
    m.bias.assign(bt.values().begin(), bt.values().end());
  }
  const int k = w.conv_d.weights.rows;
  w.validate(k, w.conv_f.weights.cols);
  return w;
}

void save_sdar_weights(const std::filesystem::path& path, const SdarWeights& w) {
  write_bundle(path, to_bundle(w));
}

SdarWeights load_sdar_weights(const std::filesystem::path& path) { return from_bundle(read_bundle(path)); }

}  // namespace grm3d
