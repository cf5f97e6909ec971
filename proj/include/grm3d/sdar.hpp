#pragma once

#include <filesystem>
#include <utility>
#include <vector>

#include "grm3d/tensor.hpp"
#include "grm3d/tensor_io.hpp"

namespace grm3d {

/// 1x1 convolution parameters: out x in weights plus a bias per output channel.
struct LinearMap {
  Matrix weights;
  std::vector<float> bias;

  static LinearMap zeros(int out, int in) {
    return LinearMap{Matrix(out, in), std::vector<float>(static_cast<std::size_t>(out), 0.0f)};
  }
  TensorMap apply(const TensorMap& input) const { return conv1x1(input, weights, bias); }
  friend bool operator==(const LinearMap&, const LinearMap&) = default;
};

/// Scale-and-depth-aware refinement parameters.
///   conv_s: (K+1)+2 -> 2     conv_d: 3K+K -> K
///   proj_s: 2 -> 1           proj_d: K -> 1      (feature gates)
///   conv_f: C -> (K+1)+3K
struct SdarWeights {
  LinearMap conv_s;
  LinearMap conv_d;
  LinearMap proj_s;
  LinearMap proj_d;
  LinearMap conv_f;

  /// All-zero weights; sdar_apply with these returns its input unchanged.
  static SdarWeights zeros(int joint_count, int feature_channels);

  int joint_count() const { return conv_d.weights.rows; }
  int feature_channels() const { return conv_f.weights.cols; }
  /// Throws ShapeError unless every block matches (K, C).
  void validate(int joint_count, int feature_channels) const;

  friend bool operator==(const SdarWeights&, const SdarWeights&) = default;
};

struct SdarOptions {
  /// Gate the feature map with the residual-updated scale/depth maps (M^I + M^R).
  /// When false the gate sees only the residual branch M^R.
  bool gate_uses_refined = true;
};

TensorMap refine_scale(const TensorMap& heat_init, const TensorMap& scale_init, const SdarWeights& w);
TensorMap refine_depth(const TensorMap& offset_init, const TensorMap& depth_init, const SdarWeights& w);

/// Returns (heat residual with K+1 channels, offset residual with 3K channels).
std::pair<TensorMap, TensorMap> refine_heat_offset(const TensorMap& feature,
                                                   const TensorMap& scale_gate,
                                                   const TensorMap& depth_gate,
                                                   const SdarWeights& w);

/// Residual refinement of all four maps. Requires maps_init.feature.
/// Not idempotent: applying twice with nonzero weights keeps adding residuals.
DataMapSet sdar_apply(const DataMapSet& maps_init, const SdarWeights& w, const SdarOptions& options = {});

TensorBundle to_bundle(const SdarWeights& w);
SdarWeights from_bundle(const TensorBundle& bundle);
void save_sdar_weights(const std::filesystem::path& path, const SdarWeights& w);
SdarWeights load_sdar_weights(const std::filesystem::path& path);

}  // namespace grm3d
