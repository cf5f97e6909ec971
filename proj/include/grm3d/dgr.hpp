#pragma once

#include <string>
#include <vector>

#include "grm3d/mrkd.hpp"
#include "grm3d/pose.hpp"
#include "grm3d/skeleton.hpp"
#include "grm3d/tensor.hpp"

namespace grm3d {

/// K x K table indexed (root i, target j).
template <typename T>
struct JointTable {
  int size = 0;
  std::vector<T> cells;

  JointTable() = default;
  explicit JointTable(int k, T fill = T{}) : size(k), cells(static_cast<std::size_t>(k) * k, fill) {}
  T& operator()(int i, int j) { return cells[static_cast<std::size_t>(i) * size + j]; }
  const T& operator()(int i, int j) const { return cells[static_cast<std::size_t>(i) * size + j]; }
};

/// Dense decoding paths e^{ij}: the offset to joint j read at root i.
struct DensePaths {
  JointTable<Point3> offsets;
  std::vector<bool> valid_row;
};

struct BoneConfidence {
  JointTable<double> values;
  double normalizer = 1.0;
  bool used_fallback = false;
  std::string diagnostic;
};

struct DgrOptions {
  /// Millimetres per map unit, used to turn the sigma(h, c) prior into map units
  /// when the head-top root is missing.
  double prior_mm_per_unit = 1.0;
  /// Head-to-hip offsets shorter than this (map units) fall back to the prior.
  double epsilon = 1e-6;
};

struct DecodingGraph {
  PersonDetection person;
  JointTable<Point3> offsets;
  JointTable<double> weights;
  std::vector<bool> valid_row;

  int joint_count() const { return offsets.size; }
};

DensePaths dense_paths(const PersonDetection& person, const TensorMap& offset3d);

/// R(i, j) = exp(-(|e^{ij}| / |e^{hc}| + gamma(i, j))), e^{hc} read at the head-top root.
BoneConfidence bone_confidence(const PersonDetection& person, const DensePaths& paths,
                               const SkeletonConfig& skeleton, const DgrOptions& options = {});

/// Location used to read the target heat factor for joint j. Detected joints use
/// their root; missing ones use the per-axis median of round(p^i + e^{ij}) over
/// detected roots, clamped to the map.
Pixel target_location(const PersonDetection& person, const DensePaths& paths, int j, int width, int height);

/// W(i, j) = M_h|_{p^i}^i * R(i, j) * M_h|_{p^j}^j; heat factors are clamped at 0.
JointTable<double> path_weights(const PersonDetection& person, const TensorMap& heat,
                                const BoneConfidence& bone_conf, const DensePaths& paths);

DecodingGraph build_decoding_graph(const PersonDetection& person, const DataMapSet& maps,
                                   const SkeletonConfig& skeleton, const DgrOptions& options = {});

/// Each joint is the weight-normalised mean of p3d^i + e^{ij} over roots i.
/// Zero-weight columns fall back to the detected root of j, otherwise the joint is
/// invalid. Throws DecodeError if no joint can be decoded.
Pose3D decode_pose_dgr(const DecodingGraph& graph);

}  // namespace grm3d
