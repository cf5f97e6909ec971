#include "grm3d/dgr.hpp"

#include <algorithm>
#include <cmath>

#include "grm3d/errors.hpp"

namespace grm3d {

DensePaths dense_paths(const PersonDetection& person, const TensorMap& offset3d) {
  const int k = person.joint_count();
  if (offset3d.channels() != 3 * k) throw ShapeError("dense_paths: offset map must have 3K channels");
  DensePaths paths{JointTable<Point3>(k), std::vector<bool>(static_cast<std::size_t>(k), false)};
  for (int i = 0; i < k; ++i) {
    const auto& root = person.roots_2d[static_cast<std::size_t>(i)];
    if (!root || !person.roots_3d[static_cast<std::size_t>(i)]) continue;
    paths.valid_row[static_cast<std::size_t>(i)] = true;
    const auto v = sample_at(offset3d, root->position);
    for (int j = 0; j < k; ++j) {
      const auto b = static_cast<std::size_t>(3 * j);
      paths.offsets(i, j) = Point3{v[b], v[b + 1], v[b + 2]};
    }
  }
  return paths;
}

BoneConfidence bone_confidence(const PersonDetection& person, const DensePaths& paths,
                               const SkeletonConfig& skeleton, const DgrOptions& options) {
  const int k = person.joint_count();
  if (skeleton.joint_count != k) throw ShapeError("bone_confidence: skeleton joint count mismatch");
  const int h = skeleton.head_top_index;
  const int c = skeleton.mid_hip_index;

  BoneConfidence out;
  out.values = JointTable<double>(k, 0.0);
  double norm = 0.0;
  if (paths.valid_row[static_cast<std::size_t>(h)]) norm = paths.offsets(h, c).norm();
  if (norm < options.epsilon) {
    out.used_fallback = true;
    norm = skeleton.prior(h, c) / options.prior_mm_per_unit;
    out.diagnostic = paths.valid_row[static_cast<std::size_t>(h)]
                         ? "head-to-hip offset below epsilon; using prior normaliser"
                         : "head-top root missing; using prior normaliser";
  }
  out.normalizer = norm;
  for (int i = 0; i < k; ++i) {
    if (!paths.valid_row[static_cast<std::size_t>(i)]) continue;
    for (int j = 0; j < k; ++j) {
      const double gamma = std::fabs(skeleton.prior_ratio(i, j));
      out.values(i, j) = std::exp(-(paths.offsets(i, j).norm() / norm + gamma));
    }
  }
  return out;
}

Pixel target_location(const PersonDetection& person, const DensePaths& paths, int j, int width, int height) {
  if (const auto& root = person.roots_2d[static_cast<std::size_t>(j)]) return root->position;
  std::vector<int> xs, ys;
  for (int i = 0; i < person.joint_count(); ++i) {
    if (!paths.valid_row[static_cast<std::size_t>(i)]) continue;
    const auto& p = person.roots_2d[static_cast<std::size_t>(i)]->position;
    xs.push_back(static_cast<int>(std::lround(p.x + paths.offsets(i, j).x)));
    ys.push_back(static_cast<int>(std::lround(p.y + paths.offsets(i, j).y)));
  }
  if (xs.empty()) return person.anchor;
  auto lower_median = [](std::vector<int>& v) {
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>((v.size() - 1) / 2);
    std::nth_element(v.begin(), mid, v.end());
    return *mid;
  };
  return Pixel{std::clamp(lower_median(xs), 0, width - 1), std::clamp(lower_median(ys), 0, height - 1)};
}

JointTable<double> path_weights(const PersonDetection& person, const TensorMap& heat,
                                const BoneConfidence& bone_conf, const DensePaths& paths) {
  const int k = person.joint_count();
  if (heat.channels() != k + 1) throw ShapeError("path_weights: heat map must have K+1 channels");
  JointTable<double> w(k, 0.0);
  std::vector<double> target_heat(static_cast<std::size_t>(k), 0.0);
  for (int j = 0; j < k; ++j) {
    const Pixel at = target_location(person, paths, j, heat.width(), heat.height());
    target_heat[static_cast<std::size_t>(j)] = std::max(0.0, static_cast<double>(heat.at(j, at.y, at.x)));
  }
  for (int i = 0; i < k; ++i) {
    if (!paths.valid_row[static_cast<std::size_t>(i)]) continue;
    const Pixel pi = person.roots_2d[static_cast<std::size_t>(i)]->position;
    const double source_heat = std::max(0.0, static_cast<double>(heat.at(i, pi.y, pi.x)));
    for (int j = 0; j < k; ++j) w(i, j) = source_heat * bone_conf.values(i, j) * target_heat[static_cast<std::size_t>(j)];
  }
  return w;
}

DecodingGraph build_decoding_graph(const PersonDetection& person, const DataMapSet& maps,
                                   const SkeletonConfig& skeleton, const DgrOptions& options) {
  maps.validate();
  DensePaths paths = dense_paths(person, maps.offset3d);
  const BoneConfidence r = bone_confidence(person, paths, skeleton, options);
  JointTable<double> w = path_weights(person, maps.heat, r, paths);
  return DecodingGraph{person, std::move(paths.offsets), std::move(w), std::move(paths.valid_row)};
}

Pose3D decode_pose_dgr(const DecodingGraph& g) {
  const int k = g.joint_count();
  Pose3D pose(k, g.person.id);
  for (int j = 0; j < k; ++j) {
    double wsum = 0.0;
    Point3 acc;
    for (int i = 0; i < k; ++i) {
      if (!g.valid_row[static_cast<std::size_t>(i)]) continue;
      const double w = g.weights(i, j);
      if (!(w > 0.0)) continue;
      const Point3& root = *g.person.roots_3d[static_cast<std::size_t>(i)];
      acc += w * (root + g.offsets(i, j));
      wsum += w;
    }
    if (wsum > 0.0) {
      pose.joints[static_cast<std::size_t>(j)] = (1.0 / wsum) * acc;
      pose.valid[static_cast<std::size_t>(j)] = true;
    } else if (const auto& own = g.person.roots_3d[static_cast<std::size_t>(j)]) {
      pose.joints[static_cast<std::size_t>(j)] = *own;
      pose.valid[static_cast<std::size_t>(j)] = true;
    }
  }
  if (pose.valid_count() == 0) throw DecodeError("decoding graph has no usable paths", g.person.id);
  return pose;
}

}  // namespace grm3d
