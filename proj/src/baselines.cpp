#include "grm3d/baselines.hpp"

#include <cmath>

#include "grm3d/errors.hpp"

namespace grm3d {
namespace {

Point3 offset_at(const TensorMap& offset3d, Pixel at, int j) {
  const auto v = sample_at(offset3d, at, {3 * j, 3 * j + 3});
  return Point3{v[0], v[1], v[2]};
}

}  // namespace

Pose3D decode_star(const PersonDetection& person, const TensorMap& offset3d, const TensorMap& depth,
                   const SkeletonConfig& skeleton, bool apply_delta) {
  const int k = person.joint_count();
  if (offset3d.channels() != 3 * k || depth.channels() != k || skeleton.joint_count != k) {
    throw ShapeError("decode_star: map channels do not match the joint count");
  }
  if (!person.center) throw DecodeError("star decoding needs a detected body center", person.id);
  const Pixel c = person.center->position;
  const double raw = sample_at(depth, c, {skeleton.mid_hip_index, skeleton.mid_hip_index + 1})[0];
  const double z = apply_delta ? delta_transform(raw) : raw;
  if (!std::isfinite(z)) throw DecodeError("center depth is not finite", person.id);
  const Point3 center{static_cast<double>(c.x), static_cast<double>(c.y), z};

  Pose3D pose(k, person.id);
  for (int j = 0; j < k; ++j) {
    pose.joints[static_cast<std::size_t>(j)] = center + offset_at(offset3d, c, j);
    pose.valid[static_cast<std::size_t>(j)] = true;
  }
  return pose;
}

Pose3D decode_tree(const PersonDetection& person, const TensorMap& offset3d, const SkeletonConfig& skeleton) {
  const int k = person.joint_count();
  if (offset3d.channels() != 3 * k || skeleton.joint_count != k) {
    throw ShapeError("decode_tree: map channels do not match the joint count");
  }
  const int root = skeleton.tree_root();
  const auto& root3d = person.roots_3d[static_cast<std::size_t>(root)];
  if (!root3d || !person.roots_2d[static_cast<std::size_t>(root)]) throw DecodeError("tree decoding needs the tree root joint", person.id);

  Pose3D pose(k, person.id);
  // The root is refined by its own offset to sub-pixel precision, like every child.
  const Pixel root_px = person.roots_2d[static_cast<std::size_t>(root)]->position;
  pose.joints[static_cast<std::size_t>(root)] =
      Point3{static_cast<double>(root_px.x), static_cast<double>(root_px.y), root3d->z} +
      offset_at(offset3d, root_px, root);
  pose.valid[static_cast<std::size_t>(root)] = true;
  for (int j : skeleton.tree_order()) {
    if (j == root) continue;
    const auto parent = static_cast<std::size_t>(skeleton.tree_parents[static_cast<std::size_t>(j)]);
    if (!pose.valid[parent]) continue;
    const Point3& p = pose.joints[parent];
    const Pixel at{static_cast<int>(std::lround(p.x)), static_cast<int>(std::lround(p.y))};
    if (!offset3d.contains(at)) continue;
    pose.joints[static_cast<std::size_t>(j)] =
        Point3{static_cast<double>(at.x), static_cast<double>(at.y), p.z} + offset_at(offset3d, at, j);
    pose.valid[static_cast<std::size_t>(j)] = true;
  }
  return pose;
}

}  // namespace grm3d
