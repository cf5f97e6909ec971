#pragma once

#include "grm3d/mrkd.hpp"
#include "grm3d/pose.hpp"
#include "grm3d/skeleton.hpp"
#include "grm3d/tensor.hpp"

namespace grm3d {

/// Single-root star decoding: every joint is center_3d + offset read at the
/// center pixel. The center depth is the mid-hip depth channel read at the
/// center. Throws DecodeError when the person has no detected center.
Pose3D decode_star(const PersonDetection& person, const TensorMap& offset3d, const TensorMap& depth,
                   const SkeletonConfig& skeleton, bool apply_delta = true);

/// Hierarchical decoding along skeleton.tree_parents. Each child is read at the
/// rounded position of its parent's estimate, so errors accumulate down the tree.
/// Children whose parent estimate leaves the map are invalid. Throws DecodeError
/// when the tree root was not detected.
Pose3D decode_tree(const PersonDetection& person, const TensorMap& offset3d, const SkeletonConfig& skeleton);

}  // namespace grm3d
