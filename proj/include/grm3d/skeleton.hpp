#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace grm3d {

inline constexpr int kNoParent = -1;

/// Joint layout plus the statistical priors used by bone confidence.
/// bone_prior(i, j) is the average distance in millimetres between joints i and j.
struct SkeletonConfig {
  int joint_count = 0;
  std::vector<std::string> joint_names;
  std::vector<double> bone_prior;  // joint_count x joint_count, row-major
  int head_top_index = 0;
  int mid_hip_index = 0;
  std::vector<int> tree_parents;           // kNoParent marks the root
  std::pair<int, int> center_definition;  // (left hip, right hip)

  double prior(int i, int j) const {
    return bone_prior[static_cast<std::size_t>(i) * joint_count + j];
  }
  /// gamma(i, j) = sigma(i, j) / sigma(head_top, mid_hip)
  double prior_ratio(int i, int j) const { return prior(i, j) / prior(head_top_index, mid_hip_index); }

  int tree_root() const;
  /// Parent-before-child order starting at the tree root.
  std::vector<int> tree_order() const;
  std::vector<std::vector<int>> tree_children() const;

  /// Throws PreconditionError describing the first violated invariant.
  void validate() const;

  friend bool operator==(const SkeletonConfig&, const SkeletonConfig&) = default;
};

/// Rest-pose joint positions in millimetres (x right, y down, z away from camera).
struct RestPose {
  std::vector<std::array<double, 3>> joints;
};

/// 15-joint layout: head_top, neck, r/l shoulder-elbow-wrist, r/l hip-knee-ankle, pelvis.
/// bone_prior holds all-pairs distances of the default rest pose.
SkeletonConfig default_skeleton();
RestPose default_rest_pose();

/// Builds an all-pairs distance matrix from a rest pose.
std::vector<double> pairwise_distances(const RestPose& pose);

std::string format_skeleton(const SkeletonConfig& skeleton);
SkeletonConfig parse_skeleton(const std::string& text);
SkeletonConfig load_skeleton(const std::filesystem::path& path);

}  // namespace grm3d
