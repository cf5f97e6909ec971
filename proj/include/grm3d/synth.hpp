#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "grm3d/pose.hpp"
#include "grm3d/skeleton.hpp"
#include "grm3d/tensor.hpp"

namespace grm3d {

/// Ground-truth person in image space: x, y in pixels, z in depth units.
/// Depth units equal pixel units, so 3D offsets are isotropic.
struct ScenePerson {
  std::vector<Point3> joints;
  std::vector<bool> visible;
};

struct Scene {
  int height = 0;
  int width = 0;
  std::uint64_t seed = 0;
  double crowding = 0.0;
  /// Millimetres per image/depth unit; converts decodes to metric poses.
  double mm_per_unit = 1.0;
  std::vector<ScenePerson> persons;

  int joint_count() const { return persons.empty() ? 0 : static_cast<int>(persons.front().joints.size()); }
};

struct SceneParams {
  int persons = 1;
  int height = 128;
  int width = 128;
  std::uint64_t seed = 0;
  /// 0 spreads persons across the image, 1 packs them together.
  double crowding = 0.0;
  /// Bone lengths are prior * (1 + u), u uniform in [-bone_jitter, bone_jitter].
  double bone_jitter = 0.1;
  double mm_per_unit = 30.0;
  double depth_min = 150.0;
  double depth_max = 250.0;
  int max_retries = 200;
  /// Bone directions; defaults to the built-in rest pose when the skeleton is
  /// the default one, random directions otherwise.
  std::optional<RestPose> rest_pose;
};

enum class DepthEncoding { raw, delta_inverse };

struct RenderParams {
  double gaussian_sigma = 2.0;
  int offset_radius = 3;
  DepthEncoding depth_encoding = DepthEncoding::delta_inverse;

  void validate() const;
};

struct CorruptionParams {
  double occlusion_prob = 0.0;
  std::uint64_t seed = 0;
  bool suppress_centers = false;
  /// Occluded heat peaks are multiplied by this factor (must stay below the
  /// detection threshold).
  double suppress_factor = 0.2;
  /// Zero-mean Gaussian noise added to each offset vector, with standard
  /// deviation proportional to the vector's length. 0 disables.
  double offset_noise = 0.0;
};

struct CorruptionResult {
  DataMapSet maps;
  /// occluded[person][joint]
  std::vector<std::vector<bool>> occluded;
};

Scene generate_scene(const SkeletonConfig& skeleton, const SceneParams& params);

/// Image-space midpoint of the two joints named in center_definition.
Point3 body_center(const ScenePerson& person, const SkeletonConfig& skeleton);

/// Renders heat/scale/depth/offset maps that decode exactly back to the scene.
DataMapSet render_maps(const Scene& scene, const SkeletonConfig& skeleton, const RenderParams& params = {});

/// (1,H,W) mask of supervised pixels: the offset_radius discs around joints and centers.
TensorMap support_mask(const Scene& scene, const SkeletonConfig& skeleton, const RenderParams& params = {});

/// Deterministic random feature map for exercising the refinement stage.
TensorMap synthetic_feature(int channels, int height, int width, std::uint64_t seed);

CorruptionResult corrupt_maps(const DataMapSet& maps, const Scene& scene, const SkeletonConfig& skeleton,
                              const CorruptionParams& corruption, const RenderParams& render = {});

/// Ground truth as poses (image space), one per person, ids in scene order.
std::vector<Pose3D> scene_poses(const Scene& scene);

std::string format_scene(const Scene& scene);
Scene parse_scene(const std::string& text);
Scene load_scene(const std::filesystem::path& path);

}  // namespace grm3d
