#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "grm3d/dgr.hpp"
#include "grm3d/mrkd.hpp"
#include "grm3d/pose.hpp"
#include "grm3d/skeleton.hpp"
#include "grm3d/tensor.hpp"

namespace grm3d {

enum class GraphMode { star, tree, dgr };

GraphMode parse_graph_mode(const std::string& name);
std::string to_string(GraphMode mode);

struct DecodeFailure {
  int person_id = -1;
  std::string message;
};

struct ImageDecode {
  GroupingResult detections;
  std::vector<Pose3D> poses;  // one per successfully decoded person
  std::vector<DecodeFailure> failures;
};

struct PipelineOptions {
  DecodeOptions detect;
  DgrOptions dgr;
};

/// Detects persons and decodes each with the chosen graph. Per-person decode
/// errors are collected, not thrown.
ImageDecode decode_image(const DataMapSet& maps, const SkeletonConfig& skeleton, GraphMode mode,
                         const PipelineOptions& options = {});

/// Text form of decoded poses:
///   # grm3d poses v1
///   joint_count: K
///   poses: N
///   failures: F
///   pose <id>            (N blocks of K lines "j x y z valid")
///   failure <id> <message>
std::string format_poses(const ImageDecode& result, int joint_count);
struct PoseFile {
  std::vector<Pose3D> poses;
  std::vector<DecodeFailure> failures;
};
PoseFile parse_poses(const std::string& text);
PoseFile load_poses(const std::filesystem::path& path);

/// A map directory holds heat.gmap, scale.gmap, depth.gmap, offset3d.gmap and
/// optionally feature.gmap.
void write_map_dir(const std::filesystem::path& dir, const DataMapSet& maps);
DataMapSet read_map_dir(const std::filesystem::path& dir);

}  // namespace grm3d
