#pragma once

#include <string>
#include <vector>

#include "grm3d/pose.hpp"

namespace grm3d {

enum class PckMode { rel, abs };

/// Scales an image-space pose (x px, y px, z depth units) to millimetres.
Pose3D to_metric(const Pose3D& pose, double mm_per_unit);

struct Intrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
};

/// Pinhole back-projection of (x px, y px, depth z). Throws DomainError for z <= 0.
Point3 back_project(const Point3& image_point, const Intrinsics& k);

/// Mean Euclidean error over joints valid in both poses, optionally after
/// subtracting each pose's root joint. Throws MetricError when nothing overlaps.
double mpjpe(const Pose3D& pred, const Pose3D& gt, bool align_root, int root_index);

/// Least-squares similarity (rotation, translation, uniform scale) alignment of
/// pred onto gt over common joints.
struct Similarity {
  double scale = 1.0;
  double rotation[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  Point3 translation;

  Point3 apply(const Point3& p) const;
};
Similarity procrustes_align(const Pose3D& pred, const Pose3D& gt);

/// MPJPE after procrustes_align. Throws MetricError for fewer than three
/// common joints or collinear configurations.
double pa_mpjpe(const Pose3D& pred, const Pose3D& gt);

/// Greedy GT-to-prediction matching by smallest root distance. Returns, per GT
/// person, the index of its prediction or -1.
std::vector<int> match_persons(const std::vector<Pose3D>& preds, const std::vector<Pose3D>& gts, int root_index);

struct PckResult {
  double percent = 0.0;
  std::vector<double> per_joint;  // percent per joint index
  int correct = 0;
  int total = 0;
};

/// Joints within `threshold_mm` (inclusive) of the matched prediction. Unmatched
/// or invalid predictions count as misses. Throws MetricError for an empty GT set.
PckResult pck3d(const std::vector<Pose3D>& preds, const std::vector<Pose3D>& gts, double threshold_mm,
                PckMode mode, int root_index);
PckResult pck3d(const std::vector<Pose3D>& preds, const std::vector<Pose3D>& gts,
                const std::vector<int>& matching, double threshold_mm, PckMode mode, int root_index);

/// 0, 5, ..., 150 mm.
std::vector<double> default_auc_thresholds();

/// Trapezoidal mean of PCK_rel (as a fraction) over the threshold grid.
double auc_pck(const std::vector<Pose3D>& preds, const std::vector<Pose3D>& gts,
               const std::vector<double>& thresholds, int root_index);

/// Per person: other persons' joints inside this person's 2D joint bounding box,
/// divided by its own joint count, clamped to [0, 1).
std::vector<double> crowd_index(const std::vector<Pose3D>& persons);
double mean_crowd_index(const std::vector<Pose3D>& persons);

struct MetricReport {
  double pck_rel = 0.0;
  double pck_abs = 0.0;
  double auc_rel = 0.0;
  double mpjpe = 0.0;
  double pa_mpjpe = 0.0;
  std::vector<double> per_joint_pck_rel;
  std::vector<int> matching;
  int gt_persons = 0;
  int pred_persons = 0;
  int decode_failures = 0;
  double crowd_index = 0.0;
};

struct EvalOptions {
  double pck_threshold_mm = 150.0;
  std::vector<double> auc_thresholds = default_auc_thresholds();
  int root_index = 0;
};

/// Inputs are metric poses (mm).
MetricReport evaluate(const std::vector<Pose3D>& preds, const std::vector<Pose3D>& gts, const EvalOptions& options);

/// key: value lines in a fixed order followed by a per-joint table.
std::string format_report(const MetricReport& report, const std::vector<std::string>& joint_names);

}  // namespace grm3d
