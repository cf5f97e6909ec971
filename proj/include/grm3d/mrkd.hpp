#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "grm3d/pose.hpp"
#include "grm3d/tensor.hpp"

namespace grm3d {

/// Heat-map local maximum. joint_index == K marks a body center.
struct Peak {
  int joint_index = 0;
  Pixel position;
  double confidence = 0.0;

  friend bool operator==(const Peak&, const Peak&) = default;
};

/// One person's root keypoints. `center` is empty for persons recovered from
/// orphan keypoints whose center peak was not found; `anchor` is then the
/// regressed center estimate.
struct PersonDetection {
  int id = -1;
  std::optional<Peak> center;
  Pixel anchor;
  std::vector<std::optional<Peak>> roots_2d;
  std::vector<std::optional<Point3>> roots_3d;
  std::vector<bool> visibility;

  PersonDetection() = default;
  PersonDetection(int joint_count, int person_id)
      : id(person_id),
        roots_2d(static_cast<std::size_t>(joint_count)),
        roots_3d(static_cast<std::size_t>(joint_count)),
        visibility(static_cast<std::size_t>(joint_count), false) {}

  int joint_count() const { return static_cast<int>(roots_2d.size()); }
  int detected_count() const;
  bool has_root(int j) const { return visibility[static_cast<std::size_t>(j)]; }
};

struct DecodeOptions {
  double threshold = 0.5;
  /// Keypoints whose regressed center lies farther than this (px) from their
  /// assigned center are rejected and treated as orphans.
  double gate_radius = 10.0;
  /// Group orphan keypoints into center-less persons by their regressed centers.
  bool recover_orphans = true;
  /// Read depth through delta(x) = 1/sigmoid(x) - 1.
  bool apply_delta = true;
};

struct GroupingResult {
  std::vector<PersonDetection> persons;
  std::vector<Peak> orphans;
  std::vector<std::string> diagnostics;
};

/// Strict 3x3 local maxima at or above `threshold`, across all heat channels.
/// Plateaus resolve to their first pixel in raster order. Output is ordered by
/// channel, then row, then column.
std::vector<Peak> extract_peaks(const TensorMap& heat, double threshold);

/// p + M_s|p for each peak (center peaks map to themselves).
std::vector<std::array<double, 2>> regress_centers(const std::vector<Peak>& peaks, const TensorMap& scale);

/// Per joint category, minimum-cost assignment of keypoints to centers with cost
/// |regressed center - center|. Each person receives at most one keypoint per
/// category; among equal-cost optima the lowest-index pairing wins. Center peaks
/// in `peaks` are ignored. Returns one PersonDetection per center, in order.
GroupingResult assign_keypoints(const std::vector<Peak>& peaks, const std::vector<Peak>& centers,
                                const TensorMap& scale, int joint_count,
                                double gate_radius = 10.0);

/// Clusters orphan keypoints by regressed center and assigns them to the
/// resulting center-less persons; ids continue from `first_id`.
GroupingResult recover_orphans(const std::vector<Peak>& orphans, const TensorMap& scale, int joint_count,
                               double gate_radius, int first_id);

/// Fills roots_3d = (x, y, z) with z read from depth channel j at the root.
std::vector<PersonDetection> lift_roots_3d(std::vector<PersonDetection> dets, const TensorMap& depth,
                                           bool apply_delta = true);

/// Full keypoint pipeline on refined maps: peaks, grouping, orphan recovery, lifting.
GroupingResult detect_persons(const DataMapSet& maps, const DecodeOptions& options = {});

std::string format_detections(const std::vector<PersonDetection>& dets, int joint_count);
std::vector<PersonDetection> parse_detections(const std::string& text);

}  // namespace grm3d
