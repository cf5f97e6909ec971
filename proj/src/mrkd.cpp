#include "grm3d/mrkd.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "grm3d/assignment.hpp"
#include "grm3d/errors.hpp"
#include "grm3d/text_io.hpp"

namespace grm3d {

int PersonDetection::detected_count() const {
  return static_cast<int>(std::count(visibility.begin(), visibility.end(), true));
}

std::vector<Peak> extract_peaks(const TensorMap& heat, double threshold) {
  std::vector<Peak> peaks;
  const int h = heat.height();
  const int w = heat.width();
  for (int c = 0; c < heat.channels(); ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const float v = heat.at(c, y, x);
        if (!(v >= threshold)) continue;
        bool is_peak = true;
        for (int dy = -1; dy <= 1 && is_peak; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            const int nx = x + dx;
            const int ny = y + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const float n = heat.at(c, ny, nx);
            const bool earlier = dy < 0 || (dy == 0 && dx < 0);
            if (earlier ? !(v > n) : !(v >= n)) {
              is_peak = false;
              break;
            }
          }
        }
        if (is_peak) peaks.push_back(Peak{c, {x, y}, std::clamp(static_cast<double>(v), 0.0, 1.0)});
      }
    }
  }
  return peaks;
}

std::vector<std::array<double, 2>> regress_centers(const std::vector<Peak>& peaks, const TensorMap& scale) {
  if (scale.channels() != 2) throw ShapeError("regress_centers: scale map must have 2 channels");
  std::vector<std::array<double, 2>> out;
  out.reserve(peaks.size());
  for (const Peak& p : peaks) {
    const auto s = sample_at(scale, p.position, {0, 2});
    out.push_back({p.position.x + s[0], p.position.y + s[1]});
  }
  return out;
}

GroupingResult assign_keypoints(const std::vector<Peak>& peaks, const std::vector<Peak>& centers,
                                const TensorMap& scale, int joint_count, double gate_radius) {
  GroupingResult result;
  for (std::size_t n = 0; n < centers.size(); ++n) {
    PersonDetection det(joint_count, static_cast<int>(n));
    det.center = centers[n];
    det.anchor = centers[n].position;
    result.persons.push_back(std::move(det));
  }

  std::vector<Peak> keypoints;
  for (const Peak& p : peaks)
    if (p.joint_index >= 0 && p.joint_index < joint_count) keypoints.push_back(p);
  if (keypoints.empty()) return result;
  if (centers.empty()) {
    result.orphans = keypoints;
    result.diagnostics.push_back("no centers detected; " + std::to_string(keypoints.size()) +
                                 " keypoints left unassigned");
    return result;
  }

  const auto regressed = regress_centers(keypoints, scale);
  for (int j = 0; j < joint_count; ++j) {
    std::vector<std::size_t> members;
    for (std::size_t m = 0; m < keypoints.size(); ++m)
      if (keypoints[m].joint_index == j) members.push_back(m);
    if (members.empty()) continue;

    CostMatrix cost(static_cast<int>(members.size()), static_cast<int>(centers.size()));
    for (std::size_t r = 0; r < members.size(); ++r) {
      const auto& c_tilde = regressed[members[r]];
      for (std::size_t n = 0; n < centers.size(); ++n) {
        cost(static_cast<int>(r), static_cast<int>(n)) =
            std::hypot(c_tilde[0] - centers[n].position.x, c_tilde[1] - centers[n].position.y);
      }
    }
    const Assignment a = solve_assignment_lexicographic(cost);
    for (std::size_t r = 0; r < members.size(); ++r) {
      const int n = a.row_to_col[r];
      const Peak& kp = keypoints[members[r]];
      if (n < 0 || cost(static_cast<int>(r), n) > gate_radius) {
        result.orphans.push_back(kp);
        continue;
      }
      PersonDetection& det = result.persons[static_cast<std::size_t>(n)];
      det.roots_2d[static_cast<std::size_t>(j)] = kp;
      det.visibility[static_cast<std::size_t>(j)] = true;
    }
  }
  if (!result.orphans.empty()) {
    result.diagnostics.push_back(std::to_string(result.orphans.size()) + " keypoints not matched to a center");
  }
  return result;
}

GroupingResult recover_orphans(const std::vector<Peak>& orphans, const TensorMap& scale, int joint_count,
                               double gate_radius, int first_id) {
  GroupingResult result;
  std::vector<Peak> pending = orphans;
  int next_id = first_id;
  for (int round = 0; round <= joint_count && !pending.empty(); ++round) {
    std::vector<std::size_t> order(pending.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return pending[a].confidence > pending[b].confidence;
    });
    const auto regressed = regress_centers(pending, scale);

    struct Cluster {
      double sx = 0, sy = 0;
      int count = 0;
      double cx() const { return sx / count; }
      double cy() const { return sy / count; }
    };
    std::vector<Cluster> clusters;
    for (std::size_t idx : order) {
      const auto& c = regressed[idx];
      int best = -1;
      double best_d = gate_radius;
      for (std::size_t k = 0; k < clusters.size(); ++k) {
        const double d = std::hypot(c[0] - clusters[k].cx(), c[1] - clusters[k].cy());
        if (d <= best_d) {
          best_d = d;
          best = static_cast<int>(k);
        }
      }
      if (best < 0) {
        clusters.push_back({c[0], c[1], 1});
      } else {
        clusters[static_cast<std::size_t>(best)].sx += c[0];
        clusters[static_cast<std::size_t>(best)].sy += c[1];
        clusters[static_cast<std::size_t>(best)].count += 1;
      }
    }

    std::vector<Peak> virtual_centers;
    for (const Cluster& cl : clusters) {
      const int x = std::clamp(static_cast<int>(std::lround(cl.cx())), 0, scale.width() - 1);
      const int y = std::clamp(static_cast<int>(std::lround(cl.cy())), 0, scale.height() - 1);
      virtual_centers.push_back(Peak{joint_count, {x, y}, 0.0});
    }
    GroupingResult pass = assign_keypoints(pending, virtual_centers, scale, joint_count, gate_radius);
    for (PersonDetection& det : pass.persons) {
      if (det.detected_count() == 0) continue;
      det.anchor = det.center->position;
      det.center.reset();
      det.id = next_id++;
      result.persons.push_back(std::move(det));
    }
    if (pass.orphans.size() == pending.size()) break;
    pending = std::move(pass.orphans);
  }
  result.orphans = pending;
  if (!pending.empty()) {
    result.diagnostics.push_back(std::to_string(pending.size()) + " orphan keypoints could not be grouped");
  }
  return result;
}

std::vector<PersonDetection> lift_roots_3d(std::vector<PersonDetection> dets, const TensorMap& depth,
                                           bool apply_delta) {
  for (PersonDetection& det : dets) {
    if (depth.channels() != det.joint_count()) throw ShapeError("lift_roots_3d: depth map must have K channels");
    for (int j = 0; j < det.joint_count(); ++j) {
      const auto& root = det.roots_2d[static_cast<std::size_t>(j)];
      if (!root) {
        det.roots_3d[static_cast<std::size_t>(j)].reset();
        continue;
      }
      const double raw = sample_at(depth, root->position, {j, j + 1})[0];
      const double z = apply_delta ? delta_transform(raw) : raw;
      det.roots_3d[static_cast<std::size_t>(j)] =
          Point3{static_cast<double>(root->position.x), static_cast<double>(root->position.y), z};
    }
  }
  return dets;
}

GroupingResult detect_persons(const DataMapSet& maps, const DecodeOptions& options) {
  maps.validate();
  const int k = maps.joint_count;
  const auto peaks = extract_peaks(maps.heat, options.threshold);
  std::vector<Peak> centers;
  for (const Peak& p : peaks)
    if (p.joint_index == k) centers.push_back(p);

  GroupingResult result = assign_keypoints(peaks, centers, maps.scale, k, options.gate_radius);
  if (options.recover_orphans && !result.orphans.empty()) {
    GroupingResult extra = recover_orphans(result.orphans, maps.scale, k, options.gate_radius,
                                           static_cast<int>(result.persons.size()));
    for (auto& p : extra.persons) result.persons.push_back(std::move(p));
    result.orphans = std::move(extra.orphans);
    for (auto& d : extra.diagnostics) result.diagnostics.push_back(std::move(d));
  }
  result.persons = lift_roots_3d(std::move(result.persons), maps.depth, options.apply_delta);
  return result;
}

std::string format_detections(const std::vector<PersonDetection>& dets, int joint_count) {
  std::ostringstream out;
  out << "# grm3d detections v1\n";
  out << "joint_count: " << joint_count << "\n";
  out << "persons: " << dets.size() << "\n";
  for (const PersonDetection& d : dets) {
    out << "person " << d.id << " center " << d.anchor.x << ' ' << d.anchor.y << ' '
        << text::fmt(d.center ? d.center->confidence : 0.0) << ' ' << (d.center ? "detected" : "virtual")
        << "\n";
    for (int j = 0; j < d.joint_count(); ++j) {
      const auto& r2 = d.roots_2d[static_cast<std::size_t>(j)];
      const auto& r3 = d.roots_3d[static_cast<std::size_t>(j)];
      if (!r2) {
        out << "joint " << j << " 0 0 0 0 0\n";
        continue;
      }
      out << "joint " << j << ' ' << r2->position.x << ' ' << r2->position.y << ' '
          << text::fmt(r3 ? r3->z : 0.0) << ' ' << text::fmt(r2->confidence) << " 1\n";
    }
  }
  return out.str();
}

std::vector<PersonDetection> parse_detections(const std::string& doc) {
  text::LineReader r(doc);
  auto one = [&](std::string_view key) {
    auto t = text::split_ws(r.expect_key(key));
    if (t.size() != 1) r.fail(std::string(key) + " takes one integer");
    return static_cast<int>(text::parse_int(t[0], r));
  };
  const int k = one("joint_count");
  const int n = one("persons");
  if (k <= 0 || n < 0) r.fail("invalid header counts");
  std::vector<PersonDetection> dets;
  for (int p = 0; p < n; ++p) {
    if (!r.next()) r.fail("missing person record");
    auto t = r.tokens();
    if (t.size() != 7 || t[0] != "person" || t[2] != "center") r.fail("malformed person record");
    PersonDetection d(k, static_cast<int>(text::parse_int(t[1], r)));
    d.anchor = {static_cast<int>(text::parse_int(t[3], r)), static_cast<int>(text::parse_int(t[4], r))};
    if (t[6] == "detected") {
      d.center = Peak{k, d.anchor, text::parse_double(t[5], r)};
    } else if (t[6] != "virtual") {
      r.fail("center must be detected or virtual");
    }
    for (int j = 0; j < k; ++j) {
      if (!r.next()) r.fail("missing joint record");
      auto jt = r.tokens();
      if (jt.size() != 7 || jt[0] != "joint" || text::parse_int(jt[1], r) != j) r.fail("malformed joint record");
      if (text::parse_int(jt[6], r) == 0) continue;
      const Pixel px{static_cast<int>(text::parse_int(jt[2], r)), static_cast<int>(text::parse_int(jt[3], r))};
      d.roots_2d[static_cast<std::size_t>(j)] = Peak{j, px, text::parse_double(jt[5], r)};
      d.roots_3d[static_cast<std::size_t>(j)] = Point3{static_cast<double>(px.x), static_cast<double>(px.y),
                                                       text::parse_double(jt[4], r)};
      d.visibility[static_cast<std::size_t>(j)] = true;
    }
    dets.push_back(std::move(d));
  }
  if (r.next()) r.fail("unexpected trailing content");
  return dets;
}

}  // namespace grm3d
