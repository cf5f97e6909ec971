#include "grm3d/skeleton.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "grm3d/errors.hpp"
#include "grm3d/text_io.hpp"

namespace grm3d {

int SkeletonConfig::tree_root() const {
  for (int j = 0; j < joint_count; ++j)
    if (tree_parents[static_cast<std::size_t>(j)] == kNoParent) return j;
  throw PreconditionError("skeleton tree has no root");
}

std::vector<std::vector<int>> SkeletonConfig::tree_children() const {
  std::vector<std::vector<int>> children(static_cast<std::size_t>(joint_count));
  for (int j = 0; j < joint_count; ++j) {
    const int p = tree_parents[static_cast<std::size_t>(j)];
    if (p != kNoParent) children[static_cast<std::size_t>(p)].push_back(j);
  }
  return children;
}

std::vector<int> SkeletonConfig::tree_order() const {
  const auto children = tree_children();
  std::vector<int> order{tree_root()};
  for (std::size_t i = 0; i < order.size(); ++i)
    for (int c : children[static_cast<std::size_t>(order[i])]) order.push_back(c);
  return order;
}

void SkeletonConfig::validate() const {
  const int k = joint_count;
  if (k <= 0) throw PreconditionError("joint_count must be positive");
  if (joint_names.size() != static_cast<std::size_t>(k))
    throw PreconditionError("joint_names must list joint_count names");
  if (bone_prior.size() != static_cast<std::size_t>(k) * k)
    throw PreconditionError("bone_prior must be joint_count x joint_count");
  if (tree_parents.size() != static_cast<std::size_t>(k))
    throw PreconditionError("tree_parents must list joint_count parents");
  auto in_range = [k](int i) { return i >= 0 && i < k; };
  if (!in_range(head_top_index) || !in_range(mid_hip_index))
    throw PreconditionError("head_top_index / mid_hip_index out of range");
  if (!in_range(center_definition.first) || !in_range(center_definition.second) ||
      center_definition.first == center_definition.second)
    throw PreconditionError("center_definition must name two distinct joints");
  for (int i = 0; i < k; ++i) {
    if (prior(i, i) != 0.0) throw PreconditionError("bone_prior diagonal must be zero");
    for (int j = 0; j < k; ++j) {
      if (!std::isfinite(prior(i, j)) || prior(i, j) < 0.0)
        throw PreconditionError("bone_prior entries must be finite and non-negative");
      if (prior(i, j) != prior(j, i)) throw PreconditionError("bone_prior must be symmetric");
    }
  }
  if (!(prior(head_top_index, mid_hip_index) > 0.0))
    throw PreconditionError("sigma(head_top, mid_hip) must be positive");
  int roots = 0;
  for (int j = 0; j < k; ++j) {
    const int p = tree_parents[static_cast<std::size_t>(j)];
    if (p == kNoParent) {
      ++roots;
    } else if (!in_range(p) || p == j) {
      throw PreconditionError("tree_parents entry " + std::to_string(j) + " is invalid");
    }
  }
  if (roots != 1) throw PreconditionError("tree_parents must have exactly one root");
  if (tree_order().size() != static_cast<std::size_t>(k))
    throw PreconditionError("tree_parents contains a cycle");
}

RestPose default_rest_pose() {
  return RestPose{{
      {0, -750, 0},     // head_top
      {0, -500, 0},     // neck
      {-170, -480, 0},  // r_shoulder
      {-200, -190, 0},  // r_elbow
      {-215, 60, 0},    // r_wrist
      {170, -480, 0},   // l_shoulder
      {200, -190, 0},   // l_elbow
      {215, 60, 0},     // l_wrist
      {-100, 0, 0},     // r_hip
      {-105, 430, 0},   // r_knee
      {-110, 850, 0},   // r_ankle
      {100, 0, 0},      // l_hip
      {105, 430, 0},    // l_knee
      {110, 850, 0},    // l_ankle
      {0, 0, 0},        // pelvis
  }};
}

std::vector<double> pairwise_distances(const RestPose& pose) {
  const std::size_t k = pose.joints.size();
  std::vector<double> d(k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      const auto& a = pose.joints[i];
      const auto& b = pose.joints[j];
      d[i * k + j] = std::hypot(a[0] - b[0], a[1] - b[1], a[2] - b[2]);
    }
  return d;
}

SkeletonConfig default_skeleton() {
  SkeletonConfig s;
  s.joint_count = 15;
  s.joint_names = {"head_top", "neck",  "r_shoulder", "r_elbow", "r_wrist",
                   "l_shoulder", "l_elbow", "l_wrist", "r_hip",   "r_knee",
                   "r_ankle",  "l_hip", "l_knee",     "l_ankle", "pelvis"};
  s.bone_prior = pairwise_distances(default_rest_pose());
  s.head_top_index = 0;
  s.mid_hip_index = 14;
  s.tree_parents = {1, 14, 1, 2, 3, 1, 5, 6, 14, 8, 9, 14, 11, 12, kNoParent};
  s.center_definition = {11, 8};
  return s;
}

std::string format_skeleton(const SkeletonConfig& s) {
  std::ostringstream out;
  out << "# grm3d skeleton v1\n";
  out << "joint_count: " << s.joint_count << "\n";
  out << "joint_names:";
  for (const auto& n : s.joint_names) out << ' ' << n;
  out << "\nhead_top_index: " << s.head_top_index << "\n";
  out << "mid_hip_index: " << s.mid_hip_index << "\n";
  out << "center_definition: " << s.center_definition.first << ' ' << s.center_definition.second
      << "\n";
  out << "tree_parents:";
  for (int p : s.tree_parents) out << ' ' << p;
  out << "\nbone_prior:\n";
  for (int i = 0; i < s.joint_count; ++i) {
    for (int j = 0; j < s.joint_count; ++j) out << (j ? " " : "") << text::fmt(s.prior(i, j));
    out << "\n";
  }
  return out.str();
}

SkeletonConfig parse_skeleton(const std::string& doc) {
  text::LineReader r(doc);
  SkeletonConfig s;
  auto single_int = [&](std::string_view key) {
    auto toks = text::split_ws(r.expect_key(key));
    if (toks.size() != 1) r.fail(std::string(key) + " takes one integer");
    return static_cast<int>(text::parse_int(toks[0], r));
  };
  s.joint_count = single_int("joint_count");
  if (s.joint_count <= 0 || s.joint_count > 1024) r.fail("joint_count out of range");
  const auto k = static_cast<std::size_t>(s.joint_count);

  for (auto t : text::split_ws(r.expect_key("joint_names"))) s.joint_names.emplace_back(t);
  if (s.joint_names.size() != k) r.fail("joint_names must list joint_count names");
  s.head_top_index = single_int("head_top_index");
  s.mid_hip_index = single_int("mid_hip_index");
  {
    auto toks = text::split_ws(r.expect_key("center_definition"));
    if (toks.size() != 2) r.fail("center_definition takes two joint indices");
    s.center_definition = {static_cast<int>(text::parse_int(toks[0], r)),
                           static_cast<int>(text::parse_int(toks[1], r))};
  }
  for (auto t : text::split_ws(r.expect_key("tree_parents")))
    s.tree_parents.push_back(static_cast<int>(text::parse_int(t, r)));
  if (s.tree_parents.size() != k) r.fail("tree_parents must list joint_count parents");
  if (!text::split_ws(r.expect_key("bone_prior")).empty()) r.fail("bone_prior rows start on the next line");
  s.bone_prior.reserve(k * k);
  for (std::size_t i = 0; i < k; ++i) {
    if (!r.next()) r.fail("bone_prior has fewer than joint_count rows");
    auto toks = r.tokens();
    if (toks.size() != k) r.fail("bone_prior row " + std::to_string(i) + " needs joint_count values");
    for (auto t : toks) s.bone_prior.push_back(text::parse_double(t, r));
  }
  if (r.next()) r.fail("unexpected content after bone_prior");
  try {
    s.validate();
  } catch (const PreconditionError& e) {
    throw FormatError(std::string("invalid skeleton: ") + e.what(), 0);
  }
  return s;
}

SkeletonConfig load_skeleton(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_skeleton(ss.str());
}

}  // namespace grm3d
