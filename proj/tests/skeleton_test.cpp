#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "grm3d/errors.hpp"
#include "grm3d/skeleton.hpp"

using namespace grm3d;

TEST_SUITE("skeleton") {

TEST_CASE("default skeleton is valid") {
  const SkeletonConfig s = default_skeleton();
  CHECK_NOTHROW(s.validate());
  CHECK(s.joint_count == 15);
  CHECK(s.joint_names[static_cast<std::size_t>(s.head_top_index)] == "head_top");
  CHECK(s.joint_names[static_cast<std::size_t>(s.mid_hip_index)] == "pelvis");
  CHECK(s.tree_root() == s.mid_hip_index);
  CHECK(s.prior(s.head_top_index, s.mid_hip_index) == 750.0);
  CHECK(s.prior_ratio(s.head_top_index, s.mid_hip_index) == 1.0);
}

TEST_CASE("bone prior is symmetric with zero diagonal") {
  const SkeletonConfig s = default_skeleton();
  for (int i = 0; i < s.joint_count; ++i) {
    CHECK(s.prior(i, i) == 0.0);
    for (int j = 0; j < s.joint_count; ++j) CHECK(s.prior(i, j) == s.prior(j, i));
  }
}

TEST_CASE("pairwise distances by hand") {
  const RestPose p{{{0, 0, 0}, {3, 4, 0}, {0, 0, 12}}};
  const auto d = pairwise_distances(p);
  CHECK(d[1] == 5.0);
  CHECK(d[3] == 5.0);
  CHECK(d[2] == 12.0);
  CHECK(d[1 * 3 + 2] == doctest::Approx(13.0));
}

TEST_CASE("tree order visits parents before children") {
  const SkeletonConfig s = default_skeleton();
  const auto order = s.tree_order();
  CHECK(order.size() == static_cast<std::size_t>(s.joint_count));
  std::vector<int> pos(static_cast<std::size_t>(s.joint_count), -1);
  for (std::size_t i = 0; i < order.size(); ++i) pos[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
  for (int j = 0; j < s.joint_count; ++j) {
    const int p = s.tree_parents[static_cast<std::size_t>(j)];
    if (p != kNoParent) CHECK(pos[static_cast<std::size_t>(p)] < pos[static_cast<std::size_t>(j)]);
  }
}

TEST_CASE("validation catches broken configs") {
  SkeletonConfig s = default_skeleton();
  s.bone_prior[1] += 1.0;
  CHECK_THROWS_AS(s.validate(), PreconditionError);

  s = default_skeleton();
  s.tree_parents[14] = 0;  // cycle, no root
  CHECK_THROWS_AS(s.validate(), PreconditionError);

  s = default_skeleton();
  s.tree_parents[3] = kNoParent;  // two roots
  CHECK_THROWS_AS(s.validate(), PreconditionError);

  s = default_skeleton();
  s.center_definition = {8, 8};
  CHECK_THROWS_AS(s.validate(), PreconditionError);

  s = default_skeleton();
  s.mid_hip_index = s.head_top_index;
  CHECK_THROWS_AS(s.validate(), PreconditionError);
}

TEST_CASE("text format round trip") {
  const SkeletonConfig s = default_skeleton();
  const std::string text = format_skeleton(s);
  CHECK(text.rfind("# grm3d skeleton v1\n", 0) == 0);
  const SkeletonConfig r = parse_skeleton(text);
  CHECK(r == s);
  CHECK(format_skeleton(r) == text);
}

TEST_CASE("small custom skeleton parses") {
  const std::string text =
      "joint_count: 3\n"
      "joint_names: top hipl hipr\n"
      "head_top_index: 0\n"
      "mid_hip_index: 1\n"
      "center_definition: 1 2\n"
      "tree_parents: 1 -1 1\n"
      "bone_prior:\n"
      "0 10 12\n"
      "10 0 4   # comment\n"
      "12 4 0\n";
  const SkeletonConfig s = parse_skeleton(text);
  CHECK(s.joint_count == 3);
  CHECK(s.prior(0, 2) == 12.0);
  CHECK(s.prior_ratio(0, 2) == doctest::Approx(1.2));
}

TEST_CASE("malformed documents report a format error") {
  const SkeletonConfig s = default_skeleton();
  std::string text = format_skeleton(s);
  CHECK_THROWS_AS(parse_skeleton(text.substr(0, text.size() / 2)), FormatError);
  std::string bad = text;
  bad.replace(bad.find("joint_count: 15"), 15, "joint_count: x5");
  CHECK_THROWS_AS(parse_skeleton(bad), FormatError);
  CHECK_THROWS_AS(parse_skeleton(text + "extra line\n"), FormatError);
  CHECK_THROWS_AS(parse_skeleton(""), FormatError);
}

}  // TEST_SUITE
