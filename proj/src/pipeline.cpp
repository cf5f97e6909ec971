#include "grm3d/pipeline.hpp"

#include <sstream>

#include "grm3d/baselines.hpp"
#include "grm3d/errors.hpp"
#include "grm3d/tensor_io.hpp"
#include "grm3d/text_io.hpp"

namespace grm3d {

GraphMode parse_graph_mode(const std::string& name) {
  if (name == "star") return GraphMode::star;
  if (name == "tree") return GraphMode::tree;
  if (name == "dgr") return GraphMode::dgr;
  throw PreconditionError("unknown graph mode '" + name + "' (expected star, tree or dgr)");
}

std::string to_string(GraphMode mode) {
  switch (mode) {
    case GraphMode::star:
      return "star";
    case GraphMode::tree:
      return "tree";
    case GraphMode::dgr:
      return "dgr";
  }
  return "dgr";
}

ImageDecode decode_image(const DataMapSet& maps, const SkeletonConfig& skeleton, GraphMode mode,
                         const PipelineOptions& options) {
  if (skeleton.joint_count != maps.joint_count) throw ShapeError("decode: skeleton and maps disagree on K");
  ImageDecode out;
  out.detections = detect_persons(maps, options.detect);
  for (const PersonDetection& person : out.detections.persons) {
    try {
      switch (mode) {
        case GraphMode::star:
          out.poses.push_back(decode_star(person, maps.offset3d, maps.depth, skeleton, options.detect.apply_delta));
          break;
        case GraphMode::tree:
          out.poses.push_back(decode_tree(person, maps.offset3d, skeleton));
          break;
        case GraphMode::dgr:
          out.poses.push_back(decode_pose_dgr(build_decoding_graph(person, maps, skeleton, options.dgr)));
          break;
      }
    } catch (const DecodeError& e) {
      out.failures.push_back({person.id, e.what()});
    }
  }
  return out;
}

std::string format_poses(const ImageDecode& result, int k) {
  std::ostringstream out;
  out << "# grm3d poses v1\n";
  out << "joint_count: " << k << "\n";
  out << "poses: " << result.poses.size() << "\n";
  out << "failures: " << result.failures.size() << "\n";
  for (const Pose3D& p : result.poses) {
    out << "pose " << p.person_id << "\n";
    for (int j = 0; j < k; ++j) {
      const Point3& q = p.joints[static_cast<std::size_t>(j)];
      out << j << ' ' << text::fmt(q.x) << ' ' << text::fmt(q.y) << ' ' << text::fmt(q.z) << ' '
          << (p.valid[static_cast<std::size_t>(j)] ? 1 : 0) << "\n";
    }
  }
  for (const DecodeFailure& f : result.failures) {
    std::string msg = f.message;
    for (char& ch : msg)
      if (ch == '\n') ch = ' ';
    out << "failure " << f.person_id << ' ' << msg << "\n";
  }
  return out.str();
}

PoseFile parse_poses(const std::string& content) {
  text::LineReader in(content);
  const int k = text::parse_int(in.expect_key("joint_count"), in);
  const int n = text::parse_int(in.expect_key("poses"), in);
  const int f = text::parse_int(in.expect_key("failures"), in);
  if (k <= 0 || n < 0 || f < 0) in.fail("counts must be non-negative and K positive");
  PoseFile out;
  for (int p = 0; p < n; ++p) {
    if (!in.next()) in.fail("unexpected end of file");
    auto t = in.tokens();
    if (t.size() != 2 || t[0] != "pose") in.fail("expected 'pose <id>'");
    Pose3D pose(k, text::parse_int(t[1], in));
    for (int j = 0; j < k; ++j) {
      if (!in.next()) in.fail("unexpected end of file");
      t = in.tokens();
      if (t.size() != 5 || text::parse_int(t[0], in) != j) in.fail("expected 'j x y z valid'");
      pose.joints[static_cast<std::size_t>(j)] =
          Point3{text::parse_double(t[1], in), text::parse_double(t[2], in), text::parse_double(t[3], in)};
      const int v = text::parse_int(t[4], in);
      if (v != 0 && v != 1) in.fail("valid flag must be 0 or 1");
      pose.valid[static_cast<std::size_t>(j)] = v == 1;
    }
    out.poses.push_back(std::move(pose));
  }
  for (int i = 0; i < f; ++i) {
    if (!in.next()) in.fail("unexpected end of file");
    const auto t = in.tokens();
    if (t.size() < 2 || t[0] != "failure") in.fail("expected 'failure <id> <message>'");
    DecodeFailure fail{static_cast<int>(text::parse_int(t[1], in)), {}};
    const std::string_view line = in.line();
    const auto pos = line.find(t[1]) + t[1].size();
    if (pos < line.size()) fail.message = std::string(line.substr(pos + 1));
    out.failures.push_back(std::move(fail));
  }
  if (in.next()) in.fail("trailing content");
  return out;
}

PoseFile load_poses(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return parse_poses(std::string(bytes.begin(), bytes.end()));
}

void write_map_dir(const std::filesystem::path& dir, const DataMapSet& maps) {
  maps.validate();
  std::filesystem::create_directories(dir);
  write_gmap(dir / "heat.gmap", maps.heat);
  write_gmap(dir / "scale.gmap", maps.scale);
  write_gmap(dir / "depth.gmap", maps.depth);
  write_gmap(dir / "offset3d.gmap", maps.offset3d);
  if (maps.feature) write_gmap(dir / "feature.gmap", *maps.feature);
}

DataMapSet read_map_dir(const std::filesystem::path& dir) {
  DataMapSet maps;
  maps.heat = read_gmap(dir / "heat.gmap");
  maps.scale = read_gmap(dir / "scale.gmap");
  maps.depth = read_gmap(dir / "depth.gmap");
  maps.offset3d = read_gmap(dir / "offset3d.gmap");
  if (std::filesystem::exists(dir / "feature.gmap")) maps.feature = read_gmap(dir / "feature.gmap");
  maps.joint_count = maps.depth.channels();
  maps.validate();
  return maps;
}

}  // namespace grm3d
