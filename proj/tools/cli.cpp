#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <optional>
#include <sstream>

#include "grm3d/errors.hpp"
#include "grm3d/loss.hpp"
#include "grm3d/metrics.hpp"
#include "grm3d/pipeline.hpp"
#include "grm3d/sdar.hpp"
#include "grm3d/synth.hpp"
#include "grm3d/tensor_io.hpp"

namespace fs = std::filesystem;

namespace grm3d::cli {
namespace {

struct Size {
  int height = 128;
  int width = 128;
};

std::optional<Size> parse_size(const std::string& s) {
  const auto x = s.find('x');
  if (x == std::string::npos) return std::nullopt;
  try {
    std::size_t a = 0, b = 0;
    const int h = std::stoi(s.substr(0, x), &a);
    const int w = std::stoi(s.substr(x + 1), &b);
    if (a != x || b != s.size() - x - 1 || h < 32 || w < 32) return std::nullopt;
    return Size{h, w};
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

// Arguments that are usage mistakes but only detectable after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string skeleton_path;
  double threshold = 0.5;
  std::string graph = "dgr";
  double mm_per_unit = 30.0;

  SkeletonConfig skeleton() const { return skeleton_path.empty() ? default_skeleton() : load_skeleton(skeleton_path); }
  PipelineOptions pipeline() const {
    PipelineOptions po;
    po.detect.threshold = threshold;
    po.dgr.prior_mm_per_unit = mm_per_unit;
    return po;
  }
};

struct SynthArgs {
  std::uint64_t seed = 0;
  int persons = 1;
  std::string size = "128x128";
  double occlusion = 0.0;
  double crowding = 0.0;
  bool suppress_centers = false;
  int feature_channels = 0;
  std::string out;
};

const auto kOpenUnit = CLI::Validator(
    [](std::string& v) -> std::string {
      try {
        const double t = std::stod(v);
        if (t > 0.0 && t < 1.0) return {};
      } catch (const std::exception&) {
      }
      return "must be a number strictly between 0 and 1";
    },
    "(0,1)");

const auto kGraph = CLI::IsMember({"star", "tree", "dgr"});

void add_common(CLI::App* cmd, Common& c, bool decoding) {
  cmd->add_option("--skeleton", c.skeleton_path, "skeleton config file (default: built-in 15-joint)")
      ->check(CLI::ExistingFile);
  if (!decoding) return;
  cmd->add_option("--threshold", c.threshold, "peak detection threshold")->check(kOpenUnit);
  cmd->add_option("--graph", c.graph, "decoder: star, tree or dgr")->check(kGraph);
}

void add_synth(CLI::App* cmd, SynthArgs& s) {
  cmd->add_option("--seed", s.seed, "scene seed");
  cmd->add_option("--persons", s.persons, "number of persons")->check(CLI::Range(1, 64));
  cmd->add_option("--size", s.size, "image size HxW");
  cmd->add_option("--occlusion", s.occlusion, "per-joint occlusion probability")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--crowding", s.crowding, "0 spreads persons out, 1 packs them")->check(CLI::Range(0.0, 1.0));
  cmd->add_flag("--suppress-centers", s.suppress_centers, "suppress body-center peaks");
}

struct Synthesized {
  Scene scene;
  DataMapSet maps;
};

Synthesized synthesize(const SynthArgs& a, const SkeletonConfig& skeleton) {
  const auto size = parse_size(a.size);
  if (!size) throw UsageError("--size must look like HxW with both sides >= 32, got '" + a.size + "'");
  SceneParams sp;
  sp.persons = a.persons;
  sp.height = size->height;
  sp.width = size->width;
  sp.seed = a.seed;
  sp.crowding = a.crowding;
  Synthesized s;
  s.scene = generate_scene(skeleton, sp);
  s.maps = render_maps(s.scene, skeleton);
  if (a.occlusion > 0.0 || a.suppress_centers) {
    CorruptionParams cp;
    cp.occlusion_prob = a.occlusion;
    cp.seed = a.seed ^ 0x5bd1e995ULL;
    cp.suppress_centers = a.suppress_centers;
    s.maps = corrupt_maps(s.maps, s.scene, skeleton, cp).maps;
  }
  if (a.feature_channels > 0)
    s.maps.feature = synthetic_feature(a.feature_channels, s.scene.height, s.scene.width, a.seed);
  return s;
}

std::string make_report(const PoseFile& poses, const Scene& scene, const SkeletonConfig& skeleton) {
  if (scene.joint_count() != skeleton.joint_count) throw ShapeError("scene and skeleton disagree on K");
  std::vector<Pose3D> pred, gt;
  for (const Pose3D& p : poses.poses) {
    if (p.joint_count() != skeleton.joint_count) throw ShapeError("poses and skeleton disagree on K");
    pred.push_back(to_metric(p, scene.mm_per_unit));
  }
  for (const Pose3D& g : scene_poses(scene)) gt.push_back(to_metric(g, scene.mm_per_unit));
  EvalOptions eo;
  eo.root_index = skeleton.mid_hip_index;
  MetricReport r = evaluate(pred, gt, eo);
  r.decode_failures = static_cast<int>(poses.failures.size());
  return format_report(r, skeleton.joint_names);
}

void require_dir(const fs::path& p) {
  if (!fs::is_directory(p)) throw Error("input directory not found: " + p.string());
}

void require_file(const fs::path& p) {
  if (!fs::is_regular_file(p)) throw Error("file not found: " + p.string());
}

double pck_rel_of(const std::string& report) {
  std::istringstream in(report);
  std::string key;
  double v = 0.0;
  in >> key >> v;
  return v;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-person 3D pose decoding from dense prediction maps", "grm3d"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "grm3d 1.0");

  Common common;
  SynthArgs synth;
  std::string in_dir, out_dir, weights = "identity", poses_path, scene_path, report_path;
  double min_pck = 0.0;

  auto* c_synth = app.add_subcommand("synth", "generate a scene and its ground-truth maps");
  add_common(c_synth, common, false);
  add_synth(c_synth, synth);
  c_synth->add_option("--feature-channels", synth.feature_channels, "also write a random feature map")
      ->check(CLI::Range(0, 4096));
  c_synth->add_option("--out", synth.out, "output directory")->required();

  auto* c_refine = app.add_subcommand("refine", "apply refinement weights to a map directory");
  add_common(c_refine, common, false);
  c_refine->add_option("--in", in_dir, "map directory (needs feature.gmap)")->required();
  c_refine->add_option("--weights", weights, "weights bundle path, or 'identity'");
  c_refine->add_option("--out", out_dir, "output directory")->required();

  auto* c_decode = app.add_subcommand("decode", "detect and decode persons from a map directory");
  add_common(c_decode, common, true);
  c_decode->add_option("--in", in_dir, "map directory")->required();
  c_decode->add_option("--out", out_dir, "output directory (default: the input directory)");
  c_decode->add_option("--mm-per-unit", common.mm_per_unit, "millimetres per map unit")
      ->check(CLI::PositiveNumber);

  auto* c_eval = app.add_subcommand("eval", "score decoded poses against a scene");
  add_common(c_eval, common, false);
  c_eval->add_option("--poses", poses_path, "poses.txt from decode")->required();
  c_eval->add_option("--scene", scene_path, "scene.txt from synth")->required();
  c_eval->add_option("--out", report_path, "also write the report to this file");
  c_eval->add_option("--min-pck", min_pck, "exit 1 when pck_rel falls below this")->check(CLI::Range(0.0, 100.0));

  auto* c_round = app.add_subcommand("roundtrip", "synth, decode and eval in one step");
  add_common(c_round, common, true);
  add_synth(c_round, synth);
  c_round->add_option("--out", synth.out, "output directory")->required();
  c_round->add_option("--min-pck", min_pck, "exit 1 when pck_rel falls below this")->check(CLI::Range(0.0, 100.0));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    const SkeletonConfig skeleton = common.skeleton();

    if (c_synth->parsed()) {
      const Synthesized s = synthesize(synth, skeleton);
      const fs::path dir = synth.out;
      write_map_dir(dir, s.maps);
      write_text_atomic(dir / "scene.txt", format_scene(s.scene));
      out << "wrote " << dir.string() << " (" << s.scene.persons.size() << " persons)\n";
    } else if (c_refine->parsed()) {
      require_dir(in_dir);
      if (weights != "identity") require_file(weights);
      const DataMapSet maps = read_map_dir(in_dir);
      if (!maps.feature) throw Error("refine needs " + (fs::path(in_dir) / "feature.gmap").string());
      const SdarWeights w = weights == "identity" ? SdarWeights::zeros(maps.joint_count, maps.feature->channels())
                                                  : load_sdar_weights(weights);
      DataMapSet refined = sdar_apply(maps, w);
      write_map_dir(out_dir, refined);
      if (fs::path(in_dir) != fs::path(out_dir) && fs::exists(fs::path(in_dir) / "scene.txt")) {
        const auto bytes = read_file_bytes(fs::path(in_dir) / "scene.txt");
        write_file_atomic(fs::path(out_dir) / "scene.txt", bytes);
      }
      out << "wrote " << out_dir << "\n";
    } else if (c_decode->parsed()) {
      require_dir(in_dir);
      const fs::path dst = out_dir.empty() ? fs::path(in_dir) : fs::path(out_dir);
      const DataMapSet maps = read_map_dir(in_dir);
      const ImageDecode r = decode_image(maps, skeleton, parse_graph_mode(common.graph), common.pipeline());
      fs::create_directories(dst);
      write_text_atomic(dst / "detections.txt", format_detections(r.detections.persons, maps.joint_count));
      write_text_atomic(dst / "poses.txt", format_poses(r, maps.joint_count));
      out << "persons: " << r.detections.persons.size() << "\n";
      out << "decoded: " << r.poses.size() << "\n";
      out << "failures: " << r.failures.size() << "\n";
      for (const DecodeFailure& f : r.failures) out << "failure " << f.person_id << ": " << f.message << "\n";
    } else if (c_eval->parsed()) {
      require_file(poses_path);
      require_file(scene_path);
      const std::string report = make_report(load_poses(poses_path), load_scene(scene_path), skeleton);
      if (!report_path.empty()) write_text_atomic(report_path, report);
      out << report;
      if (pck_rel_of(report) < min_pck) {
        err << "pck_rel below --min-pck " << min_pck << "\n";
        return kOperational;
      }
    } else if (c_round->parsed()) {
      const Synthesized s = synthesize(synth, skeleton);
      const fs::path dir = synth.out;
      write_map_dir(dir, s.maps);
      write_text_atomic(dir / "scene.txt", format_scene(s.scene));
      Common c = common;
      c.mm_per_unit = s.scene.mm_per_unit;
      const ImageDecode r = decode_image(s.maps, skeleton, parse_graph_mode(c.graph), c.pipeline());
      write_text_atomic(dir / "detections.txt", format_detections(r.detections.persons, s.maps.joint_count));
      const std::string poses = format_poses(r, s.maps.joint_count);
      write_text_atomic(dir / "poses.txt", poses);
      // Score what was written so the report reflects the files on disk.
      const std::string report = make_report(parse_poses(poses), s.scene, skeleton);
      write_text_atomic(dir / "report.txt", report);
      out << report;
      if (pck_rel_of(report) < min_pck) {
        err << "pck_rel below --min-pck " << min_pck << "\n";
        return kOperational;
      }
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kOperational;
  }
  return kOk;
}

}  // namespace grm3d::cli
