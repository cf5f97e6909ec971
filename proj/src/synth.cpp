#include "grm3d/synth.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "grm3d/errors.hpp"
#include "grm3d/text_io.hpp"

namespace grm3d {
namespace {

using Vec3 = Eigen::Vector3d;
using Rng = std::mt19937_64;

constexpr double kDeg = std::numbers::pi / 180.0;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

Vec3 random_unit(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  for (;;) {
    Vec3 v(n(rng), n(rng), n(rng));
    if (v.norm() > 1e-9) return v.normalized();
  }
}

Eigen::Matrix3d random_rotation(Rng& rng, double max_angle) {
  const Vec3 axis = random_unit(rng);
  return Eigen::AngleAxisd(uniform(rng, 0.0, max_angle), axis).toRotationMatrix();
}

std::vector<int> tree_depths(const SkeletonConfig& s) {
  std::vector<int> depth(static_cast<std::size_t>(s.joint_count), 0);
  for (int j : s.tree_order()) {
    const int p = s.tree_parents[static_cast<std::size_t>(j)];
    if (p != kNoParent) depth[static_cast<std::size_t>(j)] = depth[static_cast<std::size_t>(p)] + 1;
  }
  return depth;
}

// Pose in person-local metric units (pixels), root at the origin.
std::vector<Vec3> sample_body(const SkeletonConfig& s, const SceneParams& params,
                              const std::optional<RestPose>& rest, Rng& rng) {
  const int k = s.joint_count;
  const int root = s.tree_root();
  const auto depth = tree_depths(s);
  const Eigen::Matrix3d global =
      Eigen::AngleAxisd(uniform(rng, -60.0, 60.0) * kDeg, Vec3::UnitY()).toRotationMatrix() *
      Eigen::AngleAxisd(uniform(rng, -10.0, 10.0) * kDeg, Vec3::UnitZ()).toRotationMatrix() *
      Eigen::AngleAxisd(uniform(rng, -10.0, 10.0) * kDeg, Vec3::UnitX()).toRotationMatrix();

  const auto [left_hip, right_hip] = s.center_definition;
  const bool symmetric_hips = s.tree_parents[static_cast<std::size_t>(left_hip)] == root &&
                              s.tree_parents[static_cast<std::size_t>(right_hip)] == root;
  const double hip_jitter = uniform(rng, -params.bone_jitter, params.bone_jitter);

  std::vector<Vec3> pos(static_cast<std::size_t>(k), Vec3::Zero());
  for (int j : s.tree_order()) {
    if (j == root) continue;
    const int p = s.tree_parents[static_cast<std::size_t>(j)];
    Vec3 dir;
    if (rest) {
      const auto& a = rest->joints[static_cast<std::size_t>(j)];
      const auto& b = rest->joints[static_cast<std::size_t>(p)];
      dir = Vec3(a[0] - b[0], a[1] - b[1], a[2] - b[2]);
      dir = dir.norm() > 1e-9 ? dir.normalized() : random_unit(rng);
    } else {
      dir = random_unit(rng);
    }
    const int d = depth[static_cast<std::size_t>(j)];
    const double max_angle = (d <= 1 ? 10.0 : d == 2 ? 30.0 : 50.0) * kDeg;
    double jitter = uniform(rng, -params.bone_jitter, params.bone_jitter);
    if (symmetric_hips && (j == left_hip || j == right_hip)) {
      jitter = hip_jitter;
    } else {
      dir = random_rotation(rng, max_angle) * dir;
    }
    const double length = s.prior(j, p) * (1.0 + jitter) / params.mm_per_unit;
    pos[static_cast<std::size_t>(j)] = pos[static_cast<std::size_t>(p)] + length * (global * dir);
  }
  if (symmetric_hips) {
    // Keep the root exactly at the hip midpoint.
    pos[static_cast<std::size_t>(right_hip)] = -pos[static_cast<std::size_t>(left_hip)];
  }
  return pos;
}

bool is_default_layout(const SkeletonConfig& s) {
  const SkeletonConfig d = default_skeleton();
  return s.joint_names == d.joint_names && s.tree_parents == d.tree_parents;
}

struct Source {
  int person = 0;
  double x = 0.0;
  double y = 0.0;
  double ref_depth = 0.0;
};

std::vector<Source> offset_sources(const Scene& scene, const SkeletonConfig& s) {
  std::vector<Source> sources;
  for (std::size_t p = 0; p < scene.persons.size(); ++p) {
    const ScenePerson& person = scene.persons[p];
    for (int j = 0; j < s.joint_count; ++j) {
      if (!person.visible[static_cast<std::size_t>(j)]) continue;
      const Point3& q = person.joints[static_cast<std::size_t>(j)];
      sources.push_back({static_cast<int>(p), q.x, q.y, q.z});
    }
    const Point3 c = body_center(person, s);
    sources.push_back({static_cast<int>(p), c.x, c.y,
                       person.joints[static_cast<std::size_t>(s.mid_hip_index)].z});
  }
  return sources;
}

Pixel round_pixel(double x, double y) {
  return Pixel{static_cast<int>(std::lround(x)), static_cast<int>(std::lround(y))};
}

template <typename Fn>
void for_disc(Pixel c, int radius, int width, int height, Fn&& fn) {
  for (int y = std::max(0, c.y - radius); y <= std::min(height - 1, c.y + radius); ++y)
    for (int x = std::max(0, c.x - radius); x <= std::min(width - 1, c.x + radius); ++x) {
      const int dx = x - c.x;
      const int dy = y - c.y;
      if (dx * dx + dy * dy <= radius * radius) fn(x, y);
    }
}

// Nearest source owns each pixel of the scale/depth/offset maps; on ties the
// earlier source wins. -1 marks unowned pixels.
std::vector<int> pixel_owners(const std::vector<Source>& sources, int h, int w, int radius) {
  std::vector<double> owner_dist(static_cast<std::size_t>(h) * w, std::numeric_limits<double>::infinity());
  std::vector<int> owner(static_cast<std::size_t>(h) * w, -1);
  for (std::size_t si = 0; si < sources.size(); ++si) {
    const Source& src = sources[si];
    for_disc(round_pixel(src.x, src.y), radius, w, h, [&](int x, int y) {
      const double d = std::hypot(x - src.x, y - src.y);
      const auto idx = static_cast<std::size_t>(y) * w + x;
      if (d < owner_dist[idx]) {
        owner_dist[idx] = d;
        owner[idx] = static_cast<int>(si);
      }
    });
  }
  return owner;
}

void paint_gaussian(TensorMap& heat, int channel, Pixel c, double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  for (int y = std::max(0, c.y - radius); y <= std::min(heat.height() - 1, c.y + radius); ++y)
    for (int x = std::max(0, c.x - radius); x <= std::min(heat.width() - 1, c.x + radius); ++x) {
      const double d2 = static_cast<double>((x - c.x) * (x - c.x) + (y - c.y) * (y - c.y));
      const float g = static_cast<float>(std::exp(-d2 / (2.0 * sigma * sigma)));
      float& v = heat.at(channel, y, x);
      v = std::max(v, g);
    }
}

void scale_gaussian(TensorMap& heat, int channel, Pixel c, double sigma, double factor) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  for (int y = std::max(0, c.y - radius); y <= std::min(heat.height() - 1, c.y + radius); ++y)
    for (int x = std::max(0, c.x - radius); x <= std::min(heat.width() - 1, c.x + radius); ++x)
      heat.at(channel, y, x) = static_cast<float>(heat.at(channel, y, x) * factor);
}

}  // namespace

void RenderParams::validate() const {
  if (!(gaussian_sigma > 0.0)) throw PreconditionError("gaussian_sigma must be positive");
  if (offset_radius < 1) throw PreconditionError("offset_radius must be at least 1");
}

Point3 body_center(const ScenePerson& person, const SkeletonConfig& s) {
  const Point3& a = person.joints[static_cast<std::size_t>(s.center_definition.first)];
  const Point3& b = person.joints[static_cast<std::size_t>(s.center_definition.second)];
  return 0.5 * (a + b);
}

Scene generate_scene(const SkeletonConfig& skeleton, const SceneParams& params) {
  skeleton.validate();
  if (params.persons < 1) throw PreconditionError("generate_scene: need at least one person");
  if (params.height < 32 || params.width < 32) throw PreconditionError("generate_scene: image must be >= 32x32");
  if (params.crowding < 0.0 || params.crowding > 1.0) throw PreconditionError("crowding must be in [0,1]");
  if (!(params.mm_per_unit > 0.0) || !(params.depth_min > 0.0) || params.depth_max < params.depth_min)
    throw PreconditionError("generate_scene: invalid unit or depth range");

  std::optional<RestPose> rest = params.rest_pose;
  if (!rest && is_default_layout(skeleton)) rest = default_rest_pose();

  Rng rng(params.seed);
  Scene scene;
  scene.height = params.height;
  scene.width = params.width;
  scene.seed = params.seed;
  scene.crowding = params.crowding;
  scene.mm_per_unit = params.mm_per_unit;

  const int n = params.persons;
  const double gap = (static_cast<double>(params.width) / n) * (1.0 - 0.85 * params.crowding);
  const double center_x = 0.5 * params.width;
  const double center_y = 0.5 * params.height;
  constexpr double margin = 1.0;

  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::shuffle(order.begin(), order.end(), rng);

  const int root = skeleton.tree_root();
  for (int slot = 0; slot < n; ++slot) {
    const double base_x = center_x + (order[static_cast<std::size_t>(slot)] - 0.5 * (n - 1)) * gap;
    bool placed = false;
    for (int attempt = 0; attempt < params.max_retries && !placed; ++attempt) {
      const auto body = sample_body(skeleton, params, rest, rng);
      double min_y = 0.0, max_y = 0.0;
      for (const Vec3& v : body) {
        min_y = std::min(min_y, v.y());
        max_y = std::max(max_y, v.y());
      }
      // Vertically centre the body, then jitter.
      const double root_y = center_y - 0.5 * (min_y + max_y) + uniform(rng, -0.05, 0.05) * params.height;
      const double root_x = base_x + uniform(rng, -0.1, 0.1) * gap;
      const double root_z = uniform(rng, params.depth_min, params.depth_max);
      ScenePerson person;
      person.visible.assign(static_cast<std::size_t>(skeleton.joint_count), true);
      bool inside = true;
      for (int j = 0; j < skeleton.joint_count; ++j) {
        const Vec3& v = body[static_cast<std::size_t>(j)];
        const Point3 q{root_x + v.x(), root_y + v.y(), root_z + v.z()};
        if (q.x < margin || q.y < margin || q.x > params.width - 1 - margin || q.y > params.height - 1 - margin ||
            !(q.z > 0.0)) {
          inside = false;
          break;
        }
        person.joints.push_back(q);
      }
      (void)root;
      if (!inside) continue;
      scene.persons.push_back(std::move(person));
      placed = true;
    }
    if (!placed) {
      throw GenerationError("could not place person " + std::to_string(slot) + " inside the image after " +
                            std::to_string(params.max_retries) + " attempts");
    }
  }
  return scene;
}

DataMapSet render_maps(const Scene& scene, const SkeletonConfig& s, const RenderParams& params) {
  params.validate();
  s.validate();
  const int k = s.joint_count;
  const int h = scene.height;
  const int w = scene.width;
  DataMapSet maps;
  maps.joint_count = k;
  maps.heat = TensorMap(k + 1, h, w);
  maps.scale = TensorMap(2, h, w);
  maps.depth = TensorMap(k, h, w);
  maps.offset3d = TensorMap(3 * k, h, w);

  for (const ScenePerson& person : scene.persons) {
    for (int j = 0; j < k; ++j) {
      if (!person.visible[static_cast<std::size_t>(j)]) continue;
      const Point3& q = person.joints[static_cast<std::size_t>(j)];
      paint_gaussian(maps.heat, j, round_pixel(q.x, q.y), params.gaussian_sigma);
    }
    const Point3 c = body_center(person, s);
    paint_gaussian(maps.heat, k, round_pixel(c.x, c.y), params.gaussian_sigma);
  }

  const auto sources = offset_sources(scene, s);
  const auto owner = pixel_owners(sources, h, w, params.offset_radius);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int o = owner[static_cast<std::size_t>(y) * w + x];
      if (o < 0) continue;
      const Source& src = sources[static_cast<std::size_t>(o)];
      const ScenePerson& person = scene.persons[static_cast<std::size_t>(src.person)];
      const Point3 c = body_center(person, s);
      maps.scale.at(0, y, x) = static_cast<float>(c.x - x);
      maps.scale.at(1, y, x) = static_cast<float>(c.y - y);
      for (int j = 0; j < k; ++j) {
        const Point3& q = person.joints[static_cast<std::size_t>(j)];
        maps.offset3d.at(3 * j, y, x) = static_cast<float>(q.x - x);
        maps.offset3d.at(3 * j + 1, y, x) = static_cast<float>(q.y - y);
        maps.offset3d.at(3 * j + 2, y, x) = static_cast<float>(q.z - src.ref_depth);
        maps.depth.at(j, y, x) = static_cast<float>(
            params.depth_encoding == DepthEncoding::delta_inverse ? delta_inverse(q.z) : q.z);
      }
    }
  }
  return maps;
}

TensorMap support_mask(const Scene& scene, const SkeletonConfig& s, const RenderParams& params) {
  params.validate();
  TensorMap mask(1, scene.height, scene.width);
  for (const Source& src : offset_sources(scene, s)) {
    for_disc(round_pixel(src.x, src.y), params.offset_radius, scene.width, scene.height,
             [&](int x, int y) { mask.at(0, y, x) = 1.0f; });
  }
  return mask;
}

TensorMap synthetic_feature(int channels, int height, int width, std::uint64_t seed) {
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  TensorMap f(channels, height, width);
  for (float& v : f.values()) v = u(rng);
  return f;
}

CorruptionResult corrupt_maps(const DataMapSet& maps, const Scene& scene, const SkeletonConfig& s,
                              const CorruptionParams& cp, const RenderParams& render) {
  if (cp.occlusion_prob < 0.0 || cp.occlusion_prob > 1.0) throw PreconditionError("occlusion_prob must be in [0,1]");
  if (cp.offset_noise < 0.0) throw PreconditionError("offset_noise must be non-negative");
  maps.validate();
  const int k = s.joint_count;
  CorruptionResult out{maps, {}};
  Rng rng(cp.seed);
  std::bernoulli_distribution occlude(cp.occlusion_prob);
  out.occluded.assign(scene.persons.size(), std::vector<bool>(static_cast<std::size_t>(k), false));
  for (std::size_t p = 0; p < scene.persons.size(); ++p)
    for (int j = 0; j < k; ++j) out.occluded[p][static_cast<std::size_t>(j)] = occlude(rng);

  DataMapSet& m = out.maps;
  for (std::size_t p = 0; p < scene.persons.size(); ++p) {
    const ScenePerson& person = scene.persons[p];
    for (int j = 0; j < k; ++j) {
      if (!out.occluded[p][static_cast<std::size_t>(j)]) continue;
      const Point3& q = person.joints[static_cast<std::size_t>(j)];
      const Pixel at = round_pixel(q.x, q.y);
      scale_gaussian(m.heat, j, at, render.gaussian_sigma, cp.suppress_factor);
      for_disc(at, render.offset_radius, m.width(), m.height(), [&](int x, int y) {
        m.scale.at(0, y, x) = 0.0f;
        m.scale.at(1, y, x) = 0.0f;
        for (int c = 0; c < 3 * k; ++c) m.offset3d.at(c, y, x) = 0.0f;
      });
    }
    if (cp.suppress_centers) {
      const Point3 c = body_center(person, s);
      scale_gaussian(m.heat, k, round_pixel(c.x, c.y), render.gaussian_sigma, cp.suppress_factor);
    }
  }

  if (cp.offset_noise > 0.0) {
    Rng noise_rng(cp.seed ^ 0xa5a5a5a5a5a5a5a5ULL);
    std::normal_distribution<double> n01(0.0, 1.0);
    for (int y = 0; y < m.height(); ++y)
      for (int x = 0; x < m.width(); ++x)
        for (int j = 0; j < k; ++j) {
          float& ex = m.offset3d.at(3 * j, y, x);
          float& ey = m.offset3d.at(3 * j + 1, y, x);
          float& ez = m.offset3d.at(3 * j + 2, y, x);
          const double len = std::sqrt(double(ex) * ex + double(ey) * ey + double(ez) * ez);
          if (len == 0.0) continue;
          const double sd = cp.offset_noise * len;
          ex = static_cast<float>(ex + sd * n01(noise_rng));
          ey = static_cast<float>(ey + sd * n01(noise_rng));
          ez = static_cast<float>(ez + sd * n01(noise_rng));
        }
  }
  return out;
}

std::vector<Pose3D> scene_poses(const Scene& scene) {
  std::vector<Pose3D> poses;
  for (std::size_t p = 0; p < scene.persons.size(); ++p) {
    const ScenePerson& person = scene.persons[p];
    Pose3D pose(static_cast<int>(person.joints.size()), static_cast<int>(p));
    pose.joints = person.joints;
    pose.valid = person.visible;
    poses.push_back(std::move(pose));
  }
  return poses;
}

std::string format_scene(const Scene& scene) {
  std::ostringstream out;
  out << "# grm3d scene v1\n";
  out << "image: " << scene.height << ' ' << scene.width << "\n";
  out << "seed: " << scene.seed << "\n";
  out << "crowding: " << text::fmt(scene.crowding) << "\n";
  out << "mm_per_unit: " << text::fmt(scene.mm_per_unit) << "\n";
  out << "joint_count: " << scene.joint_count() << "\n";
  out << "persons: " << scene.persons.size() << "\n";
  for (std::size_t p = 0; p < scene.persons.size(); ++p) {
    out << "person " << p << "\n";
    const ScenePerson& person = scene.persons[p];
    for (std::size_t j = 0; j < person.joints.size(); ++j) {
      const Point3& q = person.joints[j];
      out << j << ' ' << text::fmt(q.x) << ' ' << text::fmt(q.y) << ' ' << text::fmt(q.z) << ' '
          << (person.visible[j] ? 1 : 0) << "\n";
    }
  }
  return out.str();
}

Scene parse_scene(const std::string& doc) {
  text::LineReader r(doc);
  Scene scene;
  {
    auto t = text::split_ws(r.expect_key("image"));
    if (t.size() != 2) r.fail("image takes height and width");
    scene.height = static_cast<int>(text::parse_int(t[0], r));
    scene.width = static_cast<int>(text::parse_int(t[1], r));
    if (scene.height <= 0 || scene.width <= 0) r.fail("image size must be positive");
  }
  auto one = [&](std::string_view key) {
    auto t = text::split_ws(r.expect_key(key));
    if (t.size() != 1) r.fail(std::string(key) + " takes one value");
    return t[0];
  };
  scene.seed = static_cast<std::uint64_t>(text::parse_int(one("seed"), r));
  scene.crowding = text::parse_double(one("crowding"), r);
  scene.mm_per_unit = text::parse_double(one("mm_per_unit"), r);
  if (!(scene.mm_per_unit > 0.0)) r.fail("mm_per_unit must be positive");
  const auto k = text::parse_int(one("joint_count"), r);
  const auto n = text::parse_int(one("persons"), r);
  if (k < 0 || n < 0 || (n > 0 && k == 0)) r.fail("invalid joint or person count");
  for (long long p = 0; p < n; ++p) {
    if (!r.next()) r.fail("missing person block");
    auto t = r.tokens();
    if (t.size() != 2 || t[0] != "person" || text::parse_int(t[1], r) != p) r.fail("expected \"person " + std::to_string(p) + "\"");
    ScenePerson person;
    for (long long j = 0; j < k; ++j) {
      if (!r.next()) r.fail("missing joint line");
      auto jt = r.tokens();
      if (jt.size() != 5 || text::parse_int(jt[0], r) != j) r.fail("malformed joint line");
      person.joints.push_back(Point3{text::parse_double(jt[1], r), text::parse_double(jt[2], r),
                                     text::parse_double(jt[3], r)});
      const auto vis = text::parse_int(jt[4], r);
      if (vis != 0 && vis != 1) r.fail("visibility must be 0 or 1");
      person.visible.push_back(vis == 1);
    }
    scene.persons.push_back(std::move(person));
  }
  if (r.next()) r.fail("unexpected trailing content");
  return scene;
}

Scene load_scene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scene(ss.str());
}

}  // namespace grm3d
