#pragma once

#include <cmath>
#include <vector>

namespace grm3d {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Point3& operator+=(const Point3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  friend Point3 operator+(Point3 a, const Point3& b) { return a += b; }
  friend Point3 operator-(const Point3& a, const Point3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Point3 operator*(double s, const Point3& a) { return {s * a.x, s * a.y, s * a.z}; }
  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  friend bool operator==(const Point3&, const Point3&) = default;
};

inline double distance(const Point3& a, const Point3& b) { return (a - b).norm(); }

/// K joints with per-joint validity. Image-space poses carry (x px, y px, z depth);
/// metric poses carry millimetres.
struct Pose3D {
  int person_id = -1;
  std::vector<Point3> joints;
  std::vector<bool> valid;

  Pose3D() = default;
  explicit Pose3D(int k, int id = -1)
      : person_id(id), joints(static_cast<std::size_t>(k)), valid(static_cast<std::size_t>(k), false) {}

  int joint_count() const { return static_cast<int>(joints.size()); }
  int valid_count() const {
    int n = 0;
    for (bool v : valid) n += v ? 1 : 0;
    return n;
  }
};

}  // namespace grm3d
