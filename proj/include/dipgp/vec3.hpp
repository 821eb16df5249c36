#pragma once

#include <array>
#include <cmath>

namespace dipgp {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  friend constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend constexpr Vec3 operator-(Vec3 a) { return {-a.x, -a.y, -a.z}; }
  friend constexpr Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
  friend constexpr Vec3 operator*(Vec3 a, double s) { return s * a; }
  friend constexpr Vec3 operator/(Vec3 a, double s) { return {a.x / s, a.y / s, a.z / s}; }
  friend constexpr bool operator==(Vec3, Vec3) = default;
};

constexpr double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(Vec3 a) { return a / norm(a); }

constexpr Vec3 kE1{1.0, 0.0, 0.0};
constexpr Vec3 kE2{0.0, 1.0, 0.0};
constexpr Vec3 kE3{0.0, 0.0, 1.0};

// Right-handed orthonormal frame {u, v, axis} completing a unit axis.
struct Frame {
  Vec3 u, v, w;
};
inline Frame frame_around(Vec3 axis) {
  Vec3 w = normalized(axis);
  Vec3 helper = std::abs(w.x) < 0.9 ? kE1 : kE2;
  Vec3 u = normalized(cross(helper, w));
  Vec3 v = cross(w, u);
  return {u, v, w};
}

}  // namespace dipgp
