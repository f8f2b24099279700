#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>

namespace texrad {

inline constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
  double x = 0, y = 0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {a.x * s, a.y * s}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

inline constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double length(Vec2 a) { return std::sqrt(dot(a, a)); }

struct Vec3 {
  double x = 0, y = 0, z = 0;

  constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

  constexpr Vec3& operator+=(Vec3 b) {
    x += b.x;
    y += b.y;
    z += b.z;
    return *this;
  }
  constexpr Vec3& operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }

  friend constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend constexpr Vec3 operator-(Vec3 a) { return {-a.x, -a.y, -a.z}; }
  friend constexpr Vec3 operator*(Vec3 a, double s) { return {a.x * s, a.y * s, a.z * s}; }
  friend constexpr Vec3 operator*(double s, Vec3 a) { return {a.x * s, a.y * s, a.z * s}; }
  friend constexpr Vec3 operator/(Vec3 a, double s) { return {a.x / s, a.y / s, a.z / s}; }
  friend constexpr bool operator==(Vec3, Vec3) = default;
};

inline constexpr double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline constexpr Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double length(Vec3 a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalize(Vec3 a) {
  const double len = length(a);
  return len > 0 ? a / len : a;
}
inline constexpr Vec3 min(Vec3 a, Vec3 b) {
  return {std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)};
}
inline constexpr Vec3 max(Vec3 a, Vec3 b) {
  return {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)};
}
inline bool isfinite(Vec3 a) {
  return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

// Linear RGB radiometric triple.
struct Rgb {
  double r = 0, g = 0, b = 0;

  constexpr Rgb& operator+=(Rgb o) {
    r += o.r;
    g += o.g;
    b += o.b;
    return *this;
  }
  friend constexpr Rgb operator+(Rgb a, Rgb o) { return {a.r + o.r, a.g + o.g, a.b + o.b}; }
  friend constexpr Rgb operator-(Rgb a, Rgb o) { return {a.r - o.r, a.g - o.g, a.b - o.b}; }
  friend constexpr Rgb operator*(Rgb a, Rgb o) { return {a.r * o.r, a.g * o.g, a.b * o.b}; }
  friend constexpr Rgb operator*(Rgb a, double s) { return {a.r * s, a.g * s, a.b * s}; }
  friend constexpr Rgb operator*(double s, Rgb a) { return {a.r * s, a.g * s, a.b * s}; }
  friend constexpr bool operator==(Rgb, Rgb) = default;

  constexpr double sum() const { return r + g + b; }
  constexpr double max_component() const { return std::max({r, g, b}); }
};

inline double length(Rgb a) { return std::sqrt(a.r * a.r + a.g * a.g + a.b * a.b); }
inline constexpr Rgb min(Rgb a, double c) { return {std::min(a.r, c), std::min(a.g, c), std::min(a.b, c)}; }

struct Aabb {
  Vec3 lo{+INFINITY, +INFINITY, +INFINITY};
  Vec3 hi{-INFINITY, -INFINITY, -INFINITY};

  constexpr void extend(Vec3 p) {
    lo = min(lo, p);
    hi = max(hi, p);
  }
  constexpr void extend(const Aabb& b) {
    lo = min(lo, b.lo);
    hi = max(hi, b.hi);
  }
  constexpr bool empty() const { return lo.x > hi.x; }
  constexpr Vec3 extent() const { return hi - lo; }
  constexpr Vec3 center() const { return (lo + hi) * 0.5; }
  constexpr bool contains(Vec3 p) const {
    return p.x >= lo.x && p.y >= lo.y && p.z >= lo.z && p.x <= hi.x && p.y <= hi.y && p.z <= hi.z;
  }
  constexpr bool contains(const Aabb& b) const { return contains(b.lo) && contains(b.hi); }
  int longest_axis() const {
    const Vec3 e = extent();
    if (e.x >= e.y && e.x >= e.z) return 0;
    return e.y >= e.z ? 1 : 2;
  }
  double diagonal() const { return empty() ? 0.0 : length(extent()); }

  friend bool operator==(const Aabb&, const Aabb&) = default;
};

// Orthonormal basis around a unit normal (Duff et al., branchless revision).
struct Frame {
  Vec3 tangent, bitangent, normal;

  static Frame from_normal(Vec3 n) {
    const double sign = std::copysign(1.0, n.z);
    const double a = -1.0 / (sign + n.z);
    const double b = n.x * n.y * a;
    return {{1.0 + sign * n.x * n.x * a, sign * b, -sign * n.x}, {b, sign + n.y * n.y * a, -n.y}, n};
  }
  Vec3 to_world(Vec3 local) const { return tangent * local.x + bitangent * local.y + normal * local.z; }
};

}  // namespace texrad
