#pragma once

#include <cmath>

namespace lattgen {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
inline Vec3 operator*(Vec3 v, double s) { return s * v; }
inline Vec3 operator/(Vec3 v, double s) { return {v.x / s, v.y / s, v.z / s}; }
inline Vec3 operator-(Vec3 v) { return {-v.x, -v.y, -v.z}; }

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm2(Vec3 v) { return dot(v, v); }
inline double norm(Vec3 v) { return std::sqrt(norm2(v)); }

inline Vec3 normalized(Vec3 v) {
  double n = norm(v);
  return n > 0.0 ? v / n : Vec3{0.0, 0.0, 0.0};
}

inline double distance(Vec3 a, Vec3 b) { return norm(a - b); }

struct Aabb {
  Vec3 min{0, 0, 0};
  Vec3 max{0, 0, 0};

  void expand(Vec3 p) {
    min.x = std::fmin(min.x, p.x);
    min.y = std::fmin(min.y, p.y);
    min.z = std::fmin(min.z, p.z);
    max.x = std::fmax(max.x, p.x);
    max.y = std::fmax(max.y, p.y);
    max.z = std::fmax(max.z, p.z);
  }

  void pad(double m) {
    min = min - Vec3{m, m, m};
    max = max + Vec3{m, m, m};
  }

  Vec3 extent() const { return max - min; }
};

}  // namespace lattgen
