#pragma once

#include <cmath>
#include <string>

#include "lattgen/errors.hpp"

namespace lattgen {

enum class ProfileKind { Circle, Square, RoundedSquare };

// 2D cross-section in beam-local transverse coordinates.
// circle: radius; square: side; rounded_square: side + corner radius.
struct Profile {
  ProfileKind kind = ProfileKind::Circle;
  double radius = 0.0;   // circle
  double side = 0.0;     // square, rounded_square
  double corner = 0.0;   // rounded_square, in [0, side/2]
};

inline Profile circle_profile(double radius) {
  if (!(radius > 0.0)) throw ParamError("circle profile radius must be positive");
  return Profile{ProfileKind::Circle, radius, 0.0, 0.0};
}

inline Profile square_profile(double side) {
  if (!(side > 0.0)) throw ParamError("square profile side must be positive");
  return Profile{ProfileKind::Square, 0.0, side, 0.0};
}

inline Profile rounded_square_profile(double side, double corner) {
  if (!(side > 0.0)) throw ParamError("rounded square profile side must be positive");
  if (!(corner >= 0.0 && corner <= side / 2.0))
    throw ParamError("rounded square corner radius must lie in [0, side/2]");
  return Profile{ProfileKind::RoundedSquare, 0.0, side, corner};
}

// Inclusion value: positive inside, zero on the boundary, negative outside.
// circle:  R - sqrt(x^2 + y^2)
// square:  s/2 - max(|x|, |y|)   (via the identity |x+y| + |x-y| = 2 max(|x|,|y|))
// rounded: corner radius rho recessed square; the outside branch is
//          rho - sqrt(max(|x| - (s/2 - rho), 0)^2 + max(|y| - (s/2 - rho), 0)^2),
//          and inside the recessed square the value continues positively so the
//          field stays usable as an inclusion function for any rho, including 0.
inline double profile_inside(const Profile& p, double x, double y) {
  switch (p.kind) {
    case ProfileKind::Circle:
      return p.radius - std::sqrt(x * x + y * y);
    case ProfileKind::Square:
      return p.side / 2.0 - std::fmax(std::fabs(x), std::fabs(y));
    case ProfileKind::RoundedSquare: {
      double half = p.side / 2.0 - p.corner;
      double qx = std::fabs(x) - half;
      double qy = std::fabs(y) - half;
      double outside = std::sqrt(std::fmax(qx, 0.0) * std::fmax(qx, 0.0) +
                                 std::fmax(qy, 0.0) * std::fmax(qy, 0.0));
      double inside = std::fmin(std::fmax(qx, qy), 0.0);
      return p.corner - (outside + inside);
    }
  }
  return -1.0;
}

// Tight upper bound on the boundary's distance from the profile centre.
inline double profile_bound(const Profile& p) {
  switch (p.kind) {
    case ProfileKind::Circle:
      return p.radius;
    case ProfileKind::Square:
      return p.side * std::sqrt(2.0) / 2.0;
    case ProfileKind::RoundedSquare:
      return (p.side / 2.0 - p.corner) * std::sqrt(2.0) + p.corner;
  }
  return 0.0;
}

inline const char* profile_kind_name(ProfileKind k) {
  switch (k) {
    case ProfileKind::Circle: return "circle";
    case ProfileKind::Square: return "square";
    case ProfileKind::RoundedSquare: return "rounded_square";
  }
  return "?";
}

}  // namespace lattgen
