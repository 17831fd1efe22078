#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace hosim {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kSpeedOfLightMps = 3.0e8;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double k) const { return {x * k, y * k}; }
  double norm() const { return std::hypot(x, y); }
};

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

// Axis-aligned rectangle centered at the origin, given by half-extents.
struct Rect {
  double half_x = 300.0;
  double half_y = 300.0;

  bool contains(const Vec2& p, double eps = 0.0) const {
    return p.x >= -half_x - eps && p.x <= half_x + eps &&
           p.y >= -half_y - eps && p.y <= half_y + eps;
  }
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double linear_to_db(double lin) {
  return 10.0 * std::log10(std::max(lin, 1e-300));
}

inline double dbm_to_mw(double dbm) { return db_to_linear(dbm); }
inline double mw_to_dbm(double mw) { return linear_to_db(mw); }

inline double kmh_to_mps(double kmh) { return kmh / 3.6; }

inline double wrap_angle(double rad) {
  double a = std::fmod(rad, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  return a;
}

}  // namespace hosim
