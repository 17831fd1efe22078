#pragma once

#include <random>
#include <vector>

#include "hosim/common.hpp"
#include "hosim/rng.hpp"

namespace hosim {

struct CellLayout {
  std::vector<Vec2> centers;
  double radius_m = 0.0;
};

// Central cell at the origin, six neighbours at the inter-site distance
// sqrt(3)*R, one per 60 degrees starting at 30.
inline CellLayout build_layout(double radius_m) {
  CellLayout layout;
  layout.radius_m = radius_m;
  layout.centers.reserve(7);
  layout.centers.push_back({0.0, 0.0});
  const double isd = std::sqrt(3.0) * radius_m;
  for (int k = 0; k < 6; ++k) {
    double ang = kPi / 6.0 + k * kPi / 3.0;
    layout.centers.push_back({isd * std::cos(ang), isd * std::sin(ang)});
  }
  return layout;
}

struct UeKinematics {
  Vec2 position;
  double heading_rad = 0.0;
  double speed_mps = 0.0;
};

inline std::vector<UeKinematics> place_users(std::size_t n, const Rect& rect,
                                             double speed_mps,
                                             std::mt19937_64& rng) {
  std::vector<UeKinematics> ues(n);
  for (auto& ue : ues) {
    ue.position.x = uniform_range(rng, -rect.half_x, rect.half_x);
    ue.position.y = uniform_range(rng, -rect.half_y, rect.half_y);
    ue.heading_rad = uniform_range(rng, 0.0, kTwoPi);
    ue.speed_mps = speed_mps;
  }
  return ues;
}

// Advance one UE by dt, specular reflection at rect edges. Multiple
// reflections in one step are resolved by folding each axis independently;
// this matches iterative mirroring because the axes decouple.
inline UeKinematics step(UeKinematics ue, double dt_ms, const Rect& rect) {
  const double dt_s = dt_ms / 1000.0;
  double dx = ue.speed_mps * dt_s * std::cos(ue.heading_rad);
  double dy = ue.speed_mps * dt_s * std::sin(ue.heading_rad);

  auto fold = [](double pos, double half, bool& flipped) {
    flipped = false;
    if (half <= 0.0) return 0.0;
    const double span = 2.0 * half;
    // Map into [-half, 3*half) then mirror the upper half back down. The
    // number of mirrorings determines whether the velocity component flips.
    double t = std::fmod(pos + half, 2.0 * span);
    if (t < 0.0) t += 2.0 * span;
    if (t >= span) {
      t = 2.0 * span - t;
      flipped = true;
    }
    return t - half;
  };

  bool flip_x = false, flip_y = false;
  ue.position.x = fold(ue.position.x + dx, rect.half_x, flip_x);
  ue.position.y = fold(ue.position.y + dy, rect.half_y, flip_y);

  if (flip_x || flip_y) {
    double vx = std::cos(ue.heading_rad) * (flip_x ? -1.0 : 1.0);
    double vy = std::sin(ue.heading_rad) * (flip_y ? -1.0 : 1.0);
    ue.heading_rad = wrap_angle(std::atan2(vy, vx));
  }
  return ue;
}

}  // namespace hosim
