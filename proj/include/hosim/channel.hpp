#pragma once

#include <random>
#include <stdexcept>
#include <vector>

#include "hosim/common.hpp"
#include "hosim/rng.hpp"

namespace hosim {

// Cost-231 Hata, urban, correction C = 0. The model is nominally valid for
// d >= 1 km; we apply it as-is at cell scale with a 1 m clamp so the log
// stays finite.
inline double cost231_pathloss(double d_m, double f_mhz, double hb_m, double hm_m) {
  if (!(d_m > 0.0)) throw std::domain_error("cost231_pathloss: d_m > 0 required");
  double d_km = std::max(d_m, 1.0) / 1000.0;
  double a_hm = (1.1 * std::log10(f_mhz) - 0.7) * hm_m - (1.56 * std::log10(f_mhz) - 0.8);
  return 46.3 + 33.9 * std::log10(f_mhz) - 13.82 * std::log10(hb_m) - a_hm +
         (44.9 - 6.55 * std::log10(hb_m)) * std::log10(d_km);
}

inline double thermal_noise_dbm(double bw_hz, double noise_figure_db) {
  return -174.0 + 10.0 * std::log10(bw_hz) + noise_figure_db;
}

// Gudmundson-style correlation between successive shadowing draws spaced
// dt apart while moving at v: rho = 0.5^(v*dt/D). D <= 0 degenerates to
// independent draws.
inline double shadow_rho(double speed_mps, double dt_s, double decorr_m) {
  if (decorr_m <= 0.0) return 0.0;
  return std::pow(0.5, speed_mps * dt_s / decorr_m);
}

class ShadowingProcess {
 public:
  ShadowingProcess() = default;
  ShadowingProcess(double std_db, double rho, std::mt19937_64& rng)
      : std_db_(std_db), rho_(rho), value_db_(std_db * gaussian(rng)) {}

  // One AR(1) refresh; marginal stays N(0, std^2).
  void redraw(std::mt19937_64& rng) {
    value_db_ = rho_ * value_db_ +
                std::sqrt(1.0 - rho_ * rho_) * std_db_ * gaussian(rng);
  }

  double value_db() const { return value_db_; }

 private:
  double std_db_ = 0.0;
  double rho_ = 0.0;
  double value_db_ = 0.0;
};

// Rayleigh fading via the method of exact Doppler spreads: two sums of
// sinusoids (32 in-phase, 33 quadrature) with frequencies
// f_n = f_d * sin(pi*(n - 1/2) / (2*N_i)) and random phases. Mean linear
// power gain is 1. Oscillators advance by phasor rotation so steady-state
// stepping needs no trig calls.
class FadingProcess {
 public:
  static constexpr int kN1 = 32;
  static constexpr int kN2 = 33;
  static constexpr int kNumOsc = kN1 + kN2;

  FadingProcess() = default;

  FadingProcess(double doppler_hz, std::mt19937_64& rng) {
    int idx = 0;
    for (int n = 1; n <= kN1; ++n, ++idx)
      omega_[idx] = kTwoPi * doppler_hz * std::sin(kPi * (n - 0.5) / (2.0 * kN1));
    for (int n = 1; n <= kN2; ++n, ++idx)
      omega_[idx] = kTwoPi * doppler_hz * std::sin(kPi * (n - 0.5) / (2.0 * kN2));
    for (int i = 0; i < kNumOsc; ++i) {
      double theta = uniform_range(rng, 0.0, kTwoPi);
      cos_[i] = std::cos(theta);
      sin_[i] = std::sin(theta);
    }
    cached_dt_s_ = -1.0;
  }

  void advance(double dt_s) {
    if (dt_s != cached_dt_s_) {
      for (int i = 0; i < kNumOsc; ++i) {
        rot_cos_[i] = std::cos(omega_[i] * dt_s);
        rot_sin_[i] = std::sin(omega_[i] * dt_s);
      }
      cached_dt_s_ = dt_s;
    }
    for (int i = 0; i < kNumOsc; ++i) {
      double c = cos_[i] * rot_cos_[i] - sin_[i] * rot_sin_[i];
      double s = sin_[i] * rot_cos_[i] + cos_[i] * rot_sin_[i];
      cos_[i] = c;
      sin_[i] = s;
    }
    if (++steps_since_norm_ >= 1 << 16) renormalize();
  }

  double gain_linear() const {
    double mu1 = 0.0, mu2 = 0.0;
    for (int i = 0; i < kN1; ++i) mu1 += cos_[i];
    for (int i = kN1; i < kNumOsc; ++i) mu2 += cos_[i];
    mu1 *= kAmp1;
    mu2 *= kAmp2;
    return mu1 * mu1 + mu2 * mu2;
  }

  double gain_db() const { return linear_to_db(gain_linear()); }

 private:
  // Component std 1/sqrt(2) each, so E[mu1^2 + mu2^2] = 1.
  static constexpr double kAmp1 = 0.17677669529663688;  // sqrt(1/32)
  static constexpr double kAmp2 = 0.17407765595569785;  // sqrt(1/33)

  void renormalize() {
    for (int i = 0; i < kNumOsc; ++i) {
      double m = std::sqrt(cos_[i] * cos_[i] + sin_[i] * sin_[i]);
      cos_[i] /= m;
      sin_[i] /= m;
    }
    steps_since_norm_ = 0;
  }

  double omega_[kNumOsc] = {};
  double cos_[kNumOsc] = {};
  double sin_[kNumOsc] = {};
  double rot_cos_[kNumOsc] = {};
  double rot_sin_[kNumOsc] = {};
  double cached_dt_s_ = -1.0;
  int steps_since_norm_ = 0;
};

// Per-(UE, cell) radio link for the current TTI. rx_mw is the per-RB
// received power; fading is flat across RBs so one value serves all 25.
struct RadioLink {
  double pathloss_db = 0.0;
  double shadow_db = 0.0;
  double fading_db = 0.0;
  double rsrp_dbm = -1e9;
  double rx_mw = 0.0;
};

inline double rsrp_dbm(double tx_per_rb_dbm, double pathloss_db, double shadow_db,
                       double fading_db) {
  return tx_per_rb_dbm - pathloss_db + shadow_db + fading_db;
}

constexpr double kSinrFloorDb = -30.0;
constexpr double kSinrCeilDb = 40.0;

inline double sinr_db(double serving_mw, double interference_mw, double noise_mw) {
  double denom = interference_mw + noise_mw;
  double lin = serving_mw / denom;
  double db = linear_to_db(lin);
  return std::clamp(db, kSinrFloorDb, kSinrCeilDb);
}

// Flat fading makes every RB identical; the vector form exists for trace
// consumers that want explicit per-RB rows.
inline std::vector<double> sinr_per_rb(double serving_mw, double interference_mw,
                                       double noise_mw, std::size_t num_rbs) {
  return std::vector<double>(num_rbs, sinr_db(serving_mw, interference_mw, noise_mw));
}

}  // namespace hosim
