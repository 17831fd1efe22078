#include <gtest/gtest.h>

#include <cmath>

#include "hosim/channel.hpp"
#include "hosim/rng.hpp"

TEST(Cost231, HandComputedAnchors) {
  // Medium-city urban (C = 0), f = 2000 MHz, hb = 30 m, hm = 1.5 m.
  double a_hm = (1.1 * std::log10(2000.0) - 0.7) * 1.5 -
                (1.56 * std::log10(2000.0) - 0.8);
  double expect_100m = 46.3 + 33.9 * std::log10(2000.0) -
                       13.82 * std::log10(30.0) - a_hm +
                       (44.9 - 6.55 * std::log10(30.0)) * std::log10(0.1);
  EXPECT_NEAR(hosim::cost231_pathloss(100.0, 2000.0, 30.0, 1.5), expect_100m, 1e-12);
  EXPECT_NEAR(hosim::cost231_pathloss(100.0, 2000.0, 30.0, 1.5), 102.519152631587, 0.1);
  EXPECT_NEAR(hosim::cost231_pathloss(1000.0, 2000.0, 30.0, 1.5), 137.744008413173, 0.1);
}

TEST(Cost231, DistanceSlopeAndClamp) {
  double slope = hosim::cost231_pathloss(1000.0, 2000.0, 30.0, 1.5) -
                 hosim::cost231_pathloss(100.0, 2000.0, 30.0, 1.5);
  EXPECT_NEAR(slope, 44.9 - 6.55 * std::log10(30.0), 1e-12);
  // Below 1 m the distance clamps, so the loss stops shrinking.
  EXPECT_DOUBLE_EQ(hosim::cost231_pathloss(0.5, 2000.0, 30.0, 1.5),
                   hosim::cost231_pathloss(1.0, 2000.0, 30.0, 1.5));
  EXPECT_THROW(hosim::cost231_pathloss(0.0, 2000.0, 30.0, 1.5), std::domain_error);
  EXPECT_THROW(hosim::cost231_pathloss(-5.0, 2000.0, 30.0, 1.5), std::domain_error);
}

TEST(Cost231, MonotoneInDistance) {
  double prev = 0.0;
  for (double d = 10.0; d <= 1000.0; d += 10.0) {
    double pl = hosim::cost231_pathloss(d, 2000.0, 30.0, 1.5);
    EXPECT_GT(pl, prev);
    prev = pl;
  }
}

TEST(ThermalNoise, RbBandwidthAnchor) {
  EXPECT_NEAR(hosim::thermal_noise_dbm(180e3, 9.0), -112.447274948967, 1e-9);
  // 3 dB more bandwidth -> 3 dB more noise.
  EXPECT_NEAR(hosim::thermal_noise_dbm(360e3, 9.0) - hosim::thermal_noise_dbm(180e3, 9.0),
              10.0 * std::log10(2.0), 1e-12);
}

TEST(Shadowing, RhoFollowsHalfPowerDecorrelation) {
  // After travelling exactly D the correlation halves.
  EXPECT_NEAR(hosim::shadow_rho(10.0, 5.0, 50.0), 0.5, 1e-12);
  EXPECT_NEAR(hosim::shadow_rho(10.0, 10.0, 50.0), 0.25, 1e-12);
  EXPECT_DOUBLE_EQ(hosim::shadow_rho(10.0, 1.0, 0.0), 0.0);
}

TEST(Shadowing, Ar1KeepsMarginalVariance) {
  auto rng = hosim::make_stream(3, hosim::Stream::kShadowing);
  const double std_db = 8.0;
  const double rho = 0.9;
  double sum = 0.0, sum2 = 0.0;
  const int n = 200000;
  hosim::ShadowingProcess p(std_db, rho, rng);
  for (int i = 0; i < n; ++i) {
    p.redraw(rng);
    sum += p.value_db();
    sum2 += p.value_db() * p.value_db();
  }
  double mean = sum / n;
  double var = sum2 / n - mean * mean;
  EXPECT_NEAR(mean, 0.0, 0.15);
  EXPECT_NEAR(std::sqrt(var), std_db, 0.25);
}

TEST(Shadowing, LagOneCorrelationMatchesRho) {
  auto rng = hosim::make_stream(11, hosim::Stream::kShadowing);
  const double rho = 0.7;
  hosim::ShadowingProcess p(8.0, rho, rng);
  double prev = p.value_db();
  double num = 0.0, den = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    p.redraw(rng);
    num += prev * p.value_db();
    den += prev * prev;
    prev = p.value_db();
  }
  EXPECT_NEAR(num / den, rho, 0.02);
}

TEST(Fading, MeanLinearPowerIsUnity) {
  auto rng = hosim::make_stream(5, hosim::Stream::kFading);
  hosim::FadingProcess f(200.0 / 9.0, rng);  // 120 km/h at 2 GHz
  double acc = 0.0;
  const int n = 400000;
  for (int i = 0; i < n; ++i) {
    f.advance(0.001);
    acc += f.gain_linear();
  }
  EXPECT_NEAR(acc / n, 1.0, 0.05);
}

TEST(Fading, DeterministicGivenSeedAndDt) {
  auto r1 = hosim::make_stream(9, hosim::Stream::kFading);
  auto r2 = hosim::make_stream(9, hosim::Stream::kFading);
  hosim::FadingProcess a(5.56, r1), b(5.56, r2);
  for (int i = 0; i < 1000; ++i) {
    a.advance(0.001);
    b.advance(0.001);
    ASSERT_DOUBLE_EQ(a.gain_linear(), b.gain_linear());
  }
}

TEST(Fading, SlowDopplerMovesSlower) {
  auto r1 = hosim::make_stream(13, hosim::Stream::kFading);
  auto r2 = hosim::make_stream(13, hosim::Stream::kFading);
  // Same phases, different Doppler: per-ms change should scale with f_d.
  hosim::FadingProcess slow(5.56, r1), fast(222.2, r2);
  double dslow = 0.0, dfast = 0.0;
  double prev_s = slow.gain_db(), prev_f = fast.gain_db();
  for (int i = 0; i < 5000; ++i) {
    slow.advance(0.001);
    fast.advance(0.001);
    dslow += std::fabs(slow.gain_db() - prev_s);
    dfast += std::fabs(fast.gain_db() - prev_f);
    prev_s = slow.gain_db();
    prev_f = fast.gain_db();
  }
  EXPECT_GT(dfast, 5.0 * dslow);
}

TEST(Rsrp, ComposesTxAndLosses) {
  // 29.03 dBm per RB through 102.5 dB pathloss and no shadow/fading.
  EXPECT_NEAR(hosim::rsrp_dbm(29.03, 102.5, 0.0, 0.0), -73.47, 1e-12);
  EXPECT_NEAR(hosim::rsrp_dbm(29.03, 102.5, 3.0, -2.0), -72.47, 1e-12);
}

TEST(Sinr, ClampsToFloorAndCeiling) {
  double noise = hosim::dbm_to_mw(-112.0);
  EXPECT_DOUBLE_EQ(hosim::sinr_db(1e-30, 0.0, noise), hosim::kSinrFloorDb);
  EXPECT_DOUBLE_EQ(hosim::sinr_db(1e9, 0.0, noise), hosim::kSinrCeilDb);
  // Equal serving and interference power sits at 0 dB ignoring noise.
  EXPECT_NEAR(hosim::sinr_db(1.0, 1.0, 1e-15), 0.0, 1e-9);
}
