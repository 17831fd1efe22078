#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "hosim/channel.hpp"
#include "hosim/handover.hpp"
#include "hosim/metrics.hpp"
#include "hosim/mobility.hpp"

namespace hosim {

struct OracleResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Desk-check suite: every check recomputes its expected value through an
// independent expression (or a literal worked out by hand) and compares the
// library against it.
inline std::vector<OracleResult> run_oracles() {
  std::vector<OracleResult> out;
  auto check = [&](const std::string& name, bool pass, const std::string& detail) {
    out.push_back({name, pass, detail});
  };
  char buf[160];

  {
    // Straight-line transcription of the Cost-231 Hata urban form.
    double f = 2000.0, hb = 30.0, hm = 1.5;
    double a_hm = (1.1 * std::log10(f) - 0.7) * hm - (1.56 * std::log10(f) - 0.8);
    double by_hand = 46.3 + 33.9 * std::log10(f) - 13.82 * std::log10(hb) - a_hm +
                     (44.9 - 6.55 * std::log10(hb)) * std::log10(100.0 / 1000.0);
    double lib = cost231_pathloss(100.0, f, hb, hm);
    bool ok = std::abs(lib - by_hand) < 1e-9 && std::abs(lib - 102.519152631587) < 0.1;
    std::snprintf(buf, sizeof(buf), "PL(100 m) = %.12f dB (expected ~102.519)", lib);
    check("cost231 at 100 m", ok, buf);

    double lib1km = cost231_pathloss(1000.0, f, hb, hm);
    ok = std::abs(lib1km - 137.744008413173) < 0.1;
    std::snprintf(buf, sizeof(buf), "PL(1 km) = %.12f dB (expected ~137.744)", lib1km);
    check("cost231 at 1 km", ok, buf);

    double slope = lib1km - lib;
    ok = std::abs(slope - (44.9 - 6.55 * std::log10(hb))) < 1e-9;
    std::snprintf(buf, sizeof(buf), "slope/decade = %.12f dB", slope);
    check("cost231 distance slope", ok, buf);

    // Raising hb lowers PL; sign from the closed form, not assumption.
    double d_dhb = -13.82 / (hb * std::log(10.0)) -
                   6.55 / (hb * std::log(10.0)) * std::log10(100.0 / 1000.0);
    double delta = cost231_pathloss(100.0, f, 60.0, hm) - lib;
    ok = (d_dhb < 0) == (delta < 0) && delta < 0;
    std::snprintf(buf, sizeof(buf), "dPL/dhb = %.6f, PL(hb 60) - PL(hb 30) = %.6f",
                  d_dhb, delta);
    check("cost231 hb monotonicity", ok, buf);
  }

  {
    // HOA2 filter vs its unrolled convex sum on a 20-step random trace.
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> u(-100.0, -60.0);
    double beta = 0.25;
    Policy pol(PolicyParams{Algo::kHoa2, 100.0, 0.0, beta});  // hom high: no trigger
    std::vector<double> raw;
    bool ok = true;
    double worst = 0.0;
    for (int n = 0; n < 20; ++n) {
      MeasurementReport r;
      r.time_ms = n * 50;
      for (int c = 0; c < kNumCells; ++c) r.rsrp_dbm[c] = u(rng);
      raw.push_back(r.rsrp_dbm[3]);
      pol.on_report(r, 0);
      double expect = raw[0];
      for (std::size_t k = 1; k < raw.size(); ++k)
        expect = beta * raw[k] + (1.0 - beta) * expect;
      worst = std::max(worst, std::abs(pol.rss_f(3) - expect));
      ok = ok && worst < 1e-12;
    }
    std::snprintf(buf, sizeof(buf), "max |recursive - unrolled| = %.3e", worst);
    check("hoa2 filter recursion", ok, buf);
  }

  {
    // HOA3 filter vs the explicit geometric sum, FDIF(0) = 0.
    std::mt19937_64 rng(54321);
    std::uniform_real_distribution<double> u(-100.0, -60.0);
    double alpha = 0.75;
    Policy pol(PolicyParams{Algo::kHoa3, 1000.0, 0.0, alpha});
    std::vector<double> dif;
    bool ok = true;
    double worst = 0.0;
    for (int n = 0; n < 20; ++n) {
      MeasurementReport r;
      r.time_ms = n * 50;
      for (int c = 0; c < kNumCells; ++c) r.rsrp_dbm[c] = u(rng);
      dif.push_back(r.rsrp_dbm[5] - r.rsrp_dbm[0]);
      pol.on_report(r, 0);
      double expect = 0.0;
      for (std::size_t k = 0; k < dif.size(); ++k)
        expect += alpha * std::pow(1.0 - alpha, dif.size() - 1 - k) * dif[k];
      worst = std::max(worst, std::abs(pol.fdif(5) - expect));
      ok = ok && worst < 1e-12;
    }
    std::snprintf(buf, sizeof(buf), "max |recursive - geometric sum| = %.3e", worst);
    check("hoa3 filter recursion", ok, buf);
  }

  {
    double v = avg_handovers(150, 100, 10.0);
    bool ok = v == 150.0 / (100.0 * 10.0);
    std::snprintf(buf, sizeof(buf), "150/(100*10) = %.12f", v);
    check("handover-rate arithmetic", ok, buf);

    double r1 = optimize_ratio(5e7, 2.0);
    double r2 = optimize_ratio(5e7, 0.0);
    ok = r1 == 2.5e7 && r2 == 1e8;
    std::snprintf(buf, sizeof(buf), "ratio(5e7,2) = %.6g, ratio(5e7,0) = %.6g", r1, r2);
    check("optimize-ratio arithmetic", ok, buf);
  }

  {
    CellLayout l = build_layout(100.0);
    double isd = std::sqrt(3.0) * 100.0;
    bool ok = l.centers.size() == 7 && l.centers[0].norm() == 0.0;
    double worst = 0.0;
    for (int k = 1; k <= 6; ++k) {
      worst = std::max(worst, std::abs(l.centers[k].norm() - isd));
      int next = k == 6 ? 1 : k + 1;
      worst = std::max(worst,
                       std::abs(distance(l.centers[k], l.centers[next]) - isd));
    }
    ok = ok && worst < 1e-9;
    std::snprintf(buf, sizeof(buf), "max |distance - sqrt(3)*R| = %.3e m", worst);
    check("hex layout geometry", ok, buf);
  }

  {
    double noise = thermal_noise_dbm(180000.0, 9.0);
    bool ok = std::abs(noise - (-112.447274948967)) < 1e-9;
    std::snprintf(buf, sizeof(buf), "N = %.12f dBm", noise);
    check("thermal noise for one RB", ok, buf);

    double comb = linear_to_db(db_to_linear(0.0) + db_to_linear(0.0));
    ok = std::abs(comb - 10.0 * std::log10(2.0)) < 1e-12;
    std::snprintf(buf, sizeof(buf), "two 0 dB attempts combine to %.12f dB", comb);
    check("chase combining gain", ok, buf);

    double fd = kmh_to_mps(120.0) * 2000.0e6 / kSpeedOfLightMps;
    ok = std::abs(fd - 2000.0 / 9.0) < 1e-9;
    std::snprintf(buf, sizeof(buf), "f_d(120 km/h, 2 GHz) = %.6f Hz", fd);
    check("doppler frequency", ok, buf);
  }

  return out;
}

}  // namespace hosim
