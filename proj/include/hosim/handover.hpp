#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "hosim/common.hpp"
#include "hosim/config.hpp"

namespace hosim {

constexpr int kNumCells = 7;
constexpr std::int64_t kWindowTuMs = 100;  // hoa2 dwell window

struct MeasurementReport {
  int ue_id = -1;
  std::int64_t time_ms = 0;
  std::array<double, kNumCells> rsrp_dbm{};
};

struct PolicyParams {
  Algo algo = Algo::kHoa1;
  double hom_db = 0.0;      // doubles as the hoa3 trigger threshold
  double ttt_ms = 0.0;      // hoa1 / hoa4
  double factor = 1.0;      // alpha (hoa3) or beta (hoa2)
};

struct HandoverEvent {
  int ue_id = -1;
  std::int64_t time_ms = 0;
  int source_cell = -1;
  int target_cell = -1;
  std::int64_t forwarded_bits = 0;
};

// Decision state for one UE. Reports update the filters; poll() runs the
// trigger check at the report instant. The trigger timer accumulates while
// a condition stays true across reports, so with 50 ms reports a nonzero
// TTT demands the condition hold at two consecutive reports, while TTT 0
// fires at the first qualifying report.
class Policy {
 public:
  Policy() = default;
  explicit Policy(const PolicyParams& p) : p_(p) { reset(); }

  const PolicyParams& params() const { return p_; }

  void reset() {
    cond_since_ms_.fill(-1);
    rss_f_.fill(0.0);
    rss_init_ = false;
    consec_.fill(0);
    fdif_.fill(0.0);
    avg_sum_db_ = 0.0;
    avg_n_ = 0;
    pending_.reset();
  }

  void on_handover() { reset(); }

  void on_report(const MeasurementReport& r, int serving) {
    last_report_ = r;
    has_report_ = true;
    switch (p_.algo) {
      case Algo::kHoa1: report_hoa1(r, serving); break;
      case Algo::kHoa2: report_hoa2(r, serving); break;
      case Algo::kHoa3: report_hoa3(r, serving); break;
      case Algo::kHoa4: report_hoa4(r, serving); break;
    }
  }

  // Candidate target whose trigger is satisfied at now_ms, if any.
  std::optional<int> poll(std::int64_t now_ms) {
    if (p_.algo == Algo::kHoa2 || p_.algo == Algo::kHoa3) {
      auto out = pending_;
      pending_.reset();
      return out;
    }
    if (!has_report_) return std::nullopt;
    int best = -1;
    for (int j = 0; j < kNumCells; ++j) {
      if (cond_since_ms_[j] < 0) continue;
      if (static_cast<double>(now_ms - cond_since_ms_[j]) < p_.ttt_ms) continue;
      if (best < 0 || last_report_.rsrp_dbm[j] > last_report_.rsrp_dbm[best]) best = j;
    }
    if (best < 0) return std::nullopt;
    return best;
  }

  // introspection for tests / oracles
  double rss_f(int cell) const { return rss_f_[cell]; }
  double fdif(int cell) const { return fdif_[cell]; }
  double serving_avg_dbm() const { return avg_n_ ? avg_sum_db_ / avg_n_ : 0.0; }
  std::int64_t avg_samples() const { return avg_n_; }
  std::int64_t cond_since_ms(int cell) const { return cond_since_ms_[cell]; }

 private:
  void update_ttt(const MeasurementReport& r, int serving, int j, bool cond) {
    if (j == serving || !cond)
      cond_since_ms_[j] = -1;
    else if (cond_since_ms_[j] < 0)
      cond_since_ms_[j] = r.time_ms;
  }

  void report_hoa1(const MeasurementReport& r, int serving) {
    for (int j = 0; j < kNumCells; ++j)
      update_ttt(r, serving, j, r.rsrp_dbm[j] > r.rsrp_dbm[serving] + p_.hom_db);
  }

  void report_hoa2(const MeasurementReport& r, int serving) {
    if (!rss_init_) {
      rss_f_ = r.rsrp_dbm;
      rss_init_ = true;
    } else {
      for (int j = 0; j < kNumCells; ++j)
        rss_f_[j] = p_.factor * r.rsrp_dbm[j] + (1.0 - p_.factor) * rss_f_[j];
    }
    int best = -1;
    for (int j = 0; j < kNumCells; ++j) {
      bool cond = j != serving && rss_f_[j] >= rss_f_[serving] + p_.hom_db;
      consec_[j] = cond ? consec_[j] + 1 : 0;
      if (consec_[j] >= kWindowTuMs / 50 && (best < 0 || rss_f_[j] > rss_f_[best]))
        best = j;
    }
    pending_ = best < 0 ? std::nullopt : std::optional<int>(best);
  }

  void report_hoa3(const MeasurementReport& r, int serving) {
    int best = -1;
    for (int j = 0; j < kNumCells; ++j) {
      double dif = r.rsrp_dbm[j] - r.rsrp_dbm[serving];
      fdif_[j] = (1.0 - p_.factor) * fdif_[j] + p_.factor * dif;
      if (j != serving && fdif_[j] > p_.hom_db && (best < 0 || fdif_[j] > fdif_[best]))
        best = j;
    }
    pending_ = best < 0 ? std::nullopt : std::optional<int>(best);
  }

  void report_hoa4(const MeasurementReport& r, int serving) {
    avg_sum_db_ += r.rsrp_dbm[serving];
    ++avg_n_;
    double avg = avg_sum_db_ / static_cast<double>(avg_n_);
    for (int j = 0; j < kNumCells; ++j) {
      bool cond = r.rsrp_dbm[j] > avg &&
                  r.rsrp_dbm[j] > r.rsrp_dbm[serving] + p_.hom_db;
      update_ttt(r, serving, j, cond);
    }
  }

  PolicyParams p_;
  MeasurementReport last_report_;
  bool has_report_ = false;
  std::array<std::int64_t, kNumCells> cond_since_ms_{};
  std::array<double, kNumCells> rss_f_{};
  bool rss_init_ = false;
  std::array<int, kNumCells> consec_{};
  std::array<double, kNumCells> fdif_{};
  double avg_sum_db_ = 0.0;
  std::int64_t avg_n_ = 0;
  std::optional<int> pending_;
};

// Report-granularity decision helpers mirroring the per-algorithm update +
// immediate poll at the report instant.
inline std::optional<int> decide(Policy& policy, const MeasurementReport& r,
                                 int serving) {
  policy.on_report(r, serving);
  return policy.poll(r.time_ms);
}

}  // namespace hosim
