#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "hosim/config.hpp"
#include "hosim/handover.hpp"

namespace hosim {

// Everything the run metrics depend on, as integers, one record per TTI per
// cell. Replaying a stored trace therefore reproduces metrics bit for bit.
struct RunTrace {
  std::int64_t sim_time_ms = 0;
  std::int64_t tti_ms = 1;
  std::int64_t num_users = 0;
  std::vector<std::array<std::int64_t, kNumCells>> credited_bits;  // [tti][cell]
  std::vector<std::array<std::int64_t, kNumCells>> delay_sum_ms;   // [tti][cell]
  std::vector<std::array<std::int32_t, kNumCells>> user_count;     // [tti][cell]
  std::vector<HandoverEvent> ho_events;
};

struct RunMetrics {
  std::int64_t ho_total = 0;
  double ho_avg = 0.0;  // per UE per second
  std::array<double, kNumCells> cell_throughput_bps{};
  double total_throughput_bps = 0.0;
  std::array<double, kNumCells> cell_delay_ms{};
  double total_delay_ms = 0.0;
};

inline double avg_handovers(std::int64_t ho_total, std::int64_t num_users,
                            double sim_time_s) {
  double jt = static_cast<double>(num_users) * sim_time_s;
  if (jt <= 0.0) return 0.0;
  return static_cast<double>(ho_total) / jt;
}

inline RunMetrics compute_metrics(const RunTrace& tr) {
  RunMetrics m;
  m.ho_total = static_cast<std::int64_t>(tr.ho_events.size());
  double sim_s = static_cast<double>(tr.sim_time_ms) / 1000.0;
  m.ho_avg = avg_handovers(m.ho_total, tr.num_users, sim_s);
  std::size_t n_tti = tr.credited_bits.size();
  for (int c = 0; c < kNumCells; ++c) {
    std::int64_t bits = 0;
    for (std::size_t t = 0; t < n_tti; ++t) bits += tr.credited_bits[t][c];
    m.cell_throughput_bps[c] = sim_s > 0.0 ? static_cast<double>(bits) / sim_s : 0.0;
    double delay_acc = 0.0;
    for (std::size_t t = 0; t < n_tti; ++t) {
      if (tr.user_count[t][c] > 0)
        delay_acc += static_cast<double>(tr.delay_sum_ms[t][c]) /
                     static_cast<double>(tr.user_count[t][c]);
    }
    m.cell_delay_ms[c] = n_tti > 0 ? delay_acc / static_cast<double>(n_tti) : 0.0;
    m.total_throughput_bps += m.cell_throughput_bps[c];
    m.total_delay_ms += m.cell_delay_ms[c];
  }
  return m;
}

// ST / ANOH with the zero-handover substitution.
inline double optimize_ratio(double st_bps, double anoh) {
  double eff = anoh == 0.0 ? 0.5 : anoh;
  return st_bps / eff;
}

struct SweepRow {
  Algo algo = Algo::kHoa1;
  double speed_kmh = 0.0;
  double hom_db = 0.0;
  double second = 0.0;  // ttt for hoa1/hoa4, alpha/beta otherwise
  double st_bps = 0.0;
  double anoh = 0.0;
  double total_delay_ms = 0.0;
  double ratio = 0.0;
};

// Mean of per-seed metrics for one grid point; the ratio is taken after
// averaging.
inline SweepRow aggregate_point(const GridPoint& gp,
                                const std::vector<RunMetrics>& per_seed) {
  SweepRow row;
  row.algo = gp.algo;
  row.speed_kmh = gp.speed_kmh;
  row.hom_db = gp.hom_db;
  row.second = gp.second;
  for (const RunMetrics& m : per_seed) {
    row.st_bps += m.total_throughput_bps;
    row.anoh += m.ho_avg;
    row.total_delay_ms += m.total_delay_ms;
  }
  if (!per_seed.empty()) {
    double n = static_cast<double>(per_seed.size());
    row.st_bps /= n;
    row.anoh /= n;
    row.total_delay_ms /= n;
  }
  row.ratio = optimize_ratio(row.st_bps, row.anoh);
  return row;
}

// Argmax per (algorithm, speed); ties prefer smaller HOM, then smaller
// second parameter.
inline std::vector<SweepRow> select_optimum(const std::vector<SweepRow>& rows) {
  std::map<std::pair<int, double>, SweepRow> best;
  for (const SweepRow& r : rows) {
    auto key = std::make_pair(static_cast<int>(r.algo), r.speed_kmh);
    auto it = best.find(key);
    if (it == best.end()) {
      best.emplace(key, r);
      continue;
    }
    SweepRow& b = it->second;
    bool better = r.ratio > b.ratio ||
                  (r.ratio == b.ratio &&
                   (r.hom_db < b.hom_db ||
                    (r.hom_db == b.hom_db && r.second < b.second)));
    if (better) b = r;
  }
  std::vector<SweepRow> out;
  out.reserve(best.size());
  for (auto& [key, row] : best) out.push_back(row);
  return out;
}

}  // namespace hosim
