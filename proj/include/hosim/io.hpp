#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hosim/config.hpp"
#include "hosim/engine.hpp"
#include "hosim/metrics.hpp"

namespace hosim {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// All outputs go through write-to-temp + rename so files are either complete
// or absent.
class AtomicFile {
 public:
  explicit AtomicFile(const std::filesystem::path& path)
      : path_(path), tmp_(path.string() + ".tmp"), out_(tmp_, std::ios::binary) {
    if (!out_) throw IoError("cannot write '" + tmp_.string() + "'");
  }

  ~AtomicFile() {
    if (!committed_) {
      out_.close();
      std::error_code ec;
      std::filesystem::remove(tmp_, ec);
    }
  }

  std::ostream& stream() { return out_; }

  void commit() {
    out_.flush();
    if (!out_) throw IoError("write failed for '" + tmp_.string() + "'");
    out_.close();
    std::error_code ec;
    std::filesystem::rename(tmp_, path_, ec);
    if (ec) throw IoError("cannot rename '" + tmp_.string() + "' to '" +
                          path_.string() + "': " + ec.message());
    committed_ = true;
  }

 private:
  std::filesystem::path path_;
  std::filesystem::path tmp_;
  std::ofstream out_;
  bool committed_ = false;
};

inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
  AtomicFile f(path);
  f.stream() << content;
  f.commit();
}

inline std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

constexpr const char* kResultsCsvHeader =
    "algorithm,speed_kmh,hom_db,ttt_or_factor,seed,ho_avg,total_throughput_bps,"
    "total_delay_ms,optimize_ratio\n";

inline std::string format_result_row(const PolicyParams& pol, double speed_kmh,
                                     std::uint64_t seed, const RunMetrics& m) {
  double second = algo_uses_ttt(pol.algo) ? pol.ttt_ms : pol.factor;
  std::ostringstream out;
  out << algo_name(pol.algo) << ',' << fmt_g(speed_kmh) << ',' << fmt_g(pol.hom_db)
      << ',' << fmt_g(second) << ',' << seed << ',' << fmt_g(m.ho_avg) << ','
      << fmt_g(m.total_throughput_bps) << ',' << fmt_g(m.total_delay_ms) << ','
      << fmt_g(optimize_ratio(m.total_throughput_bps, m.ho_avg)) << '\n';
  return out.str();
}

constexpr const char* kSweepCsvHeader =
    "algorithm,speed_kmh,hom_db,ttt_or_factor,st_bps,anoh,total_delay_ms,"
    "optimize_ratio\n";

inline std::string format_sweep_row(const SweepRow& r) {
  std::ostringstream out;
  out << algo_name(r.algo) << ',' << fmt_g(r.speed_kmh) << ',' << fmt_g(r.hom_db)
      << ',' << fmt_g(r.second) << ',' << fmt_g(r.st_bps) << ',' << fmt_g(r.anoh)
      << ',' << fmt_g(r.total_delay_ms) << ',' << fmt_g(r.ratio) << '\n';
  return out.str();
}

constexpr const char* kChannelTraceHeader =
    "time_ms,ue_id,cell_id,pathloss_db,shadow_db,fading_db,rsrp_dbm\n";

inline std::string format_channel_row(const ChannelTraceRow& r) {
  std::ostringstream out;
  out << r.time_ms << ',' << r.ue_id << ',' << r.cell_id << ','
      << fmt_g(r.pathloss_db) << ',' << fmt_g(r.shadow_db) << ','
      << fmt_g(r.fading_db) << ',' << fmt_g(r.rsrp_dbm) << '\n';
  return out.str();
}

constexpr const char* kHoEventsHeader =
    "time_ms,ue_id,source,target,algorithm,hom,ttt_or_alpha_beta\n";

inline std::string format_ho_event_row(const HandoverEvent& ev, const PolicyParams& pol) {
  double second = algo_uses_ttt(pol.algo) ? pol.ttt_ms : pol.factor;
  std::ostringstream out;
  out << ev.time_ms << ',' << ev.ue_id << ',' << ev.source_cell << ','
      << ev.target_cell << ',' << algo_name(pol.algo) << ',' << fmt_g(pol.hom_db)
      << ',' << fmt_g(second) << '\n';
  return out.str();
}

// Run traces are all-integer, so a text round trip is exact: replaying a
// stored trace reproduces the metrics bit for bit.
constexpr const char* kRunTraceMagic = "hosim-run-trace v1";

inline void write_run_trace(const std::filesystem::path& path, const RunTrace& tr) {
  AtomicFile f(path);
  auto& out = f.stream();
  out << kRunTraceMagic << '\n';
  out << tr.sim_time_ms << ' ' << tr.tti_ms << ' ' << tr.num_users << ' '
      << tr.credited_bits.size() << ' ' << tr.ho_events.size() << '\n';
  for (std::size_t t = 0; t < tr.credited_bits.size(); ++t) {
    for (int c = 0; c < kNumCells; ++c) out << tr.credited_bits[t][c] << ' ';
    for (int c = 0; c < kNumCells; ++c) out << tr.delay_sum_ms[t][c] << ' ';
    for (int c = 0; c < kNumCells; ++c)
      out << tr.user_count[t][c] << (c + 1 < kNumCells ? ' ' : '\n');
  }
  for (const auto& ev : tr.ho_events)
    out << ev.time_ms << ' ' << ev.ue_id << ' ' << ev.source_cell << ' '
        << ev.target_cell << ' ' << ev.forwarded_bits << '\n';
  f.commit();
}

inline RunTrace read_run_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::string magic;
  std::getline(in, magic);
  if (magic != kRunTraceMagic)
    throw IoError("'" + path.string() + "' is not a run trace");
  RunTrace tr;
  std::size_t n_tti = 0, n_ev = 0;
  if (!(in >> tr.sim_time_ms >> tr.tti_ms >> tr.num_users >> n_tti >> n_ev))
    throw IoError("truncated run trace header in '" + path.string() + "'");
  tr.credited_bits.resize(n_tti);
  tr.delay_sum_ms.resize(n_tti);
  tr.user_count.resize(n_tti);
  for (std::size_t t = 0; t < n_tti; ++t) {
    for (int c = 0; c < kNumCells; ++c) in >> tr.credited_bits[t][c];
    for (int c = 0; c < kNumCells; ++c) in >> tr.delay_sum_ms[t][c];
    for (int c = 0; c < kNumCells; ++c) in >> tr.user_count[t][c];
  }
  tr.ho_events.resize(n_ev);
  for (auto& ev : tr.ho_events)
    in >> ev.time_ms >> ev.ue_id >> ev.source_cell >> ev.target_cell >>
        ev.forwarded_bits;
  if (!in) throw IoError("truncated run trace body in '" + path.string() + "'");
  return tr;
}

// Modeling choices the source material leaves open, echoed into every
// metadata file so downstream readers see them alongside the numbers.
inline std::vector<std::string> assumption_flags(const ScenarioConfig& c) {
  std::ostringstream shadow, noise, res, pkt, intr;
  shadow << "shadowing: redrawn per link every " << c.measurement_interval_ms
         << " ms, AR(1) rho = 0.5^(v*dt/D), D = " << fmt_g(c.shadow_decorr_m) << " m";
  noise << "noise: -174 dBm/Hz + 10log10(" << fmt_g(c.rb_bandwidth_hz()) << " Hz) + "
        << fmt_g(c.noise_figure_db) << " dB NF";
  res << "transport block: floor(eff * " << c.data_res_per_rb << " REs/RB * nRB)";
  pkt << "traffic: " << c.packet_size_bits << "-bit packets at "
      << fmt_g(c.traffic_rate_bps) << " bps";
  intr << "handover: " << c.handover_interruption_ms
       << " ms scheduling interruption after each switch, queue forwarded intact";
  return {
      "pathloss: Cost-231 Hata urban, hb = " + fmt_g(c.bs_height_m) +
          " m, hm = " + fmt_g(c.ue_height_m) + " m, 1 m distance clamp",
      shadow.str(),
      noise.str(),
      "fading: sum-of-sinusoids (32+33 oscillators), flat across RBs, mean power 1",
      "rsrp: instantaneous wideband value incl. fading (flat fading makes the "
      "per-RB mean equal the single faded value); reports are unfiltered",
      "sinr: full-load interference from all other cells, clamped to [-30, 40] dB",
      res.str(),
      pkt.str(),
      "harq: stop-and-wait, one process per UE, chase combining in linear SINR",
      "scheduler: RB passes continue until the whole queue is covered",
      intr.str(),
      "warm-up: none; metrics cover the full run",
  };
}

}  // namespace hosim
