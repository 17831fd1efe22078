#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hosim/common.hpp"
#include "hosim/config.hpp"

namespace hosim {

struct CqiRow {
  int cqi = 0;
  double sinr_threshold_db = 0.0;
  double efficiency_bits_per_re = 0.0;
  double bler_slope = 0.0;
  double bler_offset = 0.0;
};

// 16 levels; level 0 = out of range / no transmission. Thresholds are the
// SINRs at which the waterfall crosses just under 10% BLER, so mapping by
// threshold and mapping by BLER < 0.10 agree.
class CqiTable {
 public:
  static CqiTable builtin() {
    CqiTable t;
    constexpr CqiRow rows[15] = {
        {1, -6.7, 0.1523, 20.3985998767, 0.100916153115},
        {2, -4.7, 0.2344, 12.8706464093, 0.159941324082},
        {3, -2.3, 0.377, 6.43780454572, 0.23117590128},
        {4, 0.2, 0.6016, 3.51189388552, 0.391472321496},
        {5, 2.4, 0.877, 2.3302627852, 0.749674035641},
        {6, 4.3, 1.1758, 1.68752288832, 1.32705251514},
        {7, 5.9, 1.4766, 1.34241852245, 2.17519271763},
        {8, 8.1, 1.9141, 0.627198338867, 2.7853031458},
        {9, 10.3, 2.4063, 0.377924371454, 4.62245263402},
        {10, 11.7, 2.7305, 0.394870220986, 8.95981332577},
        {11, 14.1, 3.3223, 0.147481581886, 10.0911940941},
        {12, 16.3, 3.9023, 0.0949303100793, 18.4023153915},
        {13, 18.7, 4.5234, 0.0511372992031, 29.1033216716},
        {14, 21.0, 5.1152, 0.0310935228376, 51.8386906374},
        {15, 22.7, 5.5547, 0.0266835219498, 99.9159410191},
    };
    for (int i = 0; i < 15; ++i) t.rows_[i + 1] = rows[i];
    t.validate();
    return t;
  }

  static CqiTable from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open file '" + path + "'");
    CqiTable t;
    std::string line;
    if (!std::getline(in, line) ||
        line != "cqi,sinr_threshold_db,efficiency_bits_per_re,bler_slope,bler_offset")
      throw ConfigError("cqi table '" + path + "' has unexpected header");
    int count = 0;
    while (std::getline(in, line)) {
      if (detail::trim(line).empty()) continue;
      std::stringstream ss(line);
      std::string f;
      CqiRow r;
      std::getline(ss, f, ',');
      r.cqi = static_cast<int>(detail::parse_int("cqi", detail::trim(f)));
      std::getline(ss, f, ',');
      r.sinr_threshold_db = detail::parse_double("sinr_threshold_db", detail::trim(f));
      std::getline(ss, f, ',');
      r.efficiency_bits_per_re = detail::parse_double("efficiency_bits_per_re", detail::trim(f));
      std::getline(ss, f, ',');
      r.bler_slope = detail::parse_double("bler_slope", detail::trim(f));
      if (!std::getline(ss, f))
        throw ConfigError("cqi table '" + path + "' row has too few fields");
      r.bler_offset = detail::parse_double("bler_offset", detail::trim(f));
      if (r.cqi < 1 || r.cqi > 15)
        throw ConfigError("cqi table level out of range 1..15");
      t.rows_[r.cqi] = r;
      ++count;
    }
    if (count != 15) throw ConfigError("cqi table wants exactly 15 rows");
    t.validate();
    return t;
  }

  void validate() const {
    for (int i = 1; i <= 15; ++i) {
      if (rows_[i].cqi != i) throw ConfigError("cqi table rows must cover 1..15 once each");
      if (rows_[i].bler_slope <= 0 || rows_[i].bler_offset <= 0)
        throw ConfigError("cqi table slope and offset > 0");
    }
    for (int i = 2; i <= 15; ++i) {
      if (!(rows_[i].sinr_threshold_db > rows_[i - 1].sinr_threshold_db))
        throw ConfigError("cqi table thresholds strictly increasing");
      if (!(rows_[i].efficiency_bits_per_re > rows_[i - 1].efficiency_bits_per_re))
        throw ConfigError("cqi table efficiencies strictly increasing");
    }
  }

  const CqiRow& row(int cqi) const { return rows_[cqi]; }

  std::string to_csv() const {
    std::ostringstream out;
    out << "cqi,sinr_threshold_db,efficiency_bits_per_re,bler_slope,bler_offset\n";
    for (int i = 1; i <= 15; ++i) {
      const CqiRow& r = rows_[i];
      out << r.cqi << ',' << detail::fmt_double(r.sinr_threshold_db) << ','
          << detail::fmt_double(r.efficiency_bits_per_re) << ','
          << detail::fmt_double(r.bler_slope) << ','
          << detail::fmt_double(r.bler_offset) << '\n';
    }
    return out.str();
  }

  std::uint64_t hash() const { return fnv1a64(to_csv()); }

 private:
  std::array<CqiRow, 16> rows_{};
};

// Exponential waterfall in linear SINR; 1 below the knee.
inline double bler_model(const CqiTable& table, int cqi, double sinr_db) {
  const CqiRow& r = table.row(cqi);
  double g = db_to_linear(sinr_db);
  if (g <= r.bler_offset) return 1.0;
  return std::exp(-r.bler_slope * (g - r.bler_offset));
}

inline int cqi_from_sinr(const CqiTable& table, double sinr_db) {
  for (int cqi = 15; cqi >= 1; --cqi)
    if (sinr_db >= table.row(cqi).sinr_threshold_db) return cqi;
  return 0;
}

inline std::int64_t transport_block_bits(const CqiTable& table, int cqi,
                                         std::int64_t num_rbs,
                                         std::int64_t data_res_per_rb) {
  if (cqi < 1) return 0;
  return static_cast<std::int64_t>(table.row(cqi).efficiency_bits_per_re *
                                   static_cast<double>(data_res_per_rb) *
                                   static_cast<double>(num_rbs));
}

struct Packet {
  std::int64_t arrival_ms = 0;
  std::int64_t bits = 0;
};

// eNodeB-side downlink buffer for one UE. Bits leave the queue when a
// transport block is built; a dropped block does not return them.
class UeQueue {
 public:
  void push(std::int64_t arrival_ms, std::int64_t bits) {
    packets_.push_back({arrival_ms, bits});
    total_bits_ += bits;
  }

  // Remove up to want_bits from the front, splitting the last packet if
  // needed. Returns bits actually taken.
  std::int64_t take(std::int64_t want_bits) {
    std::int64_t taken = 0;
    while (taken < want_bits && !packets_.empty()) {
      Packet& p = packets_.front();
      std::int64_t chunk = std::min(p.bits, want_bits - taken);
      p.bits -= chunk;
      taken += chunk;
      if (p.bits == 0) packets_.pop_front();
    }
    total_bits_ -= taken;
    return taken;
  }

  bool empty() const { return packets_.empty(); }
  std::int64_t total_bits() const { return total_bits_; }
  std::int64_t hol_arrival_ms() const { return packets_.front().arrival_ms; }
  std::int64_t hol_delay_ms(std::int64_t now_ms) const {
    return packets_.empty() ? 0 : now_ms - packets_.front().arrival_ms;
  }
  std::size_t size() const { return packets_.size(); }

 private:
  std::deque<Packet> packets_;
  std::int64_t total_bits_ = 0;
};

// Constant bit rate source; emits whole packets once enough credit accrues.
class TrafficSource {
 public:
  TrafficSource() = default;
  TrafficSource(double rate_bps, std::int64_t packet_bits)
      : rate_bps_(rate_bps), packet_bits_(packet_bits) {}

  void tick(UeQueue& queue, std::int64_t now_ms, std::int64_t tti_ms) {
    credit_bits_ += rate_bps_ * static_cast<double>(tti_ms) / 1000.0;
    while (credit_bits_ >= static_cast<double>(packet_bits_)) {
      queue.push(now_ms, packet_bits_);
      credit_bits_ -= static_cast<double>(packet_bits_);
    }
  }

 private:
  double rate_bps_ = 0.0;
  std::int64_t packet_bits_ = 0;
  double credit_bits_ = 0.0;
};

enum class HarqState { kIdle, kAwaitingFeedback, kRetxPending };

// Stop-and-wait: one process per UE; a new block is built only once the
// previous one terminated. Retransmissions reuse the original grant size
// and MCS; attempts chase-combine in linear SINR.
struct HarqProcess {
  HarqState state = HarqState::kIdle;
  std::int64_t payload_bits = 0;
  int mcs_cqi = 0;
  std::int64_t num_rbs = 0;
  int transmissions_used = 0;
  double combined_sinr_linear = 0.0;
  std::int64_t last_tx_ms = -1;
  std::int64_t feedback_due_ms = -1;
  int tx_cell = -1;
  bool last_tx_ok = false;
};

struct HarqConfig {
  std::int64_t ack_delay_ms = 4;
  int max_transmissions = 4;
};

// Feedback resolution once feedback_due_ms arrives. ACK ends the process
// with bits credited against the last transmission instant; a NACK either
// re-arms a retransmission or drops the block at the cap.
enum class HarqOutcome { kDelivered, kRetransmit, kDropped };

inline HarqOutcome harq_step(HarqProcess& p, const HarqConfig& cfg) {
  if (p.state != HarqState::kAwaitingFeedback)
    throw std::logic_error("harq_step: feedback for a process not awaiting it");
  if (p.last_tx_ok) {
    p.state = HarqState::kIdle;
    return HarqOutcome::kDelivered;
  }
  if (p.transmissions_used >= cfg.max_transmissions) {
    p.state = HarqState::kIdle;
    return HarqOutcome::kDropped;
  }
  p.state = HarqState::kRetxPending;
  return HarqOutcome::kRetransmit;
}

// Cyclic single-RB passes over one cell's attached UEs. The pointer
// persists across TTIs and resumes after the last UE granted an RB.
class RoundRobinScheduler {
 public:
  void attach(int ue_id) { ring_.push_back(ue_id); }

  void detach(int ue_id) {
    for (std::size_t i = 0; i < ring_.size(); ++i) {
      if (ring_[i] != ue_id) continue;
      ring_.erase(ring_.begin() + static_cast<std::ptrdiff_t>(i));
      if (cursor_ > i) --cursor_;
      if (cursor_ >= ring_.size()) cursor_ = 0;
      return;
    }
  }

  const std::vector<int>& ring() const { return ring_; }

  // needs_rbs(ue) -> how many more RBs the UE can still use this TTI
  // (0 = not eligible / covered). Returns per-UE grant counts.
  template <typename NeedsFn>
  std::vector<std::pair<int, std::int64_t>> allocate(std::int64_t num_rbs,
                                                     NeedsFn&& needs_rbs) {
    std::vector<std::pair<int, std::int64_t>> grants;
    if (ring_.empty() || num_rbs <= 0) return grants;
    std::vector<std::int64_t> granted(ring_.size(), 0);
    std::int64_t left = num_rbs;
    std::size_t last_served = cursor_ == 0 ? ring_.size() - 1 : cursor_ - 1;
    bool any_served = false;
    while (left > 0) {
      bool progress = false;
      for (std::size_t k = 0; k < ring_.size() && left > 0; ++k) {
        std::size_t i = (cursor_ + k) % ring_.size();
        if (needs_rbs(ring_[i]) > granted[i]) {
          ++granted[i];
          --left;
          progress = true;
          any_served = true;
          last_served = i;
        }
      }
      if (!progress) break;
    }
    if (any_served) cursor_ = (last_served + 1) % ring_.size();
    for (std::size_t i = 0; i < ring_.size(); ++i)
      if (granted[i] > 0) grants.emplace_back(ring_[i], granted[i]);
    return grants;
  }

 private:
  std::vector<int> ring_;
  std::size_t cursor_ = 0;
};

}  // namespace hosim
