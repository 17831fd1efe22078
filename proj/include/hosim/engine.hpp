#pragma once

#include <functional>
#include <vector>

#include "hosim/channel.hpp"
#include "hosim/config.hpp"
#include "hosim/handover.hpp"
#include "hosim/link.hpp"
#include "hosim/metrics.hpp"
#include "hosim/mobility.hpp"
#include "hosim/rng.hpp"

namespace hosim {

struct RunDiagnostics {
  std::int64_t bits_enqueued = 0;
  std::int64_t bits_credited = 0;
  std::int64_t bits_dropped_blocks = 0;   // HARQ cap reached
  std::int64_t bits_dropped_handover = 0; // in-flight at handover
  std::int64_t bits_in_queues_end = 0;
  std::int64_t bits_in_flight_end = 0;
  std::int64_t blocks_delivered = 0;
  std::int64_t blocks_dropped = 0;
  std::int64_t transmissions_total = 0;
  std::int64_t new_blocks = 0;
  std::int64_t mcs_sum = 0;
  int max_transmissions_seen = 0;
};

struct ChannelTraceRow {
  std::int64_t time_ms;
  int ue_id;
  int cell_id;
  double pathloss_db;
  double shadow_db;
  double fading_db;
  double rsrp_dbm;
};

struct TraceSinks {
  std::function<void(const ChannelTraceRow&)> channel;
  std::function<void(const HandoverEvent&)> handover;
};

struct RunResult {
  RunTrace trace;
  RunMetrics metrics;
  RunDiagnostics diag;
};

namespace detail {

struct UeRuntime {
  UeKinematics kin;
  int serving = 0;
  UeQueue queue;
  TrafficSource traffic;
  Policy policy;
  HarqProcess harq;
  std::int64_t interrupted_until_ms = 0;
  std::vector<int> cqi_pipe;  // ring buffer, oldest entry is the stale CQI
  std::array<ShadowingProcess, kNumCells> shadow;
  std::array<FadingProcess, kNumCells> fading;
  std::array<RadioLink, kNumCells> links;
  double sinr_now_db = kSinrFloorDb;
};

}  // namespace detail

// One full simulation. Per-TTI order: mobility, channel update, measurement
// reports + policy, handover execution, traffic + scheduling + transmission,
// HARQ feedback, metrics sampling.
inline RunResult run(const ScenarioConfig& cfg, const PolicyParams& pol,
                     const CqiTable& table, const TraceSinks* sinks = nullptr) {
  cfg.validate();
  const CellLayout layout = build_layout(cfg.cell_radius_m);
  const Rect rect = cfg.bounding_rect();
  const double tx_rb_dbm = cfg.tx_per_rb_dbm();
  const double noise_mw =
      dbm_to_mw(thermal_noise_dbm(cfg.rb_bandwidth_hz(), cfg.noise_figure_db));
  const double rho = shadow_rho(cfg.ue_speed_mps(),
                                static_cast<double>(cfg.measurement_interval_ms) / 1000.0,
                                cfg.shadow_decorr_m);
  const double tti_s = static_cast<double>(cfg.tti_ms) / 1000.0;
  const std::int64_t n_tti = cfg.sim_time_ms / cfg.tti_ms;
  const std::size_t pipe_len = static_cast<std::size_t>(cfg.cqi_delay_ms / cfg.tti_ms) + 1;
  const HarqConfig harq_cfg{cfg.harq_ack_delay_ms,
                            static_cast<int>(1 + cfg.max_retransmissions)};

  auto rng_place = make_stream(cfg.seed, Stream::kPlacement);
  auto rng_shadow = make_stream(cfg.seed, Stream::kShadowing);
  auto rng_fading = make_stream(cfg.seed, Stream::kFading);
  auto rng_bler = make_stream(cfg.seed, Stream::kBlockError);

  const std::size_t n_ue = static_cast<std::size_t>(cfg.num_users);
  std::vector<detail::UeRuntime> ues(n_ue);
  {
    auto kins = place_users(n_ue, rect, cfg.ue_speed_mps(), rng_place);
    for (std::size_t i = 0; i < n_ue; ++i) ues[i].kin = kins[i];
  }
  for (auto& ue : ues)
    for (int c = 0; c < kNumCells; ++c)
      ue.shadow[c] = ShadowingProcess(cfg.shadow_std_db, rho, rng_shadow);
  for (auto& ue : ues)
    for (int c = 0; c < kNumCells; ++c)
      ue.fading[c] = FadingProcess(cfg.doppler_hz(), rng_fading);

  std::array<RoundRobinScheduler, kNumCells> sched;
  // Initial attachment: strongest RSRP over pathloss + shadow, no fading.
  for (std::size_t i = 0; i < n_ue; ++i) {
    auto& ue = ues[i];
    std::array<double, kNumCells> rx0{};
    int best = 0;
    for (int c = 0; c < kNumCells; ++c) {
      double d = std::max(distance(ue.kin.position, layout.centers[c]), 1.0);
      double pl = cost231_pathloss(d, cfg.carrier_freq_mhz, cfg.bs_height_m,
                                   cfg.ue_height_m);
      double dbm = rsrp_dbm(tx_rb_dbm, pl, ue.shadow[c].value_db(), 0.0);
      rx0[c] = dbm_to_mw(dbm);
      if (rx0[c] > rx0[best]) best = c;
    }
    ue.serving = best;
    double interf = 0.0;
    for (int c = 0; c < kNumCells; ++c)
      if (c != best) interf += rx0[c];
    int cqi0 = cqi_from_sinr(table, sinr_db(rx0[best], interf, noise_mw));
    ue.cqi_pipe.assign(pipe_len, cqi0);
    ue.policy = Policy(pol);
    ue.traffic = TrafficSource(cfg.traffic_rate_bps, cfg.packet_size_bits);
    sched[best].attach(static_cast<int>(i));
  }

  RunResult res;
  res.trace.sim_time_ms = n_tti * cfg.tti_ms;
  res.trace.tti_ms = cfg.tti_ms;
  res.trace.num_users = cfg.num_users;
  res.trace.credited_bits.assign(n_tti, {});
  res.trace.delay_sum_ms.assign(n_tti, {});
  res.trace.user_count.assign(n_tti, {});
  RunDiagnostics& diag = res.diag;

  for (std::int64_t k = 0; k < n_tti; ++k) {
    const std::int64_t now = k * cfg.tti_ms;
    const bool boundary = now % cfg.measurement_interval_ms == 0;

    // (1) mobility
    for (auto& ue : ues) ue.kin = step(ue.kin, static_cast<double>(cfg.tti_ms), rect);

    // (2) channel update + instantaneous SINR -> CQI pipeline
    for (std::size_t i = 0; i < n_ue; ++i) {
      auto& ue = ues[i];
      for (int c = 0; c < kNumCells; ++c) {
        if (boundary && now > 0) ue.shadow[c].redraw(rng_shadow);
        ue.fading[c].advance(tti_s);
        double d = std::max(distance(ue.kin.position, layout.centers[c]), 1.0);
        RadioLink& link = ue.links[c];
        link.pathloss_db = cost231_pathloss(d, cfg.carrier_freq_mhz, cfg.bs_height_m,
                                            cfg.ue_height_m);
        link.shadow_db = ue.shadow[c].value_db();
        link.fading_db = ue.fading[c].gain_db();
        link.rsrp_dbm = rsrp_dbm(tx_rb_dbm, link.pathloss_db, link.shadow_db,
                                 link.fading_db);
        link.rx_mw = dbm_to_mw(link.rsrp_dbm);
        if (sinks && sinks->channel)
          sinks->channel({now, static_cast<int>(i), c, link.pathloss_db,
                          link.shadow_db, link.fading_db, link.rsrp_dbm});
      }
      double interf = 0.0;
      for (int c = 0; c < kNumCells; ++c)
        if (c != ue.serving) interf += ue.links[c].rx_mw;
      ue.sinr_now_db = sinr_db(ue.links[ue.serving].rx_mw, interf, noise_mw);
      ue.cqi_pipe[static_cast<std::size_t>(k) % pipe_len] =
          cqi_from_sinr(table, ue.sinr_now_db);
    }

    // (3) measurement reports + policy state update
    // Reports carry the instantaneous wideband RSRP. Fading is flat across
    // RBs, so the per-RB mean equals the single faded value; the measurement
    // noise the policies see is exactly what their filters exist to handle.
    if (boundary) {
      for (std::size_t i = 0; i < n_ue; ++i) {
        auto& ue = ues[i];
        MeasurementReport r;
        r.ue_id = static_cast<int>(i);
        r.time_ms = now;
        for (int c = 0; c < kNumCells; ++c) r.rsrp_dbm[c] = ue.links[c].rsrp_dbm;
        ue.policy.on_report(r, ue.serving);
      }
    }

    // (4) handover execution, at most one per UE per report
    for (std::size_t i = 0; i < n_ue && boundary; ++i) {
      auto& ue = ues[i];
      auto target = ue.policy.poll(now);
      if (!target || *target == ue.serving) continue;
      if (now < ue.interrupted_until_ms) continue;
      HandoverEvent ev;
      ev.ue_id = static_cast<int>(i);
      ev.time_ms = now;
      ev.source_cell = ue.serving;
      ev.target_cell = *target;
      ev.forwarded_bits = ue.queue.total_bits();
      if (ue.harq.state != HarqState::kIdle) {
        diag.bits_dropped_handover += ue.harq.payload_bits;
        ue.harq = HarqProcess{};
      }
      sched[ue.serving].detach(ev.ue_id);
      sched[*target].attach(ev.ue_id);
      ue.serving = *target;
      ue.policy.on_handover();
      ue.interrupted_until_ms = now + cfg.handover_interruption_ms;
      res.trace.ho_events.push_back(ev);
      if (sinks && sinks->handover) sinks->handover(ev);
    }

    // (5) traffic, then RB allocation and transmission
    for (auto& ue : ues) {
      std::int64_t before = ue.queue.total_bits();
      ue.traffic.tick(ue.queue, now, cfg.tti_ms);
      diag.bits_enqueued += ue.queue.total_bits() - before;
    }
    auto transmit = [&](detail::UeRuntime& ue, int c) {
      HarqProcess& p = ue.harq;
      ++diag.transmissions_total;
      p.state = HarqState::kAwaitingFeedback;
      p.combined_sinr_linear += db_to_linear(ue.sinr_now_db);
      p.last_tx_ms = now;
      p.feedback_due_ms = now + cfg.harq_ack_delay_ms;
      p.tx_cell = c;
      double bler = bler_model(table, p.mcs_cqi,
                               linear_to_db(p.combined_sinr_linear));
      p.last_tx_ok = uniform01(rng_bler) > bler;
      diag.max_transmissions_seen =
          std::max(diag.max_transmissions_seen, p.transmissions_used);
    };
    for (int c = 0; c < kNumCells; ++c) {
      // Pending retransmissions go first at their original grant size; a
      // partial grant cannot carry the block, so mixing them into the
      // round-robin passes would waste the cell's RBs.
      std::int64_t rbs_left = cfg.num_rbs;
      for (int ue_id : sched[c].ring()) {
        if (rbs_left <= 0) break;
        auto& ue = ues[static_cast<std::size_t>(ue_id)];
        if (now < ue.interrupted_until_ms) continue;
        if (ue.harq.state != HarqState::kRetxPending) continue;
        if (ue.harq.num_rbs > rbs_left) continue;
        rbs_left -= ue.harq.num_rbs;
        ++ue.harq.transmissions_used;
        transmit(ue, c);
      }
      auto needs = [&](int ue_id) -> std::int64_t {
        auto& ue = ues[static_cast<std::size_t>(ue_id)];
        if (now < ue.interrupted_until_ms) return 0;
        if (ue.harq.state != HarqState::kIdle || ue.queue.empty()) return 0;
        int cqi = ue.cqi_pipe[static_cast<std::size_t>(k + 1) % pipe_len];
        if (cqi < 1) return 0;
        double per_rb = table.row(cqi).efficiency_bits_per_re *
                        static_cast<double>(cfg.data_res_per_rb);
        auto needed = static_cast<std::int64_t>(
            std::ceil(static_cast<double>(ue.queue.total_bits()) / per_rb));
        return std::min(std::max<std::int64_t>(needed, 1), cfg.num_rbs);
      };
      for (auto [ue_id, granted] : sched[c].allocate(rbs_left, needs)) {
        auto& ue = ues[static_cast<std::size_t>(ue_id)];
        HarqProcess& p = ue.harq;
        int cqi = ue.cqi_pipe[static_cast<std::size_t>(k + 1) % pipe_len];
        p.mcs_cqi = cqi;
        p.num_rbs = granted;
        p.payload_bits = std::min(
            ue.queue.total_bits(),
            transport_block_bits(table, cqi, granted, cfg.data_res_per_rb));
        ue.queue.take(p.payload_bits);
        p.transmissions_used = 1;
        p.combined_sinr_linear = 0.0;
        ++diag.new_blocks;
        diag.mcs_sum += cqi;
        transmit(ue, c);
      }
    }

    // (6) HARQ feedback due this TTI
    for (auto& ue : ues) {
      HarqProcess& p = ue.harq;
      if (p.state != HarqState::kAwaitingFeedback || now < p.feedback_due_ms)
        continue;
      switch (harq_step(p, harq_cfg)) {
        case HarqOutcome::kDelivered:
          res.trace.credited_bits[static_cast<std::size_t>(p.last_tx_ms / cfg.tti_ms)]
                                 [p.tx_cell] += p.payload_bits;
          diag.bits_credited += p.payload_bits;
          ++diag.blocks_delivered;
          p = HarqProcess{};
          break;
        case HarqOutcome::kDropped:
          diag.bits_dropped_blocks += p.payload_bits;
          ++diag.blocks_dropped;
          p = HarqProcess{};
          break;
        case HarqOutcome::kRetransmit:
          break;
      }
    }

    // (7) metrics sampling
    for (auto& ue : ues) {
      res.trace.delay_sum_ms[static_cast<std::size_t>(k)][ue.serving] +=
          ue.queue.hol_delay_ms(now);
      ++res.trace.user_count[static_cast<std::size_t>(k)][ue.serving];
    }
  }

  for (auto& ue : ues) {
    diag.bits_in_queues_end += ue.queue.total_bits();
    if (ue.harq.state != HarqState::kIdle) diag.bits_in_flight_end += ue.harq.payload_bits;
  }
  res.metrics = compute_metrics(res.trace);
  return res;
}

}  // namespace hosim
