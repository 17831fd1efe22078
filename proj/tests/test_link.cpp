#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "hosim/io.hpp"
#include "hosim/link.hpp"

using hosim::CqiTable;
using hosim::HarqConfig;
using hosim::HarqOutcome;
using hosim::HarqProcess;
using hosim::HarqState;

TEST(CqiTable, BuiltinValidatesAndHashesStably) {
  CqiTable t = CqiTable::builtin();
  EXPECT_NO_THROW(t.validate());
  EXPECT_EQ(t.hash(), CqiTable::builtin().hash());
  EXPECT_EQ(t.row(1).cqi, 1);
  EXPECT_DOUBLE_EQ(t.row(1).sinr_threshold_db, -6.7);
  EXPECT_DOUBLE_EQ(t.row(15).sinr_threshold_db, 22.7);
  EXPECT_DOUBLE_EQ(t.row(15).efficiency_bits_per_re, 5.5547);
}

// Each curve is anchored so BLER at the row's own switching threshold sits
// just under the 10% target, and falls off above it.
TEST(CqiTable, BlerNearTargetAtOwnThreshold) {
  CqiTable t = CqiTable::builtin();
  for (int cqi = 1; cqi <= 15; ++cqi) {
    double at = hosim::bler_model(t, cqi, t.row(cqi).sinr_threshold_db);
    EXPECT_GT(at, 0.05) << "cqi " << cqi;
    EXPECT_LT(at, 0.10) << "cqi " << cqi;
    double above = hosim::bler_model(t, cqi, t.row(cqi).sinr_threshold_db + 2.0);
    EXPECT_LT(above, at) << "cqi " << cqi;
    EXPECT_DOUBLE_EQ(hosim::bler_model(t, cqi, -40.0), 1.0);
  }
}

TEST(CqiTable, BlerMonotoneDecreasingInSinr) {
  CqiTable t = CqiTable::builtin();
  for (int cqi : {1, 7, 15}) {
    double prev = 1.0;
    for (double s = -20.0; s <= 40.0; s += 0.5) {
      double b = hosim::bler_model(t, cqi, s);
      EXPECT_LE(b, prev + 1e-15);
      prev = b;
    }
  }
}

TEST(CqiFromSinr, ThresholdBoundaries) {
  CqiTable t = CqiTable::builtin();
  EXPECT_EQ(hosim::cqi_from_sinr(t, -30.0), 0);
  EXPECT_EQ(hosim::cqi_from_sinr(t, -6.7), 1);
  EXPECT_EQ(hosim::cqi_from_sinr(t, -6.71), 0);
  for (int cqi = 1; cqi <= 15; ++cqi) {
    double thr = t.row(cqi).sinr_threshold_db;
    EXPECT_EQ(hosim::cqi_from_sinr(t, thr), cqi);
    EXPECT_EQ(hosim::cqi_from_sinr(t, thr - 1e-9), cqi - 1);
  }
  EXPECT_EQ(hosim::cqi_from_sinr(t, 40.0), 15);
}

TEST(CqiTable, CsvRoundTripAndErrors) {
  CqiTable t = CqiTable::builtin();
  std::filesystem::path p = std::filesystem::temp_directory_path() / "cqi_rt.csv";
  hosim::atomic_write(p, t.to_csv());
  CqiTable back = CqiTable::from_csv(p.string());
  EXPECT_EQ(back.hash(), t.hash());

  std::filesystem::path bad = std::filesystem::temp_directory_path() / "cqi_bad.csv";
  hosim::atomic_write(bad, "wrong,header\n1,2,3,4,5\n");
  EXPECT_THROW(CqiTable::from_csv(bad.string()), hosim::ConfigError);
  EXPECT_THROW(CqiTable::from_csv("/nonexistent/cqi.csv"), hosim::ConfigError);

  // Drop a row: 14 rows is rejected.
  std::string csv = t.to_csv();
  csv.erase(csv.rfind("15,"));
  hosim::atomic_write(bad, csv);
  EXPECT_THROW(CqiTable::from_csv(bad.string()), hosim::ConfigError);
  std::filesystem::remove(p);
  std::filesystem::remove(bad);
}

TEST(TransportBlock, FloorsEfficiencyTimesResources) {
  CqiTable t = CqiTable::builtin();
  // cqi 15: 5.5547 bits/RE * 120 RE * 2 RB = 1333.128 -> 1333.
  EXPECT_EQ(hosim::transport_block_bits(t, 15, 120, 2), 1333);
  EXPECT_EQ(hosim::transport_block_bits(t, 1, 120, 1),
            static_cast<std::int64_t>(0.1523 * 120.0));
  EXPECT_EQ(hosim::transport_block_bits(t, 0, 120, 5), 0);
}

TEST(UeQueue, TakeSplitsPacketsAndTracksHol) {
  hosim::UeQueue q;
  EXPECT_TRUE(q.empty());
  EXPECT_EQ(q.hol_delay_ms(100), 0);
  q.push(10, 1000);
  q.push(20, 1000);
  EXPECT_EQ(q.total_bits(), 2000);
  EXPECT_EQ(q.hol_delay_ms(60), 50);
  EXPECT_EQ(q.take(600), 600);
  // Head packet partially drained: arrival time must not change.
  EXPECT_EQ(q.hol_delay_ms(60), 50);
  EXPECT_EQ(q.take(600), 600);
  EXPECT_EQ(q.hol_delay_ms(60), 40);
  EXPECT_EQ(q.take(5000), 800);
  EXPECT_TRUE(q.empty());
  EXPECT_EQ(q.total_bits(), 0);
}

TEST(TrafficSource, CreditAccumulationIsExactForCbr) {
  hosim::UeQueue q;
  hosim::TrafficSource src(1e6, 1000);  // 1 Mbps, 1000-bit packets
  for (int now = 0; now < 100; ++now) src.tick(q, now, 1);
  // 1 packet per ms.
  EXPECT_EQ(q.size(), 100u);
  EXPECT_EQ(q.total_bits(), 100000);
  hosim::UeQueue q2;
  hosim::TrafficSource slow(250000.0, 1000);  // one packet every 4 ms
  for (int now = 0; now < 40; ++now) slow.tick(q2, now, 1);
  EXPECT_EQ(q2.size(), 10u);
}

TEST(Harq, DeliveredRetransmitDroppedPaths) {
  HarqConfig cfg;  // ack after 4 ms, 4 transmissions max
  HarqProcess p;
  EXPECT_THROW(hosim::harq_step(p, cfg), std::logic_error);

  p.state = HarqState::kAwaitingFeedback;
  p.last_tx_ok = true;
  EXPECT_EQ(hosim::harq_step(p, cfg), HarqOutcome::kDelivered);
  EXPECT_EQ(p.state, HarqState::kIdle);

  p.state = HarqState::kAwaitingFeedback;
  p.last_tx_ok = false;
  p.transmissions_used = 1;
  EXPECT_EQ(hosim::harq_step(p, cfg), HarqOutcome::kRetransmit);
  EXPECT_EQ(p.state, HarqState::kRetxPending);

  p.state = HarqState::kAwaitingFeedback;
  p.transmissions_used = cfg.max_transmissions;
  EXPECT_EQ(hosim::harq_step(p, cfg), HarqOutcome::kDropped);
  EXPECT_EQ(p.state, HarqState::kIdle);
}

TEST(Scheduler, SingleRbPassesAreFairWithinOne) {
  hosim::RoundRobinScheduler s;
  for (int i = 0; i < 7; ++i) s.attach(i);
  auto grants = s.allocate(25, [](int) { return std::int64_t{100}; });
  std::int64_t lo = 1 << 30, hi = 0, total = 0;
  ASSERT_EQ(grants.size(), 7u);
  for (auto [ue, n] : grants) {
    lo = std::min(lo, n);
    hi = std::max(hi, n);
    total += n;
  }
  EXPECT_EQ(total, 25);
  EXPECT_LE(hi - lo, 1);
}

TEST(Scheduler, CursorResumesAcrossTtis) {
  hosim::RoundRobinScheduler s;
  for (int i = 0; i < 3; ++i) s.attach(i);
  // 2 RBs per TTI over 3 UEs: after three TTIs everyone has exactly 2.
  std::map<int, std::int64_t> seen;
  for (int t = 0; t < 3; ++t)
    for (auto [ue, n] : s.allocate(2, [](int) { return std::int64_t{10}; }))
      seen[ue] += n;
  EXPECT_EQ(seen[0], 2);
  EXPECT_EQ(seen[1], 2);
  EXPECT_EQ(seen[2], 2);
}

TEST(Scheduler, SkipsUesWithoutNeedAndStopsWhenCovered) {
  hosim::RoundRobinScheduler s;
  for (int i = 0; i < 4; ++i) s.attach(i);
  auto grants = s.allocate(25, [](int ue) { return ue == 2 ? std::int64_t{3} : 0; });
  ASSERT_EQ(grants.size(), 1u);
  EXPECT_EQ(grants[0].first, 2);
  EXPECT_EQ(grants[0].second, 3);
  // Nobody needs anything: no grants, no infinite loop.
  EXPECT_TRUE(s.allocate(25, [](int) { return std::int64_t{0}; }).empty());
}

TEST(Scheduler, DetachKeepsRotationConsistent) {
  hosim::RoundRobinScheduler s;
  for (int i = 0; i < 3; ++i) s.attach(i);
  (void)s.allocate(1, [](int) { return std::int64_t{1}; });  // serves ue 0
  s.detach(0);
  auto grants = s.allocate(2, [](int) { return std::int64_t{1}; });
  ASSERT_EQ(grants.size(), 2u);
  EXPECT_EQ(s.ring().size(), 2u);
  s.detach(7);  // unknown id is a no-op
  EXPECT_EQ(s.ring().size(), 2u);
}
