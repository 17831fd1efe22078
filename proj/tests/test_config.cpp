#include <gtest/gtest.h>

#include <cmath>

#include "hosim/config.hpp"

using hosim::Algo;
using hosim::ConfigError;
using hosim::ScenarioConfig;
using hosim::SweepGrid;

TEST(ScenarioConfig, DefaultsMatchScenarioTable) {
  ScenarioConfig c;
  EXPECT_EQ(c.num_cells, 7);
  EXPECT_DOUBLE_EQ(c.cell_radius_m, 100.0);
  EXPECT_DOUBLE_EQ(c.carrier_freq_mhz, 2000.0);
  EXPECT_DOUBLE_EQ(c.bandwidth_mhz, 5.0);
  EXPECT_EQ(c.num_rbs, 25);
  EXPECT_DOUBLE_EQ(c.enodeb_total_tx_dbm, 43.01);
  EXPECT_EQ(c.num_users, 100);
  EXPECT_EQ(c.tti_ms, 1);
  EXPECT_EQ(c.measurement_interval_ms, 50);
  EXPECT_EQ(c.sim_time_ms, 10000);
  EXPECT_DOUBLE_EQ(c.traffic_rate_bps, 1e6);
  EXPECT_EQ(c.cqi_delay_ms, 3);
  EXPECT_EQ(c.harq_ack_delay_ms, 4);
  EXPECT_EQ(c.max_retransmissions, 3);
  EXPECT_DOUBLE_EQ(c.bler_target, 0.10);
  EXPECT_DOUBLE_EQ(c.shadow_std_db, 8.0);
  EXPECT_NO_THROW(c.validate());
}

TEST(ScenarioConfig, DerivedQuantities) {
  ScenarioConfig c;
  // 43.01 dBm split over 25 RBs and 180 kHz per RB.
  EXPECT_NEAR(c.tx_per_rb_dbm(), 43.01 - 10.0 * std::log10(25.0), 1e-12);
  EXPECT_DOUBLE_EQ(c.rb_bandwidth_hz(), 180e3);
  EXPECT_NEAR(c.ue_speed_mps(), 3.0 / 3.6, 1e-12);
  c.ue_speed_kmh = 120.0;
  EXPECT_NEAR(c.doppler_hz(), (120.0 / 3.6) * 2e9 / 3e8, 1e-9);
  EXPECT_DOUBLE_EQ(c.sim_time_s(), 10.0);
}

TEST(ScenarioConfig, SerializeParseRoundTrip) {
  ScenarioConfig c;
  c.ue_speed_kmh = 120.0;
  c.seed = 99;
  c.shadow_decorr_m = 37.5;
  c.bounding_rect_half_x_m = 250.0;
  c.bounding_rect_half_y_m = 175.0;
  ScenarioConfig back = hosim::parse_scenario(hosim::serialize_scenario(c));
  EXPECT_EQ(hosim::config_hash(back), hosim::config_hash(c));
  EXPECT_DOUBLE_EQ(back.ue_speed_kmh, 120.0);
  EXPECT_EQ(back.seed, 99u);
  EXPECT_DOUBLE_EQ(back.shadow_decorr_m, 37.5);
  EXPECT_DOUBLE_EQ(back.bounding_rect_half_y_m, 175.0);
}

TEST(ScenarioConfig, ParseOverridesAndComments) {
  ScenarioConfig c = hosim::parse_scenario(
      "# comment line\n"
      "ue_speed_kmh = 30   # trailing comment\n"
      "\n"
      "bounding_rect_m = 200, 300\n");
  EXPECT_DOUBLE_EQ(c.ue_speed_kmh, 30.0);
  EXPECT_DOUBLE_EQ(c.bounding_rect_half_x_m, 200.0);
  EXPECT_DOUBLE_EQ(c.bounding_rect_half_y_m, 300.0);
}

TEST(ScenarioConfig, ParseErrors) {
  EXPECT_THROW(hosim::parse_scenario("nonsense_key = 3\n"), ConfigError);
  EXPECT_THROW(hosim::parse_scenario("seed = 1\nseed = 2\n"), ConfigError);
  EXPECT_THROW(hosim::parse_scenario("ue_speed_kmh = fast\n"), ConfigError);
  EXPECT_THROW(hosim::parse_scenario("just a line\n"), ConfigError);
  EXPECT_THROW(hosim::parse_scenario("= 3\n"), ConfigError);
  EXPECT_THROW(hosim::parse_scenario("bounding_rect_m = 1, 2, 3\n"), ConfigError);
}

TEST(ScenarioConfig, ValidationRejectsBadValues) {
  ScenarioConfig c;
  c.num_cells = 19;
  EXPECT_THROW(c.validate(), ConfigError);
  c = ScenarioConfig{};
  c.bler_target = 1.5;
  EXPECT_THROW(c.validate(), ConfigError);
  c = ScenarioConfig{};
  c.measurement_interval_ms = 7;
  c.tti_ms = 2;
  EXPECT_THROW(c.validate(), ConfigError);
  c = ScenarioConfig{};
  c.num_rbs = 1000;  // exceeds 5 MHz
  EXPECT_THROW(c.validate(), ConfigError);
  c = ScenarioConfig{};
  c.ue_speed_kmh = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(SplitList, CommasAndWhitespace) {
  auto parts = hosim::detail::split_list("1, 2,3\t4  5,");
  ASSERT_EQ(parts.size(), 5u);
  EXPECT_EQ(parts[0], "1");
  EXPECT_EQ(parts[4], "5");
  EXPECT_TRUE(hosim::detail::split_list("  ,, ").empty());
}

TEST(Algo, NamesRoundTrip) {
  for (Algo a : {Algo::kHoa1, Algo::kHoa2, Algo::kHoa3, Algo::kHoa4})
    EXPECT_EQ(hosim::parse_algo(hosim::algo_name(a)), a);
  EXPECT_THROW(hosim::parse_algo("hoa5"), ConfigError);
  EXPECT_TRUE(hosim::algo_uses_ttt(Algo::kHoa1));
  EXPECT_FALSE(hosim::algo_uses_ttt(Algo::kHoa2));
  EXPECT_FALSE(hosim::algo_uses_ttt(Algo::kHoa3));
  EXPECT_TRUE(hosim::algo_uses_ttt(Algo::kHoa4));
}

// 11 HOM x 6 TTT for hoa1/hoa4, 11 HOM x 4 factors for hoa2/hoa3, 3 speeds:
// (66 + 44 + 44 + 66) * 3 = 660 points.
TEST(SweepGrid, DefaultGridHas660Points) {
  SweepGrid g;
  auto points = hosim::expand_grid(g);
  EXPECT_EQ(points.size(), 660u);
  std::size_t hoa1 = 0, hoa2 = 0, hoa3 = 0, hoa4 = 0;
  for (const auto& p : points) {
    switch (p.algo) {
      case Algo::kHoa1: ++hoa1; break;
      case Algo::kHoa2: ++hoa2; break;
      case Algo::kHoa3: ++hoa3; break;
      case Algo::kHoa4: ++hoa4; break;
    }
  }
  EXPECT_EQ(hoa1, 198u);
  EXPECT_EQ(hoa2, 132u);
  EXPECT_EQ(hoa3, 132u);
  EXPECT_EQ(hoa4, 198u);
}

TEST(SweepGrid, ParseAndSerializeRoundTrip) {
  SweepGrid g = hosim::parse_grid(
      "algorithms = hoa1, hoa4\n"
      "hom_db_values = 0 2 4\n"
      "ttt_values = 0, 5\n"
      "speeds_kmh = 30\n");
  EXPECT_EQ(hosim::expand_grid(g).size(), 12u);
  SweepGrid back = hosim::parse_grid(hosim::serialize_grid(g));
  EXPECT_EQ(hosim::serialize_grid(back), hosim::serialize_grid(g));
}

TEST(SweepGrid, ValidationRejectsOutOfRange) {
  SweepGrid g;
  g.alpha_beta_values = {0.0};
  EXPECT_THROW(g.validate(), ConfigError);
  g = SweepGrid{};
  g.alpha_beta_values = {1.25};
  EXPECT_THROW(g.validate(), ConfigError);
  g = SweepGrid{};
  g.hom_db_values = {-1.0};
  EXPECT_THROW(g.validate(), ConfigError);
  EXPECT_THROW(hosim::parse_grid("ttt_values = -1\n"), ConfigError);
}

TEST(ConfigHash, SensitiveToEveryFieldChange) {
  ScenarioConfig a;
  std::uint64_t h0 = hosim::config_hash(a);
  a.shadow_decorr_m += 1.0;
  EXPECT_NE(hosim::config_hash(a), h0);
}
