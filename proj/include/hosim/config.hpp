#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hosim/common.hpp"

namespace hosim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Algo { kHoa1 = 1, kHoa2 = 2, kHoa3 = 3, kHoa4 = 4 };

inline const char* algo_name(Algo a) {
  switch (a) {
    case Algo::kHoa1: return "hoa1";
    case Algo::kHoa2: return "hoa2";
    case Algo::kHoa3: return "hoa3";
    case Algo::kHoa4: return "hoa4";
  }
  return "?";
}

inline Algo parse_algo(const std::string& s) {
  if (s == "hoa1") return Algo::kHoa1;
  if (s == "hoa2") return Algo::kHoa2;
  if (s == "hoa3") return Algo::kHoa3;
  if (s == "hoa4") return Algo::kHoa4;
  throw ConfigError("unknown algorithm '" + s + "' (expected hoa1..hoa4)");
}

// HOA1/HOA4 sweep a time-to-trigger; HOA2/HOA3 sweep a filter factor instead.
inline bool algo_uses_ttt(Algo a) { return a == Algo::kHoa1 || a == Algo::kHoa4; }

// Full simulation scenario. Field names double as the config-file keys.
struct ScenarioConfig {
  std::int64_t num_cells = 7;
  double cell_radius_m = 100.0;
  double carrier_freq_mhz = 2000.0;
  double bandwidth_mhz = 5.0;
  std::int64_t num_rbs = 25;
  std::int64_t subcarriers_per_rb = 12;
  double subcarrier_spacing_khz = 15.0;
  double enodeb_total_tx_dbm = 43.01;
  std::int64_t num_users = 100;
  double ue_speed_kmh = 3.0;
  std::int64_t tti_ms = 1;
  std::int64_t measurement_interval_ms = 50;
  std::int64_t sim_time_ms = 10000;
  double traffic_rate_bps = 1000000.0;
  std::int64_t cqi_delay_ms = 3;
  std::int64_t harq_ack_delay_ms = 4;
  std::int64_t max_retransmissions = 3;
  double bler_target = 0.10;
  double shadow_std_db = 8.0;
  std::uint64_t seed = 1;
  double bounding_rect_half_x_m = 300.0;
  double bounding_rect_half_y_m = 300.0;
  // Quantities the source material leaves open; defaults are recorded in the
  // run metadata so results are reproducible.
  double bs_height_m = 30.0;
  double ue_height_m = 1.5;
  double shadow_decorr_m = 50.0;
  double noise_figure_db = 9.0;
  std::int64_t data_res_per_rb = 120;
  std::int64_t packet_size_bits = 1000;
  std::int64_t handover_interruption_ms = 50;

  Rect bounding_rect() const { return {bounding_rect_half_x_m, bounding_rect_half_y_m}; }
  double ue_speed_mps() const { return kmh_to_mps(ue_speed_kmh); }
  double tx_per_rb_dbm() const {
    return enodeb_total_tx_dbm - 10.0 * std::log10(static_cast<double>(num_rbs));
  }
  double rb_bandwidth_hz() const {
    return static_cast<double>(subcarriers_per_rb) * subcarrier_spacing_khz * 1e3;
  }
  double doppler_hz() const {
    return ue_speed_mps() * carrier_freq_mhz * 1e6 / kSpeedOfLightMps;
  }
  double sim_time_s() const { return static_cast<double>(sim_time_ms) / 1000.0; }

  void validate() const {
    auto positive = [](double v, const char* what) {
      if (!(v > 0.0)) throw ConfigError(std::string(what) + " > 0");
    };
    if (num_cells != 7) throw ConfigError("num_cells must be 7");
    positive(cell_radius_m, "cell_radius_m");
    positive(carrier_freq_mhz, "carrier_freq_mhz");
    positive(bandwidth_mhz, "bandwidth_mhz");
    positive(static_cast<double>(num_rbs), "num_rbs");
    positive(static_cast<double>(subcarriers_per_rb), "subcarriers_per_rb");
    positive(subcarrier_spacing_khz, "subcarrier_spacing_khz");
    positive(static_cast<double>(num_users), "num_users");
    positive(ue_speed_kmh, "ue_speed_kmh");
    positive(static_cast<double>(tti_ms), "tti_ms");
    positive(static_cast<double>(measurement_interval_ms), "measurement_interval_ms");
    positive(traffic_rate_bps + 1.0, "traffic_rate_bps + 1");  // rate 0 allowed
    if (traffic_rate_bps < 0.0) throw ConfigError("traffic_rate_bps >= 0");
    if (sim_time_ms < 0) throw ConfigError("sim_time_ms >= 0");
    positive(static_cast<double>(cqi_delay_ms), "cqi_delay_ms");
    positive(static_cast<double>(harq_ack_delay_ms), "harq_ack_delay_ms");
    positive(static_cast<double>(max_retransmissions), "max_retransmissions");
    if (!(bler_target > 0.0 && bler_target < 1.0))
      throw ConfigError("bler_target in (0,1)");
    if (shadow_std_db < 0.0) throw ConfigError("shadow_std_db >= 0");
    positive(bounding_rect_half_x_m, "bounding_rect_half_x_m");
    positive(bounding_rect_half_y_m, "bounding_rect_half_y_m");
    positive(bs_height_m, "bs_height_m");
    positive(ue_height_m, "ue_height_m");
    if (shadow_decorr_m < 0.0) throw ConfigError("shadow_decorr_m >= 0");
    positive(static_cast<double>(data_res_per_rb), "data_res_per_rb");
    positive(static_cast<double>(packet_size_bits), "packet_size_bits");
    if (handover_interruption_ms < 0)
      throw ConfigError("handover_interruption_ms >= 0");
    if (measurement_interval_ms % tti_ms != 0)
      throw ConfigError("measurement_interval_ms is an integer multiple of tti_ms");
    if (static_cast<double>(num_rbs) * static_cast<double>(subcarriers_per_rb) *
            subcarrier_spacing_khz >
        bandwidth_mhz * 1000.0)
      throw ConfigError(
          "num_rbs * subcarriers_per_rb * subcarrier_spacing_khz <= bandwidth_mhz * 1000");
    if (enodeb_total_tx_dbm <= 0.0) throw ConfigError("enodeb_total_tx_dbm > 0");
  }
};

// Parameter grid for the optimization sweep.
struct SweepGrid {
  std::vector<Algo> algorithms = {Algo::kHoa1, Algo::kHoa2, Algo::kHoa3, Algo::kHoa4};
  std::vector<double> hom_db_values = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<std::int64_t> ttt_values = {0, 1, 2, 3, 4, 5};
  std::vector<double> alpha_beta_values = {0.25, 0.5, 0.75, 1.0};
  std::vector<double> speeds_kmh = {3, 30, 120};

  void validate() const {
    for (double h : hom_db_values)
      if (h < 0.0) throw ConfigError("hom values >= 0");
    for (std::int64_t t : ttt_values)
      if (t < 0) throw ConfigError("ttt values >= 0");
    for (double ab : alpha_beta_values)
      if (!(ab > 0.0 && ab <= 1.0)) throw ConfigError("alpha_beta values in (0, 1]");
    for (double s : speeds_kmh)
      if (!(s > 0.0)) throw ConfigError("speeds_kmh > 0");
  }
};

// One sweep point: (algorithm, speed, HOM, TTT-or-factor).
struct GridPoint {
  Algo algo;
  double speed_kmh;
  double hom_db;
  double second;  // TTT in ms for hoa1/hoa4, alpha/beta otherwise
};

inline std::vector<GridPoint> expand_grid(const SweepGrid& grid) {
  grid.validate();
  std::vector<GridPoint> points;
  for (Algo a : grid.algorithms) {
    for (double speed : grid.speeds_kmh) {
      for (double hom : grid.hom_db_values) {
        if (algo_uses_ttt(a)) {
          for (std::int64_t ttt : grid.ttt_values)
            points.push_back({a, speed, hom, static_cast<double>(ttt)});
        } else {
          for (double ab : grid.alpha_beta_values)
            points.push_back({a, speed, hom, ab});
        }
      }
    }
  }
  return points;
}

// ---------------------------------------------------------------------------
// key = value file format, '#' starts a comment, lists are comma separated.

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Items separated by commas and/or whitespace.
inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',' || std::isspace(static_cast<unsigned char>(ch))) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("parse error: key '" + key + "' has non-numeric value '" + v + "'");
  }
}

inline std::int64_t parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    std::int64_t i = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw ConfigError("parse error: key '" + key + "' has non-integer value '" + v + "'");
  }
}

inline std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    std::uint64_t i = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw ConfigError("parse error: key '" + key + "' has non-integer value '" + v + "'");
  }
}

// key -> value pairs in file order; duplicate keys are an error.
inline std::map<std::string, std::string> parse_kv(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("parse error: line " + std::to_string(lineno) +
                        " is not 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("parse error: line " + std::to_string(lineno) + " has empty key");
    if (!kv.emplace(key, val).second)
      throw ConfigError("parse error: duplicate key '" + key + "'");
  }
  return kv;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline ScenarioConfig parse_scenario(const std::string& text) {
  ScenarioConfig c;
  auto kv = detail::parse_kv(text);
  for (const auto& [key, val] : kv) {
    if (key == "num_cells") c.num_cells = detail::parse_int(key, val);
    else if (key == "cell_radius_m") c.cell_radius_m = detail::parse_double(key, val);
    else if (key == "carrier_freq_mhz") c.carrier_freq_mhz = detail::parse_double(key, val);
    else if (key == "bandwidth_mhz") c.bandwidth_mhz = detail::parse_double(key, val);
    else if (key == "num_rbs") c.num_rbs = detail::parse_int(key, val);
    else if (key == "subcarriers_per_rb") c.subcarriers_per_rb = detail::parse_int(key, val);
    else if (key == "subcarrier_spacing_khz") c.subcarrier_spacing_khz = detail::parse_double(key, val);
    else if (key == "enodeb_total_tx_dbm") c.enodeb_total_tx_dbm = detail::parse_double(key, val);
    else if (key == "num_users") c.num_users = detail::parse_int(key, val);
    else if (key == "ue_speed_kmh") c.ue_speed_kmh = detail::parse_double(key, val);
    else if (key == "tti_ms") c.tti_ms = detail::parse_int(key, val);
    else if (key == "measurement_interval_ms") c.measurement_interval_ms = detail::parse_int(key, val);
    else if (key == "sim_time_ms") c.sim_time_ms = detail::parse_int(key, val);
    else if (key == "traffic_rate_bps") c.traffic_rate_bps = detail::parse_double(key, val);
    else if (key == "cqi_delay_ms") c.cqi_delay_ms = detail::parse_int(key, val);
    else if (key == "harq_ack_delay_ms") c.harq_ack_delay_ms = detail::parse_int(key, val);
    else if (key == "max_retransmissions") c.max_retransmissions = detail::parse_int(key, val);
    else if (key == "bler_target") c.bler_target = detail::parse_double(key, val);
    else if (key == "shadow_std_db") c.shadow_std_db = detail::parse_double(key, val);
    else if (key == "seed") c.seed = detail::parse_uint(key, val);
    else if (key == "bounding_rect_m") {
      auto parts = detail::split_list(val);
      if (parts.size() == 1) {
        c.bounding_rect_half_x_m = c.bounding_rect_half_y_m = detail::parse_double(key, parts[0]);
      } else if (parts.size() == 2) {
        c.bounding_rect_half_x_m = detail::parse_double(key, parts[0]);
        c.bounding_rect_half_y_m = detail::parse_double(key, parts[1]);
      } else {
        throw ConfigError("parse error: bounding_rect_m wants 'half_x, half_y'");
      }
    }
    else if (key == "bs_height_m") c.bs_height_m = detail::parse_double(key, val);
    else if (key == "ue_height_m") c.ue_height_m = detail::parse_double(key, val);
    else if (key == "shadow_decorr_m") c.shadow_decorr_m = detail::parse_double(key, val);
    else if (key == "noise_figure_db") c.noise_figure_db = detail::parse_double(key, val);
    else if (key == "data_res_per_rb") c.data_res_per_rb = detail::parse_int(key, val);
    else if (key == "packet_size_bits") c.packet_size_bits = detail::parse_int(key, val);
    else if (key == "handover_interruption_ms") c.handover_interruption_ms = detail::parse_int(key, val);
    else throw ConfigError("unknown key '" + key + "'");
  }
  c.validate();
  return c;
}

inline ScenarioConfig load_scenario(const std::string& path) {
  return parse_scenario(detail::read_file(path));
}

inline std::string serialize_scenario(const ScenarioConfig& c) {
  std::ostringstream out;
  auto d = detail::fmt_double;
  out << "num_cells = " << c.num_cells << "\n"
      << "cell_radius_m = " << d(c.cell_radius_m) << "\n"
      << "carrier_freq_mhz = " << d(c.carrier_freq_mhz) << "\n"
      << "bandwidth_mhz = " << d(c.bandwidth_mhz) << "\n"
      << "num_rbs = " << c.num_rbs << "\n"
      << "subcarriers_per_rb = " << c.subcarriers_per_rb << "\n"
      << "subcarrier_spacing_khz = " << d(c.subcarrier_spacing_khz) << "\n"
      << "enodeb_total_tx_dbm = " << d(c.enodeb_total_tx_dbm) << "\n"
      << "num_users = " << c.num_users << "\n"
      << "ue_speed_kmh = " << d(c.ue_speed_kmh) << "\n"
      << "tti_ms = " << c.tti_ms << "\n"
      << "measurement_interval_ms = " << c.measurement_interval_ms << "\n"
      << "sim_time_ms = " << c.sim_time_ms << "\n"
      << "traffic_rate_bps = " << d(c.traffic_rate_bps) << "\n"
      << "cqi_delay_ms = " << c.cqi_delay_ms << "\n"
      << "harq_ack_delay_ms = " << c.harq_ack_delay_ms << "\n"
      << "max_retransmissions = " << c.max_retransmissions << "\n"
      << "bler_target = " << d(c.bler_target) << "\n"
      << "shadow_std_db = " << d(c.shadow_std_db) << "\n"
      << "seed = " << c.seed << "\n"
      << "bounding_rect_m = " << d(c.bounding_rect_half_x_m) << ", "
      << d(c.bounding_rect_half_y_m) << "\n"
      << "bs_height_m = " << d(c.bs_height_m) << "\n"
      << "ue_height_m = " << d(c.ue_height_m) << "\n"
      << "shadow_decorr_m = " << d(c.shadow_decorr_m) << "\n"
      << "noise_figure_db = " << d(c.noise_figure_db) << "\n"
      << "data_res_per_rb = " << c.data_res_per_rb << "\n"
      << "packet_size_bits = " << c.packet_size_bits << "\n"
      << "handover_interruption_ms = " << c.handover_interruption_ms << "\n";
  return out.str();
}

inline SweepGrid parse_grid(const std::string& text) {
  SweepGrid g;
  auto kv = detail::parse_kv(text);
  for (const auto& [key, val] : kv) {
    auto parts = detail::split_list(val);
    if (key == "algorithms") {
      g.algorithms.clear();
      for (const auto& p : parts) g.algorithms.push_back(parse_algo(p));
    } else if (key == "hom_db_values") {
      g.hom_db_values.clear();
      for (const auto& p : parts) g.hom_db_values.push_back(detail::parse_double(key, p));
    } else if (key == "ttt_values") {
      g.ttt_values.clear();
      for (const auto& p : parts) g.ttt_values.push_back(detail::parse_int(key, p));
    } else if (key == "alpha_beta_values") {
      g.alpha_beta_values.clear();
      for (const auto& p : parts) g.alpha_beta_values.push_back(detail::parse_double(key, p));
    } else if (key == "speeds_kmh") {
      g.speeds_kmh.clear();
      for (const auto& p : parts) g.speeds_kmh.push_back(detail::parse_double(key, p));
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }
  g.validate();
  return g;
}

inline SweepGrid load_grid(const std::string& path) {
  return parse_grid(detail::read_file(path));
}

inline std::string serialize_grid(const SweepGrid& g) {
  std::ostringstream out;
  out << "algorithms = ";
  for (std::size_t i = 0; i < g.algorithms.size(); ++i)
    out << (i ? ", " : "") << algo_name(g.algorithms[i]);
  out << "\nhom_db_values = ";
  for (std::size_t i = 0; i < g.hom_db_values.size(); ++i)
    out << (i ? ", " : "") << detail::fmt_double(g.hom_db_values[i]);
  out << "\nttt_values = ";
  for (std::size_t i = 0; i < g.ttt_values.size(); ++i)
    out << (i ? ", " : "") << g.ttt_values[i];
  out << "\nalpha_beta_values = ";
  for (std::size_t i = 0; i < g.alpha_beta_values.size(); ++i)
    out << (i ? ", " : "") << detail::fmt_double(g.alpha_beta_values[i]);
  out << "\nspeeds_kmh = ";
  for (std::size_t i = 0; i < g.speeds_kmh.size(); ++i)
    out << (i ? ", " : "") << detail::fmt_double(g.speeds_kmh[i]);
  out << "\n";
  return out.str();
}

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t config_hash(const ScenarioConfig& c) {
  return fnv1a64(serialize_scenario(c));
}

}  // namespace hosim
