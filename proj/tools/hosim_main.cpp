#include <atomic>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "hosim/engine.hpp"
#include "hosim/io.hpp"
#include "hosim/oracle.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
  std::string scenario_path;
  std::string cqi_table_path;
  std::string out_dir = ".";
  std::vector<std::uint64_t> seeds;
  std::int64_t sim_time_ms = -1;  // -1: keep scenario / subcommand default
  unsigned workers = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--scenario", o.scenario_path, "scenario file (key = value)");
  cmd->add_option("--cqi-table", o.cqi_table_path,
                  "CQI/BLER constants CSV (default: built-in table)");
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_option("--seed", o.seeds, "random seed (repeatable)");
  cmd->add_option("--sim-time", o.sim_time_ms, "simulated time in ms");
  cmd->add_option("--workers", o.workers, "worker threads for sweeps");
}

hosim::ScenarioConfig load_config(const CommonOpts& o) {
  hosim::ScenarioConfig cfg;
  if (!o.scenario_path.empty()) cfg = hosim::load_scenario(o.scenario_path);
  if (o.sim_time_ms >= 0) cfg.sim_time_ms = o.sim_time_ms;
  cfg.validate();
  return cfg;
}

hosim::CqiTable load_table(const CommonOpts& o) {
  if (!o.cqi_table_path.empty()) return hosim::CqiTable::from_csv(o.cqi_table_path);
  return hosim::CqiTable::builtin();
}

std::string hash_hex(std::uint64_t h) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json metadata_json(const hosim::ScenarioConfig& cfg, const hosim::CqiTable& table,
                   const std::vector<std::uint64_t>& seeds) {
  json meta;
  meta["config_hash"] = hash_hex(hosim::config_hash(cfg));
  meta["cqi_table_hash"] = hash_hex(table.hash());
  meta["seeds"] = seeds;
  meta["sim_time_ms"] = cfg.sim_time_ms;
  meta["assumptions"] = hosim::assumption_flags(cfg);
  return meta;
}

json metrics_json(const hosim::RunMetrics& m) {
  json j;
  j["ho_total"] = m.ho_total;
  j["ho_avg_per_ue_per_s"] = m.ho_avg;
  j["cell_throughput_bps"] = m.cell_throughput_bps;
  j["total_throughput_bps"] = m.total_throughput_bps;
  j["cell_delay_ms"] = m.cell_delay_ms;
  j["total_delay_ms"] = m.total_delay_ms;
  return j;
}

hosim::RunMetrics mean_metrics(const std::vector<hosim::RunMetrics>& ms) {
  hosim::RunMetrics mean;
  if (ms.empty()) return mean;
  for (const auto& m : ms) {
    mean.ho_total += m.ho_total;
    mean.ho_avg += m.ho_avg;
    mean.total_throughput_bps += m.total_throughput_bps;
    mean.total_delay_ms += m.total_delay_ms;
    for (int c = 0; c < hosim::kNumCells; ++c) {
      mean.cell_throughput_bps[c] += m.cell_throughput_bps[c];
      mean.cell_delay_ms[c] += m.cell_delay_ms[c];
    }
  }
  double n = static_cast<double>(ms.size());
  mean.ho_avg /= n;
  mean.total_throughput_bps /= n;
  mean.total_delay_ms /= n;
  for (int c = 0; c < hosim::kNumCells; ++c) {
    mean.cell_throughput_bps[c] /= n;
    mean.cell_delay_ms[c] /= n;
  }
  return mean;
}

struct RunCmdOpts {
  CommonOpts common;
  std::string algo = "hoa1";
  double hom_db = 0.0;
  double ttt_ms = 0.0;
  double alpha = 1.0;
  double beta = 1.0;
  double speed_kmh = -1.0;
  bool dump_channel = false;
  bool dump_ho = false;
  bool dump_run_trace = false;
};

hosim::PolicyParams make_policy(const std::string& algo_str, double hom, double ttt,
                                double alpha, double beta) {
  hosim::PolicyParams p;
  p.algo = hosim::parse_algo(algo_str);
  p.hom_db = hom;
  p.ttt_ms = ttt;
  p.factor = p.algo == hosim::Algo::kHoa2 ? beta : alpha;
  if (p.hom_db < 0.0) throw hosim::ConfigError("hom >= 0");
  if (p.ttt_ms < 0.0) throw hosim::ConfigError("ttt >= 0");
  if (!(p.factor > 0.0 && p.factor <= 1.0))
    throw hosim::ConfigError("alpha/beta in (0, 1]");
  return p;
}

int cmd_run(const RunCmdOpts& o) {
  hosim::ScenarioConfig cfg = load_config(o.common);
  hosim::CqiTable table = load_table(o.common);
  if (o.speed_kmh > 0.0) cfg.ue_speed_kmh = o.speed_kmh;
  cfg.validate();
  hosim::PolicyParams pol = make_policy(o.algo, o.hom_db, o.ttt_ms, o.alpha, o.beta);
  std::vector<std::uint64_t> seeds = o.common.seeds;
  if (seeds.empty()) seeds.push_back(cfg.seed);

  fs::create_directories(o.common.out_dir);
  fs::path out(o.common.out_dir);

  std::optional<hosim::AtomicFile> chan_file, ho_file;
  hosim::TraceSinks sinks;
  if (o.dump_channel) {
    chan_file.emplace(out / "channel_trace.csv");
    chan_file->stream() << hosim::kChannelTraceHeader;
    sinks.channel = [&](const hosim::ChannelTraceRow& r) {
      chan_file->stream() << hosim::format_channel_row(r);
    };
  }
  if (o.dump_ho) {
    ho_file.emplace(out / "ho_events.csv");
    ho_file->stream() << hosim::kHoEventsHeader;
    sinks.handover = [&](const hosim::HandoverEvent& ev) {
      ho_file->stream() << hosim::format_ho_event_row(ev, pol);
    };
  }

  std::string csv = hosim::kResultsCsvHeader;
  std::vector<hosim::RunMetrics> per_seed;
  json per_seed_json = json::array();
  for (std::uint64_t seed : seeds) {
    hosim::ScenarioConfig c = cfg;
    c.seed = seed;
    hosim::RunResult r = hosim::run(c, pol, table, &sinks);
    per_seed.push_back(r.metrics);
    csv += hosim::format_result_row(pol, c.ue_speed_kmh, seed, r.metrics);
    if (o.dump_run_trace)
      hosim::write_run_trace(out / ("run_trace_" + std::to_string(seed) + ".txt"),
                             r.trace);
    json js = metrics_json(r.metrics);
    js["seed"] = seed;
    js["diagnostics"] = {
        {"bits_enqueued", r.diag.bits_enqueued},
        {"bits_credited", r.diag.bits_credited},
        {"bits_dropped_blocks", r.diag.bits_dropped_blocks},
        {"bits_dropped_handover", r.diag.bits_dropped_handover},
        {"bits_in_queues_end", r.diag.bits_in_queues_end},
        {"bits_in_flight_end", r.diag.bits_in_flight_end},
        {"blocks_delivered", r.diag.blocks_delivered},
        {"blocks_dropped", r.diag.blocks_dropped},
        {"transmissions_total", r.diag.transmissions_total},
        {"new_blocks", r.diag.new_blocks},
        {"mcs_sum", r.diag.mcs_sum},
        {"max_transmissions_seen", r.diag.max_transmissions_seen},
    };
    per_seed_json.push_back(js);
  }
  hosim::RunMetrics mean = mean_metrics(per_seed);

  json doc;
  doc["algorithm"] = hosim::algo_name(pol.algo);
  doc["hom_db"] = pol.hom_db;
  doc["ttt_or_factor"] = hosim::algo_uses_ttt(pol.algo) ? pol.ttt_ms : pol.factor;
  doc["speed_kmh"] = cfg.ue_speed_kmh;
  doc["per_seed"] = per_seed_json;
  doc["mean"] = metrics_json(mean);
  doc["metadata"] = metadata_json(cfg, table, seeds);

  hosim::atomic_write(out / "results.csv", csv);
  hosim::atomic_write(out / "metrics.json", doc.dump(2) + "\n");
  if (chan_file) chan_file->commit();
  if (ho_file) ho_file->commit();

  std::printf("%s speed %g km/h: ho_avg %.4f /ue/s, throughput %.4f Mbps, delay %.2f ms\n",
              hosim::algo_name(pol.algo), cfg.ue_speed_kmh, mean.ho_avg,
              mean.total_throughput_bps / 1e6, mean.total_delay_ms);
  return 0;
}

struct SweepCmdOpts {
  CommonOpts common;
  std::string grid_path;
};

int cmd_sweep(const SweepCmdOpts& o) {
  hosim::ScenarioConfig cfg = load_config(o.common);
  if (o.common.sim_time_ms < 0) cfg.sim_time_ms = 1000;
  hosim::CqiTable table = load_table(o.common);
  hosim::SweepGrid grid;
  if (!o.grid_path.empty()) grid = hosim::load_grid(o.grid_path);
  std::vector<std::uint64_t> seeds = o.common.seeds;
  if (seeds.empty()) seeds.push_back(cfg.seed);

  std::vector<hosim::GridPoint> points = hosim::expand_grid(grid);
  std::vector<hosim::SweepRow> rows(points.size());
  std::vector<std::string> errors(points.size());
  std::atomic<std::size_t> next{0};

  auto work = [&]() {
    for (std::size_t i; (i = next.fetch_add(1)) < points.size();) {
      const hosim::GridPoint& gp = points[i];
      try {
        hosim::PolicyParams pol;
        pol.algo = gp.algo;
        pol.hom_db = gp.hom_db;
        if (hosim::algo_uses_ttt(gp.algo))
          pol.ttt_ms = gp.second;
        else
          pol.factor = gp.second;
        std::vector<hosim::RunMetrics> per_seed;
        for (std::uint64_t seed : seeds) {
          hosim::ScenarioConfig c = cfg;
          c.ue_speed_kmh = gp.speed_kmh;
          c.seed = seed;
          per_seed.push_back(hosim::run(c, pol, table).metrics);
        }
        rows[i] = hosim::aggregate_point(gp, per_seed);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  unsigned workers = std::max(1u, o.common.workers);
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  std::vector<hosim::SweepRow> good;
  std::size_t failed = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (errors[i].empty()) {
      good.push_back(rows[i]);
    } else {
      ++failed;
      std::fprintf(stderr, "point %zu failed: %s\n", i, errors[i].c_str());
    }
  }

  fs::create_directories(o.common.out_dir);
  fs::path out(o.common.out_dir);

  std::string csv = hosim::kSweepCsvHeader;
  for (const auto& r : good) csv += hosim::format_sweep_row(r);
  hosim::atomic_write(out / "sweep.csv", csv);

  // per-(algorithm, speed) bar-chart data, one file per panel
  for (hosim::Algo a : grid.algorithms) {
    for (double speed : grid.speeds_kmh) {
      std::string data = "# hom_db ttt_or_factor optimize_ratio\n";
      for (const auto& r : good) {
        if (r.algo != a || r.speed_kmh != speed) continue;
        data += hosim::fmt_g(r.hom_db) + " " + hosim::fmt_g(r.second) + " " +
                hosim::fmt_g(r.ratio) + "\n";
      }
      char name[64];
      std::snprintf(name, sizeof(name), "bars_%s_%gkmh.dat", hosim::algo_name(a), speed);
      hosim::atomic_write(out / name, data);
    }
  }

  std::vector<hosim::SweepRow> optima = hosim::select_optimum(good);
  json jopt = json::array();
  for (const auto& r : optima) {
    jopt.push_back({{"algorithm", hosim::algo_name(r.algo)},
                    {"speed_kmh", r.speed_kmh},
                    {"hom_db", r.hom_db},
                    {"ttt_or_factor", r.second},
                    {"st_bps", r.st_bps},
                    {"anoh", r.anoh},
                    {"optimize_ratio", r.ratio}});
  }
  json doc;
  doc["optima"] = jopt;
  doc["metadata"] = metadata_json(cfg, table, seeds);
  doc["points_total"] = points.size();
  doc["points_failed"] = failed;
  hosim::atomic_write(out / "optima.json", doc.dump(2) + "\n");

  std::printf("sweep: %zu points, %zu failed, %zu optima -> %s\n", points.size(),
              failed, optima.size(), out.string().c_str());
  return 0;
}

struct CompareCmdOpts {
  CommonOpts common;
  std::string optima_path;
  std::vector<std::string> params;  // algo:speed:hom:second overrides
};

int cmd_compare(const CompareCmdOpts& o) {
  hosim::ScenarioConfig cfg = load_config(o.common);
  if (o.common.sim_time_ms < 0) cfg.sim_time_ms = 10000;
  hosim::CqiTable table = load_table(o.common);
  std::vector<std::uint64_t> seeds = o.common.seeds;
  if (seeds.empty()) seeds = {1, 2, 3, 4, 5};

  struct Point {
    hosim::Algo algo;
    double speed;
    double hom;
    double second;
    hosim::RunMetrics mean;
  };
  std::vector<Point> pts;
  if (!o.optima_path.empty()) {
    std::ifstream in(o.optima_path);
    if (!in) throw hosim::IoError("cannot open file '" + o.optima_path + "'");
    json doc = json::parse(in);
    for (const auto& e : doc.at("optima")) {
      pts.push_back({hosim::parse_algo(e.at("algorithm").get<std::string>()),
                     e.at("speed_kmh").get<double>(), e.at("hom_db").get<double>(),
                     e.at("ttt_or_factor").get<double>(), {}});
    }
  }
  for (const std::string& s : o.params) {
    std::stringstream ss(s);
    std::string algo, speed, hom, second, extra;
    if (!std::getline(ss, algo, ':') || !std::getline(ss, speed, ':') ||
        !std::getline(ss, hom, ':') || !std::getline(ss, second, ':') ||
        std::getline(ss, extra, ':'))
      throw hosim::ConfigError("--params wants algo:speed:hom:ttt_or_factor");
    Point p{hosim::parse_algo(algo), hosim::detail::parse_double("speed", speed),
            hosim::detail::parse_double("hom", hom),
            hosim::detail::parse_double("second", second), {}};
    std::erase_if(pts, [&](const Point& q) {
      return q.algo == p.algo && q.speed == p.speed;
    });
    pts.push_back(p);
  }
  if (pts.empty())
    throw hosim::ConfigError("compare wants --optima file or --params entries");
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
    return std::make_pair(static_cast<int>(a.algo), a.speed) <
           std::make_pair(static_cast<int>(b.algo), b.speed);
  });

  for (auto& p : pts) {
    hosim::PolicyParams pol;
    pol.algo = p.algo;
    pol.hom_db = p.hom;
    if (hosim::algo_uses_ttt(p.algo))
      pol.ttt_ms = p.second;
    else
      pol.factor = p.second;
    std::vector<hosim::RunMetrics> per_seed;
    for (std::uint64_t seed : seeds) {
      hosim::ScenarioConfig c = cfg;
      c.ue_speed_kmh = p.speed;
      c.seed = seed;
      per_seed.push_back(hosim::run(c, pol, table).metrics);
    }
    p.mean = mean_metrics(per_seed);
  }

  fs::create_directories(o.common.out_dir);
  fs::path out(o.common.out_dir);

  std::string csv =
      "algorithm,speed_kmh,hom_db,ttt_or_factor,ho_avg,total_throughput_bps,"
      "total_delay_ms\n";
  struct Sum {
    double anoh = 0, st = 0, delay = 0;
  };
  std::map<int, Sum> sums;
  for (const auto& p : pts) {
    std::ostringstream row;
    row << hosim::algo_name(p.algo) << ',' << hosim::fmt_g(p.speed) << ','
        << hosim::fmt_g(p.hom) << ',' << hosim::fmt_g(p.second) << ','
        << hosim::fmt_g(p.mean.ho_avg) << ','
        << hosim::fmt_g(p.mean.total_throughput_bps) << ','
        << hosim::fmt_g(p.mean.total_delay_ms) << '\n';
    csv += row.str();
    Sum& s = sums[static_cast<int>(p.algo)];
    s.anoh += p.mean.ho_avg;
    s.st += p.mean.total_throughput_bps;
    s.delay += p.mean.total_delay_ms;
  }
  for (const auto& [algo, s] : sums) {
    std::ostringstream row;
    row << hosim::algo_name(static_cast<hosim::Algo>(algo)) << ",sum,,,"
        << hosim::fmt_g(s.anoh) << ',' << hosim::fmt_g(s.st) << ','
        << hosim::fmt_g(s.delay) << '\n';
    csv += row.str();
  }
  hosim::atomic_write(out / "compare.csv", csv);

  json doc;
  json rows = json::array();
  for (const auto& p : pts) {
    rows.push_back({{"algorithm", hosim::algo_name(p.algo)},
                    {"speed_kmh", p.speed},
                    {"hom_db", p.hom},
                    {"ttt_or_factor", p.second},
                    {"ho_avg", p.mean.ho_avg},
                    {"total_throughput_bps", p.mean.total_throughput_bps},
                    {"total_delay_ms", p.mean.total_delay_ms}});
  }
  doc["rows"] = rows;
  json jsums = json::object();
  for (const auto& [algo, s] : sums) {
    jsums[hosim::algo_name(static_cast<hosim::Algo>(algo))] = {
        {"anoh", s.anoh}, {"st_bps", s.st}, {"delay_ms", s.delay}};
  }
  doc["sums"] = jsums;
  if (sums.count(4)) {
    json imp = json::object();
    const Sum& h4 = sums.at(4);
    for (const auto& [algo, s] : sums) {
      if (algo == 4) continue;
      imp[hosim::algo_name(static_cast<hosim::Algo>(algo))] = {
          {"delay_reduction_pct", s.delay > 0 ? (s.delay - h4.delay) / s.delay * 100.0 : 0.0},
          {"throughput_gain_pct", s.st > 0 ? (h4.st - s.st) / s.st * 100.0 : 0.0}};
    }
    doc["hoa4_improvement"] = imp;
  }
  doc["metadata"] = metadata_json(cfg, table, seeds);
  hosim::atomic_write(out / "compare_summary.json", doc.dump(2) + "\n");

  for (const auto& [algo, s] : sums)
    std::printf("%s: sum anoh %.4f /ue/s, sum throughput %.4f Mbps, sum delay %.2f ms\n",
                hosim::algo_name(static_cast<hosim::Algo>(algo)), s.anoh, s.st / 1e6,
                s.delay);
  return 0;
}

struct ReplayCmdOpts {
  std::string trace_path;
  std::string out_dir = ".";
};

int cmd_replay(const ReplayCmdOpts& o) {
  hosim::RunTrace tr = hosim::read_run_trace(o.trace_path);
  hosim::RunMetrics m = hosim::compute_metrics(tr);
  fs::create_directories(o.out_dir);
  json doc;
  doc["source_trace"] = o.trace_path;
  doc["metrics"] = metrics_json(m);
  hosim::atomic_write(fs::path(o.out_dir) / "replay_metrics.json", doc.dump(2) + "\n");
  std::printf("replay %s: ho_avg %.4f /ue/s, throughput %.4f Mbps, delay %.2f ms\n",
              o.trace_path.c_str(), m.ho_avg, m.total_throughput_bps / 1e6,
              m.total_delay_ms);
  return 0;
}

int cmd_oracle() {
  auto results = hosim::run_oracles();
  bool all = true;
  for (const auto& r : results) {
    std::printf("[%s] %s: %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                r.detail.c_str());
    all = all && r.pass;
  }
  return all ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LTE downlink handover simulator"};
  app.require_subcommand(1);

  RunCmdOpts run_opts;
  CLI::App* runc = app.add_subcommand("run", "single scenario run");
  add_common(runc, run_opts.common);
  runc->add_option("--algo", run_opts.algo, "hoa1|hoa2|hoa3|hoa4")->required();
  runc->add_option("--hom", run_opts.hom_db, "handover margin in dB");
  runc->add_option("--ttt", run_opts.ttt_ms, "time-to-trigger in ms (hoa1/hoa4)");
  runc->add_option("--alpha", run_opts.alpha, "hoa3 filter factor");
  runc->add_option("--beta", run_opts.beta, "hoa2 filter factor");
  runc->add_option("--speed", run_opts.speed_kmh, "UE speed in km/h");
  runc->add_flag("--dump-channel-trace", run_opts.dump_channel);
  runc->add_flag("--dump-ho-events", run_opts.dump_ho);
  runc->add_flag("--dump-run-trace", run_opts.dump_run_trace);

  SweepCmdOpts sweep_opts;
  CLI::App* sweepc = app.add_subcommand("sweep", "parameter grid sweep");
  add_common(sweepc, sweep_opts.common);
  sweepc->add_option("--grid", sweep_opts.grid_path, "grid file (key = value lists)");

  CompareCmdOpts cmp_opts;
  CLI::App* cmpc = app.add_subcommand("compare", "evaluate algorithms at chosen parameters");
  add_common(cmpc, cmp_opts.common);
  cmpc->add_option("--optima", cmp_opts.optima_path, "optima.json from a sweep");
  cmpc->add_option("--params", cmp_opts.params,
                   "explicit point algo:speed:hom:ttt_or_factor (repeatable)");

  ReplayCmdOpts replay_opts;
  CLI::App* replayc = app.add_subcommand("replay", "recompute metrics from a stored run trace");
  replayc->add_option("--trace", replay_opts.trace_path, "run trace file")->required();
  replayc->add_option("--out", replay_opts.out_dir, "output directory");

  CLI::App* oraclec = app.add_subcommand("oracle", "run desk-check oracles");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (runc->parsed()) return cmd_run(run_opts);
    if (sweepc->parsed()) return cmd_sweep(sweep_opts);
    if (cmpc->parsed()) return cmd_compare(cmp_opts);
    if (replayc->parsed()) return cmd_replay(replay_opts);
    if (oraclec->parsed()) return cmd_oracle();
  } catch (const hosim::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const hosim::IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 3;
  }
  return 1;
}
