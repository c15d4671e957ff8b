#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "v2x/metrics.hpp"
#include "v2x/sim.hpp"

namespace {

constexpr const char* kVersion = "v2xsim 0.1.0";

struct CliOverrides {
  std::optional<std::string> config_path;
  std::optional<int> scenario;
  std::optional<std::string> mode;
  std::optional<double> sigma_m;
  std::optional<std::uint64_t> seed;
  std::optional<int> duration_tti;
  std::optional<int> warmup_tti;
  std::optional<int> reslice_period_tti;
  std::optional<std::string> out_dir;
  std::optional<double> offload_threshold_db;
  std::optional<double> video_fraction;
  std::optional<int> n_rsu;
  std::optional<double> highway_length_m;
  int squared_similarity = -1;  // -1 unset, else 0/1
  bool dump_topology = false;
  std::vector<std::string> kv_overrides;  // --set key=value, any config key
};

void add_common_flags(CLI::App* cmd, CliOverrides& o) {
  cmd->add_option("--config", o.config_path, "flat key = value config file");
  cmd->add_option("--scenario", o.scenario, "inter-vehicle spacing class {1|2|3}");
  cmd->add_option("--mode", o.mode, "proposed|baseline1|baseline2");
  cmd->add_option("--sigma-m", o.sigma_m, "clustering neighborhood size in meters");
  cmd->add_option("--seed", o.seed, "run seed");
  cmd->add_option("--duration-tti", o.duration_tti, "run length in 1 ms TTIs");
  cmd->add_option("--warmup-tti", o.warmup_tti, "TTIs excluded from metrics");
  cmd->add_option("--reslice-period-tti", o.reslice_period_tti, "re-slice period");
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_option("--offload-threshold-db", o.offload_threshold_db,
                  "baseline2 offload SINR threshold");
  cmd->add_option("--video-fraction", o.video_fraction, "fraction of video-capable vehicles");
  cmd->add_option("--n-rsu", o.n_rsu, "number of RSUs");
  cmd->add_option("--highway-length-m", o.highway_length_m, "wrap-around stretch length");
  cmd->add_flag("--squared-similarity,!--unsquared-similarity",
                [&o](std::int64_t count) { o.squared_similarity = count > 0 ? 1 : 0; },
                "Gaussian kernel on squared distance (default on)");
  cmd->add_flag("--dump-topology", o.dump_topology, "write per-epoch cluster/leader CSVs");
  cmd->add_option("--set", o.kv_overrides,
                  "override any config key, e.g. --set pf_beta=0.02 (applied before "
                  "named flags)");
}

v2x::SimConfig build_config(const CliOverrides& o) {
  v2x::SimConfig cfg;
  if (o.config_path) cfg = v2x::parse_config_file(*o.config_path, cfg);
  for (const auto& kv : o.kv_overrides) {
    auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw v2x::ConfigError("set", "expected key=value, got '" + kv + "'");
    v2x::apply_config_kv(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (o.scenario) cfg.scenario_id = *o.scenario;
  if (o.mode) cfg.mode = v2x::mode_from_string(*o.mode);
  if (o.sigma_m) cfg.sigma_m = *o.sigma_m;
  if (o.seed) cfg.seed = *o.seed;
  if (o.duration_tti) cfg.duration_tti = *o.duration_tti;
  if (o.warmup_tti) cfg.warmup_tti = *o.warmup_tti;
  if (o.reslice_period_tti) cfg.reslice_period_tti = *o.reslice_period_tti;
  if (o.out_dir) cfg.output_dir = *o.out_dir;
  if (o.offload_threshold_db) cfg.offload_threshold_db = *o.offload_threshold_db;
  if (o.video_fraction) cfg.video_fraction = *o.video_fraction;
  if (o.n_rsu) cfg.n_rsu = *o.n_rsu;
  if (o.highway_length_m) cfg.highway_length_m = *o.highway_length_m;
  if (o.squared_similarity >= 0) cfg.squared_similarity = o.squared_similarity == 1;
  if (o.dump_topology) cfg.dump_topology = true;
  cfg.validate();
  return cfg;
}

nlohmann::json config_to_json(const v2x::SimConfig& c) {
  return nlohmann::json{{"scenario", c.scenario_id},
                        {"mode", v2x::to_string(c.mode)},
                        {"sigma_m", c.sigma_m},
                        {"duration_tti", c.duration_tti},
                        {"warmup_tti", c.warmup_tti},
                        {"reslice_period_tti", c.reslice_period_tti},
                        {"seed", c.seed},
                        {"highway_length_m", c.highway_length_m},
                        {"n_rsu", c.n_rsu},
                        {"offload_threshold_db", c.offload_threshold_db},
                        {"output_dir", c.output_dir},
                        {"video_fraction", c.video_fraction},
                        {"squared_similarity", c.squared_similarity},
                        {"noise_figure_db", c.noise_figure_db},
                        {"shadowing_std_v2i_db", c.shadowing_std_v2i_db},
                        {"shadowing_std_v2v_db", c.shadowing_std_v2v_db},
                        {"pf_beta", c.pf_beta},
                        {"n_prb", c.n_prb},
                        {"harq_max_attempts", c.harq_max_attempts},
                        {"rsu_tx_power_dbm", c.rsu_tx_power_dbm},
                        {"sl_tx_power_dbm", c.sl_tx_power_dbm},
                        {"interference_neighbors", c.interference_neighbors},
                        {"dump_topology", c.dump_topology}};
}

v2x::MetricsReport execute_run(const v2x::SimConfig& cfg) {
  auto report = v2x::run_simulation(cfg);
  std::filesystem::create_directories(cfg.output_dir);
  report.write_csvs(cfg.output_dir);
  std::ofstream manifest(cfg.output_dir + "/manifest.json");
  manifest << nlohmann::json{{"version", kVersion}, {"config", config_to_json(cfg)}}.dump(2)
           << "\n";
  std::ofstream rep(cfg.output_dir + "/report.json");
  rep << report.to_json() << "\n";
  return report;
}

int thread_cap() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("V2XSIM_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) hw = std::min(hw, static_cast<unsigned>(v));
  }
  return static_cast<int>(hw);
}

/// Runs the given configs concurrently (one state per cell), bounded by
/// V2XSIM_THREADS; results land in per-cell directories only.
std::vector<v2x::MetricsReport> run_cells(const std::vector<v2x::SimConfig>& cells) {
  std::vector<v2x::MetricsReport> reports(cells.size());
  std::atomic<size_t> next{0};
  std::mutex fail_mutex;
  std::vector<std::string> failures;
  int workers = std::min<int>(thread_cap(), static_cast<int>(cells.size()));
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        size_t i = next.fetch_add(1);
        if (i >= cells.size()) return;
        try {
          reports[i] = execute_run(cells[i]);
        } catch (const std::exception& e) {
          std::scoped_lock lock(fail_mutex);
          failures.push_back(cells[i].output_dir + ": " + e.what());
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (!failures.empty()) {
    std::string msg;
    for (const auto& f : failures) msg += f + "\n";
    throw std::runtime_error(msg);
  }
  return reports;
}

template <typename T>
std::vector<T> parse_list(const std::vector<std::string>& items, const std::string& what) {
  std::vector<T> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) continue;
      std::stringstream conv(tok);
      T v{};
      conv >> v;
      if (conv.fail()) throw v2x::ConfigError(what, "malformed list item '" + tok + "'");
      out.push_back(v);
    }
  }
  if (out.empty()) throw v2x::ConfigError(what, "empty list");
  return out;
}

std::string sigma_tag(double sigma) {
  std::ostringstream os;
  os << sigma;
  return os.str();
}

int cmd_run(const CliOverrides& o) {
  auto cfg = build_config(o);
  execute_run(cfg);
  std::cout << "run complete: " << cfg.output_dir << "\n";
  return 0;
}

int cmd_sweep(const CliOverrides& o, const std::vector<std::string>& scenarios,
              const std::vector<std::string>& modes, const std::vector<std::string>& sigmas,
              const std::vector<std::string>& seeds) {
  auto base = build_config(o);
  auto scen_list = parse_list<int>(scenarios, "scenarios");
  auto mode_names = parse_list<std::string>(modes, "modes");
  auto sigma_list = parse_list<double>(sigmas, "sigmas");
  auto seed_list = parse_list<std::uint64_t>(seeds, "seeds");
  std::vector<v2x::SimConfig> cells;
  for (int s : scen_list)
    for (const auto& m : mode_names)
      for (double sg : sigma_list)
        for (auto seed : seed_list) {
          v2x::SimConfig c = base;
          c.scenario_id = s;
          c.mode = v2x::mode_from_string(m);
          c.sigma_m = sg;
          c.seed = seed;
          c.output_dir = base.output_dir + "/scen" + std::to_string(s) + "_" + m + "_sigma" +
                         sigma_tag(sg) + "_seed" + std::to_string(seed);
          c.validate();
          cells.push_back(std::move(c));
        }
  run_cells(cells);
  std::cout << "sweep complete: " << cells.size() << " cells under " << base.output_dir << "\n";
  return 0;
}

int cmd_compare(const CliOverrides& o, const std::vector<std::string>& modes,
                const std::vector<std::string>& seeds) {
  auto base = build_config(o);
  auto mode_names = parse_list<std::string>(modes, "modes");
  if (mode_names.size() < 2) throw v2x::ConfigError("modes", "compare needs at least 2 modes");
  for (size_t i = 0; i < mode_names.size(); ++i)
    for (size_t j = i + 1; j < mode_names.size(); ++j)
      if (mode_names[i] == mode_names[j])
        throw v2x::ConfigError("modes", "duplicate mode '" + mode_names[i] + "'");
  auto seed_list = parse_list<std::uint64_t>(seeds, "seeds");

  std::vector<v2x::SimConfig> cells;
  for (const auto& m : mode_names)
    for (auto seed : seed_list) {
      v2x::SimConfig c = base;
      c.mode = v2x::mode_from_string(m);
      c.seed = seed;
      c.output_dir = base.output_dir + "/" + m + "_seed" + std::to_string(seed);
      c.validate();
      cells.push_back(std::move(c));
    }
  auto reports = run_cells(cells);

  std::map<std::pair<std::string, std::uint64_t>, v2x::Summary> summaries;
  for (size_t i = 0; i < cells.size(); ++i)
    summaries[{v2x::to_string(cells[i].mode), cells[i].seed}] = v2x::summarize(reports[i]);

  std::filesystem::create_directories(base.output_dir);
  std::ofstream csv(base.output_dir + "/comparison.csv");
  csv << "seed";
  for (const auto& m : mode_names)
    csv << "," << m << "_mean_latency_autonomous_ms"
        << "," << m << "_mean_latency_infotainment_ms"
        << "," << m << "_mean_throughput_autonomous_bps"
        << "," << m << "_mean_throughput_infotainment_bps"
        << "," << m << "_frac_vehicles_ge_128kbps"
        << "," << m << "_packet_failure_ratio_autonomous";
  csv << ",latency_ordering_pass,throughput_ordering_pass\n";

  auto get = [&](const std::string& m, std::uint64_t seed) -> const v2x::Summary& {
    return summaries.at({m, seed});
  };
  auto mode_present = [&](const std::string& m) {
    return std::find(mode_names.begin(), mode_names.end(), m) != mode_names.end();
  };

  int ordering_failures = 0;
  for (auto seed : seed_list) {
    csv << seed;
    for (const auto& m : mode_names) {
      const auto& s = get(m, seed);
      csv << "," << s.mean_latency_autonomous_ms << "," << s.mean_latency_infotainment_ms << ","
          << s.mean_throughput_autonomous_bps << "," << s.mean_throughput_infotainment_bps << ","
          << s.frac_vehicles_ge_128kbps << "," << s.packet_failure_ratio_autonomous;
    }
    // Expected orderings: autonomous latency proposed <= baseline2 <= baseline1,
    // infotainment throughput baseline1 <= proposed <= baseline2.
    bool lat_ok = true, thr_ok = true;
    auto check_le = [&](const std::string& lo, const std::string& hi, bool latency) {
      if (!mode_present(lo) || !mode_present(hi)) return;
      if (latency) {
        if (get(lo, seed).mean_latency_autonomous_ms > get(hi, seed).mean_latency_autonomous_ms)
          lat_ok = false;
      } else {
        if (get(lo, seed).mean_throughput_infotainment_bps >
            get(hi, seed).mean_throughput_infotainment_bps)
          thr_ok = false;
      }
    };
    check_le("proposed", "baseline2", true);
    check_le("baseline2", "baseline1", true);
    check_le("baseline1", "proposed", false);
    check_le("proposed", "baseline2", false);
    csv << "," << (lat_ok ? 1 : 0) << "," << (thr_ok ? 1 : 0) << "\n";
    if (!lat_ok || !thr_ok) {
      ++ordering_failures;
      std::cerr << "seed " << seed << ": ordering check failed (latency "
                << (lat_ok ? "ok" : "FAIL") << ", throughput " << (thr_ok ? "ok" : "FAIL")
                << ")\n";
    }
  }
  std::cout << "compare complete: " << cells.size() << " runs, " << ordering_failures
            << " seeds with ordering failures\n";
  return 0;  // ordering failures are reported, not fatal
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Network-sliced vehicular downlink simulator"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CliOverrides run_o, sweep_o, compare_o;
  std::vector<std::string> sweep_scenarios, sweep_modes, sweep_sigmas, sweep_seeds;
  std::vector<std::string> compare_modes, compare_seeds;

  auto* run_cmd = app.add_subcommand("run", "execute a single simulation run");
  add_common_flags(run_cmd, run_o);

  auto* sweep_cmd = app.add_subcommand("sweep", "scenario x mode x sigma x seed grid");
  add_common_flags(sweep_cmd, sweep_o);
  sweep_cmd->add_option("--scenarios", sweep_scenarios, "comma-separated scenario list")
      ->required();
  sweep_cmd->add_option("--modes", sweep_modes, "comma-separated mode list")->required();
  sweep_cmd->add_option("--sigmas", sweep_sigmas, "comma-separated sigma list")->required();
  sweep_cmd->add_option("--seeds", sweep_seeds, "comma-separated seed list")->required();

  auto* compare_cmd = app.add_subcommand("compare", "run modes over a shared seed set");
  add_common_flags(compare_cmd, compare_o);
  compare_cmd->add_option("--modes", compare_modes, "modes to compare")->required();
  compare_cmd->add_option("--seeds", compare_seeds, "shared seed list")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(run_o);
    if (sweep_cmd->parsed())
      return cmd_sweep(sweep_o, sweep_scenarios, sweep_modes, sweep_sigmas, sweep_seeds);
    if (compare_cmd->parsed()) return cmd_compare(compare_o, compare_modes, compare_seeds);
  } catch (const v2x::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
