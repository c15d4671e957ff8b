#include "v2x/config.hpp"

#include <fstream>
#include <sstream>

namespace v2x {

std::string to_string(Mode m) {
  switch (m) {
    case Mode::proposed: return "proposed";
    case Mode::baseline1: return "baseline1";
    case Mode::baseline2: return "baseline2";
  }
  return "?";
}

Mode mode_from_string(const std::string& s) {
  if (s == "proposed") return Mode::proposed;
  if (s == "baseline1") return Mode::baseline1;
  if (s == "baseline2") return Mode::baseline2;
  throw ConfigError("mode", "must be one of proposed|baseline1|baseline2, got '" + s + "'");
}

void SimConfig::validate() const {
  if (scenario_id < 1 || scenario_id > 3)
    throw ConfigError("scenario", "must be 1, 2 or 3");
  if (!(sigma_m > 0.0)) throw ConfigError("sigma_m", "must be > 0");
  if (duration_tti <= 0) throw ConfigError("duration_tti", "must be a positive integer");
  if (reslice_period_tti <= 0) throw ConfigError("reslice_period_tti", "must be a positive integer");
  if (duration_tti < reslice_period_tti)
    throw ConfigError("duration_tti", "must be >= reslice_period_tti");
  if (warmup_tti < 0) throw ConfigError("warmup_tti", "must be >= 0");
  if (warmup_tti >= duration_tti) throw ConfigError("warmup_tti", "must be < duration_tti");
  if (!(highway_length_m > 0.0)) throw ConfigError("highway_length_m", "must be > 0");
  if (n_rsu < 1) throw ConfigError("n_rsu", "must be >= 1");
  if (1732.0 * n_rsu > highway_length_m + 1e-9)
    throw ConfigError("n_rsu", "n_rsu * 1732 m exceeds highway_length_m");
  if (video_fraction < 0.0 || video_fraction > 1.0)
    throw ConfigError("video_fraction", "must be in [0, 1]");
  if (!(pf_beta > 0.0 && pf_beta < 1.0)) throw ConfigError("pf_beta", "must be in (0, 1)");
  if (n_prb < 1) throw ConfigError("n_prb", "must be >= 1");
  if (harq_max_attempts < 1) throw ConfigError("harq_max_attempts", "must be >= 1");
  if (interference_neighbors < 0)
    throw ConfigError("interference_neighbors", "must be >= 0");
}

namespace {

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key, "expected a boolean, got '" + v + "'");
}

template <typename T>
T parse_num(const std::string& key, const std::string& v) {
  std::istringstream is(v);
  T out{};
  is >> out;
  if (is.fail() || !(is >> std::ws).eof())
    throw ConfigError(key, "malformed value '" + v + "'");
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

}  // namespace

void apply_config_kv(SimConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "scenario") cfg.scenario_id = parse_num<int>(key, value);
  else if (key == "mode") cfg.mode = mode_from_string(value);
  else if (key == "sigma_m") cfg.sigma_m = parse_num<double>(key, value);
  else if (key == "duration_tti") cfg.duration_tti = parse_num<int>(key, value);
  else if (key == "warmup_tti") cfg.warmup_tti = parse_num<int>(key, value);
  else if (key == "reslice_period_tti") cfg.reslice_period_tti = parse_num<int>(key, value);
  else if (key == "seed") cfg.seed = parse_num<std::uint64_t>(key, value);
  else if (key == "highway_length_m") cfg.highway_length_m = parse_num<double>(key, value);
  else if (key == "n_rsu") cfg.n_rsu = parse_num<int>(key, value);
  else if (key == "offload_threshold_db") cfg.offload_threshold_db = parse_num<double>(key, value);
  else if (key == "output_dir") cfg.output_dir = value;
  else if (key == "video_fraction") cfg.video_fraction = parse_num<double>(key, value);
  else if (key == "squared_similarity") cfg.squared_similarity = parse_bool(key, value);
  else if (key == "noise_figure_db") cfg.noise_figure_db = parse_num<double>(key, value);
  else if (key == "shadowing_std_v2i_db") cfg.shadowing_std_v2i_db = parse_num<double>(key, value);
  else if (key == "shadowing_std_v2v_db") cfg.shadowing_std_v2v_db = parse_num<double>(key, value);
  else if (key == "pf_beta") cfg.pf_beta = parse_num<double>(key, value);
  else if (key == "n_prb") cfg.n_prb = parse_num<int>(key, value);
  else if (key == "harq_max_attempts") cfg.harq_max_attempts = parse_num<int>(key, value);
  else if (key == "rsu_tx_power_dbm") cfg.rsu_tx_power_dbm = parse_num<double>(key, value);
  else if (key == "sl_tx_power_dbm") cfg.sl_tx_power_dbm = parse_num<double>(key, value);
  else if (key == "interference_neighbors") cfg.interference_neighbors = parse_num<int>(key, value);
  else if (key == "dump_topology") cfg.dump_topology = parse_bool(key, value);
  else throw ConfigError(key, "unknown configuration key");
}

SimConfig parse_config_file(const std::string& path, SimConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open config file '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config", "line " + std::to_string(lineno) + ": expected key = value");
    apply_config_kv(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

}  // namespace v2x
