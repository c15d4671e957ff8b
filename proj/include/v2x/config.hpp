#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace v2x {

enum class Mode { proposed, baseline1, baseline2 };

std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

/// Raised when a SimConfig fails validation; names the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct SimConfig {
  int scenario_id = 3;        // inter-vehicle spacing class {1,2,3}
  Mode mode = Mode::proposed;
  double sigma_m = 5.0;       // clustering neighborhood size
  int duration_tti = 10000;
  int warmup_tti = 500;       // excluded from all metric distributions
  int reslice_period_tti = 100;
  std::uint64_t seed = 1;
  double highway_length_m = 3464.0;  // 2 x inter-RSU by default, wrap-around
  int n_rsu = 2;
  double offload_threshold_db = 0.0;  // baseline2 only
  std::string output_dir = "out";

  // Model knobs (defaults are declared choices, overridable per run).
  double video_fraction = 1.0;       // fraction of vehicles that stream video
  bool squared_similarity = true;    // Gaussian kernel on squared distance
  double noise_figure_db = 9.0;
  double shadowing_std_v2i_db = 8.0;
  double shadowing_std_v2v_db = 3.0;
  double pf_beta = 0.01;
  int n_prb = 50;                    // per pool (RSU and SL pools equal)
  int harq_max_attempts = 4;
  double rsu_tx_power_dbm = 46.0;
  double sl_tx_power_dbm = 20.0;
  int interference_neighbors = 8;    // strongest co-channel nodes modelled
  bool dump_topology = false;        // per-epoch cluster/leader CSV dump

  /// Throws ConfigError naming the first offending field.
  void validate() const;
};

/// Parses a flat `key = value` file ('#' starts a comment). Unknown keys and
/// malformed values raise ConfigError. Missing file raises ConfigError naming
/// the path.
SimConfig parse_config_file(const std::string& path, SimConfig base = {});

/// Applies one `key = value` assignment (shared by file parser and CLI).
void apply_config_kv(SimConfig& cfg, const std::string& key, const std::string& value);

}  // namespace v2x
