#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace v2x {

enum class Slice { autonomous, infotainment };

std::string to_string(Slice s);

/// Empirical CDF at the sorted sample points: (value, P[X <= value]).
std::vector<std::pair<double, double>> cdf(std::vector<double> samples);

/// Exceedance curve at the sorted sample points: (value, P[X > value]).
std::vector<std::pair<double, double>> ccdf(std::vector<double> samples);

struct SliceAccumulator {
  std::map<int, std::uint64_t> latency_ms_hist;        // per delivered packet
  std::map<int, std::uint64_t> queue_len_pkts_hist;    // per (queue, TTI)
  std::map<long long, std::uint64_t> queue_len_bits_hist;
  std::vector<double> throughput_bps;                  // per vehicle, run average
  std::uint64_t delivered_packets = 0;
  std::uint64_t dropped_packets = 0;
  // Conservation ledger over the full run (warm-up included).
  long long arrived_bits = 0;
  long long departed_bits = 0;
  long long dropped_bits = 0;
  long long flushed_bits = 0;   // ownership handovers, excluded from samples
  long long residual_bits = 0;  // left in queues at end of run
};

struct RunInfo {
  int scenario_id = 0;
  std::string mode;
  double sigma_m = 0.0;
  std::uint64_t seed = 0;
  int duration_tti = 0;
  int warmup_tti = 0;
};

struct MetricsReport {
  RunInfo run;
  SliceAccumulator autonomous;
  SliceAccumulator infotainment;
  std::vector<double> leaders_per_km_epochs;  // one entry per post-warm-up epoch
  int merged_cluster_warnings = 0;
  int rsu_fallback_warnings = 0;
  int offload_no_relay_warnings = 0;

  SliceAccumulator& slice(Slice s) { return s == Slice::autonomous ? autonomous : infotainment; }
  const SliceAccumulator& slice(Slice s) const {
    return s == Slice::autonomous ? autonomous : infotainment;
  }

  std::string to_json() const;
  static MetricsReport from_json(const std::string& text);

  /// Writes cdf_throughput_<slice>.csv, ccdf_latency_<slice>.csv,
  /// cdf_queuelen_<slice>.csv (packet units), cdf_queuelen_bits_<slice>.csv
  /// and summary.csv under dir.
  void write_csvs(const std::string& dir) const;

  bool operator==(const MetricsReport&) const = default;
};

inline bool operator==(const SliceAccumulator& a, const SliceAccumulator& b) {
  return a.latency_ms_hist == b.latency_ms_hist &&
         a.queue_len_pkts_hist == b.queue_len_pkts_hist &&
         a.queue_len_bits_hist == b.queue_len_bits_hist &&
         a.throughput_bps == b.throughput_bps && a.delivered_packets == b.delivered_packets &&
         a.dropped_packets == b.dropped_packets && a.arrived_bits == b.arrived_bits &&
         a.departed_bits == b.departed_bits && a.dropped_bits == b.dropped_bits &&
         a.flushed_bits == b.flushed_bits && a.residual_bits == b.residual_bits;
}

inline bool operator==(const RunInfo& a, const RunInfo& b) {
  return a.scenario_id == b.scenario_id && a.mode == b.mode && a.sigma_m == b.sigma_m &&
         a.seed == b.seed && a.duration_tti == b.duration_tti && a.warmup_tti == b.warmup_tti;
}

/// Summary statistics behind Figs. 4-9 style comparisons.
struct Summary {
  double mean_latency_autonomous_ms = 0.0;
  double p99_latency_autonomous_ms = 0.0;
  double mean_latency_infotainment_ms = 0.0;
  double p99_latency_infotainment_ms = 0.0;
  double mean_queue_len_autonomous_pkts = 0.0;
  double mean_queue_len_infotainment_pkts = 0.0;
  double mean_leaders_per_km = 0.0;
  double frac_vehicles_ge_128kbps = 0.0;      // autonomous slice target
  double frac_safety_within_100ms = 0.0;      // ETSI latency budget
  double packet_failure_ratio_autonomous = 0.0;
  double packet_failure_ratio_infotainment = 0.0;
  bool reliability_target_met = false;        // failure ratio <= 1e-5
  double mean_throughput_autonomous_bps = 0.0;
  double mean_throughput_infotainment_bps = 0.0;
};

Summary summarize(const MetricsReport& report);

std::string summary_csv_header();
std::string summary_csv_row(const RunInfo& run, const Summary& s,
                            int merged_warnings, int rsu_fallback_warnings,
                            int offload_warnings);

}  // namespace v2x
