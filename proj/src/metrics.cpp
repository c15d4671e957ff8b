#include "v2x/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace v2x {

std::string to_string(Slice s) {
  return s == Slice::autonomous ? "autonomous" : "infotainment";
}

std::vector<std::pair<double, double>> cdf(std::vector<double> samples) {
  if (samples.empty()) throw std::invalid_argument("cdf: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  std::vector<std::pair<double, double>> out;
  for (size_t i = 0; i < samples.size(); ++i) {
    bool last_of_value = (i + 1 == samples.size()) || samples[i + 1] != samples[i];
    if (last_of_value) out.emplace_back(samples[i], static_cast<double>(i + 1) / n);
  }
  return out;
}

std::vector<std::pair<double, double>> ccdf(std::vector<double> samples) {
  auto c = cdf(std::move(samples));
  for (auto& [v, p] : c) p = 1.0 - p;
  return c;
}

namespace {

using nlohmann::json;

json hist_to_json(const std::map<int, std::uint64_t>& h) {
  json out = json::array();
  for (auto [k, v] : h) out.push_back({k, v});
  return out;
}

json hist_to_json(const std::map<long long, std::uint64_t>& h) {
  json out = json::array();
  for (auto [k, v] : h) out.push_back({k, v});
  return out;
}

json slice_to_json(const SliceAccumulator& s) {
  return json{{"latency_ms_hist", hist_to_json(s.latency_ms_hist)},
              {"queue_len_pkts_hist", hist_to_json(s.queue_len_pkts_hist)},
              {"queue_len_bits_hist", hist_to_json(s.queue_len_bits_hist)},
              {"throughput_bps", s.throughput_bps},
              {"delivered_packets", s.delivered_packets},
              {"dropped_packets", s.dropped_packets},
              {"arrived_bits", s.arrived_bits},
              {"departed_bits", s.departed_bits},
              {"dropped_bits", s.dropped_bits},
              {"flushed_bits", s.flushed_bits},
              {"residual_bits", s.residual_bits}};
}

SliceAccumulator slice_from_json(const json& j) {
  SliceAccumulator s;
  for (const auto& kv : j.at("latency_ms_hist"))
    s.latency_ms_hist[kv.at(0).get<int>()] = kv.at(1).get<std::uint64_t>();
  for (const auto& kv : j.at("queue_len_pkts_hist"))
    s.queue_len_pkts_hist[kv.at(0).get<int>()] = kv.at(1).get<std::uint64_t>();
  for (const auto& kv : j.at("queue_len_bits_hist"))
    s.queue_len_bits_hist[kv.at(0).get<long long>()] = kv.at(1).get<std::uint64_t>();
  s.throughput_bps = j.at("throughput_bps").get<std::vector<double>>();
  s.delivered_packets = j.at("delivered_packets").get<std::uint64_t>();
  s.dropped_packets = j.at("dropped_packets").get<std::uint64_t>();
  s.arrived_bits = j.at("arrived_bits").get<long long>();
  s.departed_bits = j.at("departed_bits").get<long long>();
  s.dropped_bits = j.at("dropped_bits").get<long long>();
  s.flushed_bits = j.at("flushed_bits").get<long long>();
  s.residual_bits = j.at("residual_bits").get<long long>();
  return s;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

template <typename Hist>
std::vector<double> hist_samples(const Hist& h) {
  std::vector<double> out;
  for (auto [value, count] : h)
    for (std::uint64_t i = 0; i < count; ++i) out.push_back(static_cast<double>(value));
  return out;
}

template <typename Hist>
double hist_mean(const Hist& h) {
  double sum = 0.0;
  std::uint64_t n = 0;
  for (auto [value, count] : h) {
    sum += static_cast<double>(value) * static_cast<double>(count);
    n += count;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

template <typename Hist>
double hist_quantile(const Hist& h, double q) {
  std::uint64_t n = 0;
  for (auto [value, count] : h) n += count;
  if (n == 0) return 0.0;
  std::uint64_t target = static_cast<std::uint64_t>(std::ceil(q * static_cast<double>(n)));
  target = std::max<std::uint64_t>(target, 1);
  std::uint64_t seen = 0;
  for (auto [value, count] : h) {
    seen += count;
    if (seen >= target) return static_cast<double>(value);
  }
  return 0.0;
}

template <typename Hist>
double hist_frac_le(const Hist& h, double bound) {
  std::uint64_t n = 0, le = 0;
  for (auto [value, count] : h) {
    n += count;
    if (static_cast<double>(value) <= bound) le += count;
  }
  return n == 0 ? 0.0 : static_cast<double>(le) / static_cast<double>(n);
}

void write_dist_csv(const std::string& path, const std::string& header,
                    const std::vector<std::pair<double, double>>& rows) {
  std::ofstream out(path);
  out << header << "\n";
  for (const auto& [v, p] : rows) out << format_double(v) << "," << format_double(p) << "\n";
}

}  // namespace

std::string MetricsReport::to_json() const {
  json j{{"run",
          {{"scenario", run.scenario_id},
           {"mode", run.mode},
           {"sigma_m", run.sigma_m},
           {"seed", run.seed},
           {"duration_tti", run.duration_tti},
           {"warmup_tti", run.warmup_tti}}},
         {"autonomous", slice_to_json(autonomous)},
         {"infotainment", slice_to_json(infotainment)},
         {"leaders_per_km_epochs", leaders_per_km_epochs},
         {"merged_cluster_warnings", merged_cluster_warnings},
         {"rsu_fallback_warnings", rsu_fallback_warnings},
         {"offload_no_relay_warnings", offload_no_relay_warnings}};
  return j.dump(2);
}

MetricsReport MetricsReport::from_json(const std::string& text) {
  json j = json::parse(text);
  MetricsReport r;
  const auto& jr = j.at("run");
  r.run.scenario_id = jr.at("scenario").get<int>();
  r.run.mode = jr.at("mode").get<std::string>();
  r.run.sigma_m = jr.at("sigma_m").get<double>();
  r.run.seed = jr.at("seed").get<std::uint64_t>();
  r.run.duration_tti = jr.at("duration_tti").get<int>();
  r.run.warmup_tti = jr.at("warmup_tti").get<int>();
  r.autonomous = slice_from_json(j.at("autonomous"));
  r.infotainment = slice_from_json(j.at("infotainment"));
  r.leaders_per_km_epochs = j.at("leaders_per_km_epochs").get<std::vector<double>>();
  r.merged_cluster_warnings = j.at("merged_cluster_warnings").get<int>();
  r.rsu_fallback_warnings = j.at("rsu_fallback_warnings").get<int>();
  r.offload_no_relay_warnings = j.at("offload_no_relay_warnings").get<int>();
  return r;
}

void MetricsReport::write_csvs(const std::string& dir) const {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  for (Slice s : {Slice::autonomous, Slice::infotainment}) {
    const auto& acc = slice(s);
    const std::string suffix = to_string(s);
    if (!acc.throughput_bps.empty())
      write_dist_csv(dir + "/cdf_throughput_" + suffix + ".csv", "value_bps,prob",
                     cdf(acc.throughput_bps));
    else
      write_dist_csv(dir + "/cdf_throughput_" + suffix + ".csv", "value_bps,prob", {});
    auto latency = hist_samples(acc.latency_ms_hist);
    if (!latency.empty())
      write_dist_csv(dir + "/ccdf_latency_" + suffix + ".csv", "latency_ms,exceed_prob",
                     ccdf(latency));
    else
      write_dist_csv(dir + "/ccdf_latency_" + suffix + ".csv", "latency_ms,exceed_prob", {});
    auto qpkts = hist_samples(acc.queue_len_pkts_hist);
    if (!qpkts.empty())
      write_dist_csv(dir + "/cdf_queuelen_" + suffix + ".csv", "value_packets,prob", cdf(qpkts));
    else
      write_dist_csv(dir + "/cdf_queuelen_" + suffix + ".csv", "value_packets,prob", {});
    auto qbits = hist_samples(acc.queue_len_bits_hist);
    if (!qbits.empty())
      write_dist_csv(dir + "/cdf_queuelen_bits_" + suffix + ".csv", "value_bits,prob",
                     cdf(qbits));
    else
      write_dist_csv(dir + "/cdf_queuelen_bits_" + suffix + ".csv", "value_bits,prob", {});
  }
  Summary s = summarize(*this);
  std::ofstream out(dir + "/summary.csv");
  out << summary_csv_header() << "\n"
      << summary_csv_row(run, s, merged_cluster_warnings, rsu_fallback_warnings,
                         offload_no_relay_warnings)
      << "\n";
}

Summary summarize(const MetricsReport& report) {
  Summary s;
  const auto& au = report.autonomous;
  const auto& in = report.infotainment;
  s.mean_latency_autonomous_ms = hist_mean(au.latency_ms_hist);
  s.p99_latency_autonomous_ms = hist_quantile(au.latency_ms_hist, 0.99);
  s.mean_latency_infotainment_ms = hist_mean(in.latency_ms_hist);
  s.p99_latency_infotainment_ms = hist_quantile(in.latency_ms_hist, 0.99);
  s.mean_queue_len_autonomous_pkts = hist_mean(au.queue_len_pkts_hist);
  s.mean_queue_len_infotainment_pkts = hist_mean(in.queue_len_pkts_hist);
  if (!report.leaders_per_km_epochs.empty()) {
    double sum = 0.0;
    for (double v : report.leaders_per_km_epochs) sum += v;
    s.mean_leaders_per_km = sum / static_cast<double>(report.leaders_per_km_epochs.size());
  }
  if (!au.throughput_bps.empty()) {
    std::uint64_t ge = 0;
    double sum = 0.0;
    for (double t : au.throughput_bps) {
      if (t >= 128000.0) ++ge;
      sum += t;
    }
    s.frac_vehicles_ge_128kbps = static_cast<double>(ge) / au.throughput_bps.size();
    s.mean_throughput_autonomous_bps = sum / au.throughput_bps.size();
  }
  if (!in.throughput_bps.empty()) {
    double sum = 0.0;
    for (double t : in.throughput_bps) sum += t;
    s.mean_throughput_infotainment_bps = sum / in.throughput_bps.size();
  }
  s.frac_safety_within_100ms = hist_frac_le(au.latency_ms_hist, 100.0);
  auto ratio = [](std::uint64_t dropped, std::uint64_t delivered) {
    std::uint64_t total = dropped + delivered;
    return total == 0 ? 0.0 : static_cast<double>(dropped) / static_cast<double>(total);
  };
  s.packet_failure_ratio_autonomous = ratio(au.dropped_packets, au.delivered_packets);
  s.packet_failure_ratio_infotainment = ratio(in.dropped_packets, in.delivered_packets);
  s.reliability_target_met = s.packet_failure_ratio_autonomous <= 1e-5;
  return s;
}

std::string summary_csv_header() {
  return "scenario,mode,sigma_m,seed,duration_tti,warmup_tti,"
         "mean_latency_autonomous_ms,p99_latency_autonomous_ms,"
         "mean_latency_infotainment_ms,p99_latency_infotainment_ms,"
         "mean_queue_len_autonomous_pkts,mean_queue_len_infotainment_pkts,"
         "mean_leaders_per_km,frac_vehicles_ge_128kbps,frac_safety_within_100ms,"
         "packet_failure_ratio_autonomous,packet_failure_ratio_infotainment,"
         "reliability_target_met,mean_throughput_autonomous_bps,"
         "mean_throughput_infotainment_bps,merged_cluster_warnings,"
         "rsu_fallback_warnings,offload_no_relay_warnings";
}

std::string summary_csv_row(const RunInfo& run, const Summary& s, int merged_warnings,
                            int rsu_fallback_warnings, int offload_warnings) {
  std::string row;
  row += std::to_string(run.scenario_id) + "," + run.mode + "," + format_double(run.sigma_m) +
         "," + std::to_string(run.seed) + "," + std::to_string(run.duration_tti) + "," +
         std::to_string(run.warmup_tti) + ",";
  row += format_double(s.mean_latency_autonomous_ms) + "," +
         format_double(s.p99_latency_autonomous_ms) + "," +
         format_double(s.mean_latency_infotainment_ms) + "," +
         format_double(s.p99_latency_infotainment_ms) + "," +
         format_double(s.mean_queue_len_autonomous_pkts) + "," +
         format_double(s.mean_queue_len_infotainment_pkts) + "," +
         format_double(s.mean_leaders_per_km) + "," +
         format_double(s.frac_vehicles_ge_128kbps) + "," +
         format_double(s.frac_safety_within_100ms) + "," +
         format_double(s.packet_failure_ratio_autonomous) + "," +
         format_double(s.packet_failure_ratio_infotainment) + "," +
         (s.reliability_target_met ? "1" : "0") + "," +
         format_double(s.mean_throughput_autonomous_bps) + "," +
         format_double(s.mean_throughput_infotainment_bps) + "," +
         std::to_string(merged_warnings) + "," + std::to_string(rsu_fallback_warnings) + "," +
         std::to_string(offload_warnings);
  return row;
}

}  // namespace v2x
