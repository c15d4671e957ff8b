#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <random>

#include "v2x/metrics.hpp"

using namespace v2x;

TEST_CASE("empirical cdf at sorted sample points") {
  auto c = cdf({1.0, 2.0, 3.0});
  REQUIRE(c.size() == 3);
  CHECK(c[1].first == 2.0);
  CHECK(c[1].second == doctest::Approx(2.0 / 3.0));
  CHECK(c[2].second == doctest::Approx(1.0));
}

TEST_CASE("constant samples step straight to one") {
  auto c = cdf({5.0, 5.0, 5.0, 5.0});
  REQUIRE(c.size() == 1);
  CHECK(c[0].first == 5.0);
  CHECK(c[0].second == doctest::Approx(1.0));
}

TEST_CASE("cdf is monotone non-decreasing on random data") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<double> samples;
  for (int i = 0; i < 500; ++i) samples.push_back(u(rng));
  auto c = cdf(samples);
  for (size_t i = 1; i < c.size(); ++i) {
    CHECK(c[i].first > c[i - 1].first);
    CHECK(c[i].second >= c[i - 1].second);
  }
  CHECK(c.back().second == doctest::Approx(1.0));
  CHECK_THROWS_AS(cdf({}), std::invalid_argument);
}

TEST_CASE("ccdf complements the cdf") {
  auto c = ccdf({1.0, 2.0, 3.0});
  REQUIRE(c.size() == 3);
  CHECK(c[1].first == 2.0);
  CHECK(c[1].second == doctest::Approx(1.0 / 3.0));
  CHECK(c[2].second == doctest::Approx(0.0));  // nothing exceeds the max sample
  auto plain = cdf({1.0, 2.0, 3.0});
  for (size_t i = 0; i < c.size(); ++i)
    CHECK(c[i].second + plain[i].second == doctest::Approx(1.0));
  CHECK_THROWS_AS(ccdf({}), std::invalid_argument);
}

namespace {

MetricsReport sample_report() {
  MetricsReport r;
  r.run = {3, "proposed", 5.0, 7, 1000, 100};
  r.autonomous.latency_ms_hist = {{1, 90}, {2, 9}, {120, 1}};
  r.autonomous.queue_len_pkts_hist = {{0, 950}, {1, 49}, {3, 1}};
  r.autonomous.queue_len_bits_hist = {{0, 950}, {1280, 50}};
  r.autonomous.throughput_bps = {128000.0, 128000.0, 90000.0};
  r.autonomous.delivered_packets = 100;
  r.autonomous.dropped_packets = 0;
  r.autonomous.arrived_bits = 128000;
  r.autonomous.departed_bits = 128000;
  r.infotainment.latency_ms_hist = {{1, 100}};
  r.infotainment.throughput_bps = {1.0e6};
  r.infotainment.delivered_packets = 100;
  r.leaders_per_km_epochs = {22.0, 20.0, 24.0};
  return r;
}

}  // namespace

TEST_CASE("summarize reduces the distributions") {
  MetricsReport r;
  r.run = {1, "proposed", 5.0, 1, 100, 0};
  r.autonomous.latency_ms_hist = {{1, 1000}};
  auto s0 = summarize(r);
  CHECK(s0.mean_latency_autonomous_ms == doctest::Approx(1.0));
  CHECK(s0.p99_latency_autonomous_ms == doctest::Approx(1.0));

  r.autonomous.delivered_packets = 99999;
  r.autonomous.dropped_packets = 1;
  auto s1 = summarize(r);
  CHECK(s1.packet_failure_ratio_autonomous == doctest::Approx(1e-5));
  CHECK(s1.reliability_target_met);
  r.autonomous.dropped_packets = 3;
  CHECK_FALSE(summarize(r).reliability_target_met);

  auto s2 = summarize(sample_report());
  CHECK(s2.mean_leaders_per_km == doctest::Approx(22.0));
  CHECK(s2.frac_vehicles_ge_128kbps == doctest::Approx(2.0 / 3.0));
  CHECK(s2.frac_safety_within_100ms == doctest::Approx(99.0 / 100.0));
  CHECK(s2.mean_queue_len_autonomous_pkts == doctest::Approx((49.0 + 3.0) / 1000.0));
}

TEST_CASE("report json round-trips losslessly") {
  auto r = sample_report();
  auto text = r.to_json();
  auto back = MetricsReport::from_json(text);
  CHECK(back == r);
  CHECK(back.to_json() == text);
}

TEST_CASE("csv export writes the contracted files and headers") {
  auto r = sample_report();
  std::string dir = (std::filesystem::temp_directory_path() / "v2x_metrics_test").string();
  std::filesystem::remove_all(dir);
  r.write_csvs(dir);
  for (std::string name :
       {"cdf_throughput_autonomous.csv", "ccdf_latency_autonomous.csv",
        "cdf_queuelen_autonomous.csv", "cdf_queuelen_bits_autonomous.csv",
        "cdf_throughput_infotainment.csv", "ccdf_latency_infotainment.csv",
        "cdf_queuelen_infotainment.csv", "summary.csv"}) {
    CAPTURE(name);
    CHECK(std::filesystem::exists(dir + "/" + name));
  }
  auto first_line = [&](const std::string& name) {
    std::ifstream in(dir + "/" + name);
    std::string line;
    std::getline(in, line);
    return line;
  };
  CHECK(first_line("cdf_throughput_autonomous.csv") == "value_bps,prob");
  CHECK(first_line("ccdf_latency_autonomous.csv") == "latency_ms,exceed_prob");
  CHECK(first_line("cdf_queuelen_autonomous.csv") == "value_packets,prob");
  CHECK(first_line("summary.csv") == summary_csv_header());
  std::filesystem::remove_all(dir);
}

TEST_CASE("p99 of a mostly-fast latency histogram") {
  MetricsReport r;
  r.autonomous.latency_ms_hist = {{1, 990}, {50, 10}};
  auto s = summarize(r);
  CHECK(s.p99_latency_autonomous_ms == doctest::Approx(1.0));
  r.autonomous.latency_ms_hist = {{1, 980}, {50, 20}};
  CHECK(summarize(r).p99_latency_autonomous_ms == doctest::Approx(50.0));
}
