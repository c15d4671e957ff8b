#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "v2x/channel.hpp"
#include "v2x/sim.hpp"

using namespace v2x;

namespace {

SimConfig small_config() {
  SimConfig cfg;
  cfg.scenario_id = 3;
  cfg.mode = Mode::proposed;
  cfg.sigma_m = 5.0;
  cfg.duration_tti = 400;
  cfg.warmup_tti = 100;
  cfg.reslice_period_tti = 100;
  cfg.seed = 7;
  cfg.highway_length_m = 3464.0;
  cfg.n_rsu = 2;
  return cfg;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("config validation rejects an empty run naming the field") {
  SimConfig cfg = small_config();
  cfg.duration_tti = 0;
  try {
    cfg.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "duration_tti");
  }
}

TEST_CASE("config validation enforces the core invariants") {
  SimConfig ok = small_config();
  CHECK_NOTHROW(ok.validate());

  SimConfig bad = ok;
  bad.sigma_m = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = ok;
  bad.duration_tti = 50;  // below the re-slice period
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = ok;
  bad.highway_length_m = 1000.0;  // cannot hold 2 RSUs at 1732 m spacing
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = ok;
  bad.scenario_id = 4;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("identical config and seed produce bit-identical outputs") {
  SimConfig cfg = small_config();
  auto r1 = run_simulation(cfg);
  auto r2 = run_simulation(cfg);
  CHECK(r1 == r2);
  CHECK(r1.to_json() == r2.to_json());

  auto dir1 = std::filesystem::temp_directory_path() / "v2x_det_a";
  auto dir2 = std::filesystem::temp_directory_path() / "v2x_det_b";
  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir2);
  r1.write_csvs(dir1.string());
  r2.write_csvs(dir2.string());
  for (const auto& entry : std::filesystem::directory_iterator(dir1)) {
    auto name = entry.path().filename().string();
    CHECK(read_file(entry.path().string()) == read_file((dir2 / name).string()));
  }
  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir2);
}

TEST_CASE("different seeds change the sampled distributions") {
  SimConfig cfg = small_config();
  auto r1 = run_simulation(cfg);
  cfg.seed = 8;
  auto r2 = run_simulation(cfg);
  CHECK_FALSE(r1 == r2);
}

TEST_CASE("re-slice fires when the clock hits a period boundary") {
  SimConfig cfg = small_config();
  NetworkState st(cfg);
  for (int t = 0; t < 100; ++t) step(st);  // clocks 0..99 executed
  CHECK(st.clock_tti == 100);
  CHECK(st.topology.epoch_tti == 0);  // the step at clock 99 did not re-slice
  step(st);                           // the step at clock 100 does
  CHECK(st.topology.epoch_tti == 100);
}

TEST_CASE("a step conserves bits: arrivals either depart or stay queued") {
  SimConfig cfg = small_config();
  NetworkState st(cfg);
  step(st);  // empty queues in, exactly the unserved arrivals remain
  for (Slice s : {Slice::autonomous, Slice::infotainment}) {
    const auto& acc = st.report.slice(s);
    FlowClass fc = s == Slice::autonomous ? FlowClass::safety : FlowClass::video;
    long long queued = 0;
    for (const auto& [key, q] : st.queues) queued += q.class_bits(fc);
    CHECK(acc.arrived_bits == acc.departed_bits + queued + acc.flushed_bits);
    CHECK(acc.arrived_bits > 0);
  }
}

TEST_CASE("single link with no interference serves min(queue, rate)") {
  // One vehicle, one RSU: the hand trace through arrival, scheduling,
  // transmission and dequeue. Zero shadowing keeps large-scale gains
  // reproducible; fading is replayed from a twin RNG stream.
  SimConfig cfg;
  cfg.scenario_id = 3;
  cfg.mode = Mode::proposed;  // one vehicle: no clustering, RSU fallback
  cfg.duration_tti = 200;
  cfg.warmup_tti = 0;
  cfg.reslice_period_tti = 100;
  cfg.seed = 21;
  cfg.n_rsu = 1;
  cfg.highway_length_m = 1732.0;
  cfg.shadowing_std_v2i_db = 0.0;
  cfg.shadowing_std_v2v_db = 0.0;

  Vehicle v;
  v.id = 0;
  v.lane = 0;
  v.x_m = 966.0;  // 100 m along the road from the RSU at 866 m
  v.y_m = kLaneCenterY[0];
  v.speed_mps = kVehicleSpeedMps;
  v.service_class = ServiceClass::video_capable;
  NetworkState st(cfg, {v});

  // Twin stream replays the fading draws the step will consume.
  RngStreams twin(cfg.seed);
  auto& fading = twin[Stream::fading];
  std::exponential_distribution<double> rayleigh(1.0);

  // Expected large-scale gain after the first advance (dt = 1 ms).
  double x_after = v.x_m + v.speed_mps * 0.001;
  double d = ring_distance(x_after, v.y_m, 866.0, -35.0, cfg.highway_length_m);
  double tx_per_prb = cfg.rsu_tx_power_dbm - 10.0 * std::log10(cfg.n_prb);
  double rx_lin = db_to_linear(tx_per_prb - path_loss_v2i(d));
  double noise = db_to_linear(noise_dbm_per_prb(cfg.noise_figure_db));

  // Scheduler view: both flows share the link, so the PF split is 2+1 PRBs
  // for the 1280-bit safety packet and the 1000-bit video packet.
  double est = kRxBranches * rx_lin / noise;
  double rate_est = kPrbBandwidthHz * kTtiSeconds * spectral_efficiency(est);
  REQUIRE(rate_est == doctest::Approx(1080.0));

  step(st);

  // The RSU transmits 3 PRBs this TTI (2 safety + 1 video), so its power
  // budget concentrates on them.
  double boost = 50.0 / 3.0;
  auto eff_over = [&](int count) {
    std::vector<double> prb;
    for (int p = 0; p < count; ++p) {
      double b0 = rx_lin * boost * rayleigh(fading);
      double b1 = rx_lin * boost * rayleigh(fading);
      prb.push_back(b0 / noise + b1 / noise);
    }
    return effective_sinr(prb);
  };
  double eff_safety = eff_over(2);   // safety flow drew first (lower key)
  double eff_video = eff_over(1);
  long long expect_safety = std::min<long long>(1280, rate_from_sinr(eff_safety, 2));
  long long expect_video = std::min<long long>(1000, rate_from_sinr(eff_video, 1));
  // At ~50 dB SNR both transmissions sit far above the BLER knee.
  REQUIRE(linear_to_db(eff_safety) > mcs_threshold_db(6.0) + 1.0);
  REQUIRE(linear_to_db(eff_video) > mcs_threshold_db(6.0) + 1.0);

  CHECK(st.report.autonomous.departed_bits == expect_safety);
  CHECK(st.report.infotainment.departed_bits == expect_video);
  CHECK(st.queues.at({0, QueueKind::safety}).total_bits() == 1280 - expect_safety);
  CHECK(st.queues.at({0, QueueKind::video}).total_bits() == 1000 - expect_video);
}

TEST_CASE("leaders per km are recorded once per post-warm-up epoch") {
  SimConfig cfg = small_config();
  cfg.duration_tti = 500;
  cfg.warmup_tti = 100;
  auto report = run_simulation(cfg);
  // Epochs at 100, 200, 300, 400 fall inside the measured window.
  CHECK(report.leaders_per_km_epochs.size() == 4);
  for (double v : report.leaders_per_km_epochs) CHECK(v > 0.0);
}

TEST_CASE("full run conserves bits per slice") {
  for (Mode mode : {Mode::proposed, Mode::baseline1, Mode::baseline2}) {
    SimConfig cfg = small_config();
    cfg.mode = mode;
    cfg.duration_tti = 300;
    auto report = run_simulation(cfg);
    for (Slice s : {Slice::autonomous, Slice::infotainment}) {
      const auto& acc = report.slice(s);
      CHECK(acc.arrived_bits == acc.departed_bits + acc.dropped_bits + acc.flushed_bits +
                                    acc.residual_bits);
    }
    CHECK(report.autonomous.arrived_bits > 0);
    CHECK(report.infotainment.arrived_bits > 0);
  }
}

TEST_CASE("proposed mode keeps slice pools isolated") {
  // Safety flows served by leaders never touch the RSU pool and vice versa:
  // with video demand saturating both RSUs, autonomous-slice latency through
  // the V2V pool stays at the floor.
  SimConfig cfg = small_config();
  cfg.scenario_id = 1;  // dense enough to saturate the RSU pool
  cfg.duration_tti = 1000;
  cfg.warmup_tti = 100;
  auto report = run_simulation(cfg);
  auto s = summarize(report);
  CHECK(report.infotainment.delivered_packets > 0);
  CHECK(s.mean_latency_autonomous_ms < s.mean_latency_infotainment_ms);
}
