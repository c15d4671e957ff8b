#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numeric>
#include <random>

#include "v2x/mac.hpp"

using namespace v2x;

namespace {

PfState make_pf(std::vector<double> avg, double beta = 0.01) {
  PfState pf;
  pf.avg_bits = std::move(avg);
  pf.beta = beta;
  return pf;
}

}  // namespace

TEST_CASE("two identical backlogged flows split the pool evenly") {
  std::vector<SchedFlow> flows{{100000, 500.0}, {100000, 500.0}};
  auto grants = pf_schedule(flows, make_pf({100.0, 100.0}), 10);
  CHECK(grants[0] == 5);  // the intra-TTI average refresh alternates grants
  CHECK(grants[1] == 5);
}

TEST_CASE("a single backlogged flow takes only what its queue needs") {
  std::vector<SchedFlow> flows{{1200, 500.0}};
  auto grants = pf_schedule(flows, make_pf({100.0}), 50);
  CHECK(grants[0] == 3);  // ceil(1200 / 500)
}

TEST_CASE("empty queues receive nothing") {
  std::vector<SchedFlow> flows{{0, 500.0}, {0, 800.0}};
  auto grants = pf_schedule(flows, make_pf({100.0, 100.0}), 10);
  CHECK(grants[0] == 0);
  CHECK(grants[1] == 0);
}

TEST_CASE("all PRBs are allocated while someone is backlogged") {
  std::vector<SchedFlow> flows{{1000000, 700.0}, {1000000, 100.0}, {0, 900.0}};
  auto grants = pf_schedule(flows, make_pf({50.0, 900.0, 10.0}), 50);
  CHECK(grants[0] + grants[1] + grants[2] == 50);
  CHECK(grants[2] == 0);
}

TEST_CASE("pf shares converge within 5% for identical flows") {
  // Long-run fairness: same channel statistics, both permanently backlogged.
  PfState pf = make_pf({1.0, 1.0});
  std::vector<SchedFlow> flows{{1 << 30, 540.0}, {1 << 30, 540.0}};
  long long prbs[2] = {0, 0};
  for (int t = 0; t < 5000; ++t) {
    auto g = pf_schedule(flows, pf, 50);
    prbs[0] += g[0];
    prbs[1] += g[1];
    std::vector<long long> served{static_cast<long long>(g[0] * 540),
                                  static_cast<long long>(g[1] * 540)};
    update_pf_average(pf, served);
  }
  double share0 = static_cast<double>(prbs[0]) / (prbs[0] + prbs[1]);
  CHECK(share0 > 0.475);
  CHECK(share0 < 0.525);
}

TEST_CASE("pf is opportunistic: the better channel earns at least as much") {
  PfState pf = make_pf({1.0, 1.0});
  std::vector<SchedFlow> flows{{1 << 30, 1080.0}, {1 << 30, 180.0}};
  long long bits[2] = {0, 0};
  for (int t = 0; t < 3000; ++t) {
    auto g = pf_schedule(flows, pf, 50);
    std::vector<long long> served{static_cast<long long>(g[0] * 1080),
                                  static_cast<long long>(g[1] * 180)};
    bits[0] += served[0];
    bits[1] += served[1];
    update_pf_average(pf, served);
  }
  CHECK(bits[0] >= bits[1]);
}

TEST_CASE("pf average update fixed point, decay and arithmetic") {
  PfState pf = make_pf({100.0});
  std::vector<long long> served{100};
  update_pf_average(pf, served);
  CHECK(pf.avg_bits[0] == doctest::Approx(100.0));

  PfState decay = make_pf({100.0});
  std::vector<long long> nothing{0};
  for (int i = 0; i < 5000; ++i) update_pf_average(decay, nothing);
  CHECK(decay.avg_bits[0] == doctest::Approx(kPfAverageFloorBits));

  PfState arith = make_pf({100.0});
  std::vector<long long> two_hundred{200};
  update_pf_average(arith, two_hundred);
  CHECK(arith.avg_bits[0] == doctest::Approx(101.0));
}

TEST_CASE("first-attempt ack serves min(queue, rate)") {
  std::mt19937_64 rng(1);
  std::optional<HarqProcess> harq;
  // 30 dB SINR on 2 PRBs: capacity 2160 bits, queue smaller.
  auto r = resolve_transmission(1500, db_to_linear(30.0), 2, harq, 4, rng);
  CHECK(r.served_bits == 1500);
  CHECK_FALSE(harq.has_value());
  CHECK_FALSE(r.nacked);
}

TEST_CASE("chase combining doubles the accumulated SINR before the draw") {
  std::mt19937_64 rng(2);
  std::optional<HarqProcess> harq;
  // Force a NACK: SINR far below the threshold of its own MCS cannot happen
  // for new data (delta = 0 there), so seed the process manually.
  harq = HarqProcess{1280, 1, 0.5, 30.0, 2};
  auto r = resolve_transmission(5000, 0.5, 2, harq, 4, rng);
  CHECK(r.nacked);  // 0 dB accumulated against a 30 dB threshold
  REQUIRE(harq.has_value());
  CHECK(harq->acc_sinr_linear == doctest::Approx(1.0));  // 2x the per-attempt SINR
  CHECK(harq->attempts == 2);
}

TEST_CASE("the packet is dropped after the attempt cap") {
  std::mt19937_64 rng(3);
  std::optional<HarqProcess> harq = HarqProcess{1280, 3, 0.1, 40.0, 1};
  auto r = resolve_transmission(5000, 0.1, 1, harq, 4, rng);
  CHECK(r.dropped_bits == 1280);
  CHECK(r.served_bits == 0);
  CHECK_FALSE(harq.has_value());
}

TEST_CASE("retransmission success releases the stored payload") {
  std::mt19937_64 rng(4);
  std::optional<HarqProcess> harq = HarqProcess{999, 1, db_to_linear(29.0), 10.0, 1};
  auto r = resolve_transmission(5000, db_to_linear(29.0), 1, harq, 4, rng);
  CHECK(r.served_bits == 999);  // accumulated SINR is far beyond the knee
  CHECK_FALSE(harq.has_value());
}

TEST_CASE("new data faces the 10% ramp at its own threshold") {
  // Below the efficiency cap the scheduler picks the MCS matching the SINR,
  // so delta = 0 and the first attempt fails 10% of the time.
  std::mt19937_64 rng(5);
  int nacks = 0;
  const int trials = 20000;
  for (int i = 0; i < trials; ++i) {
    std::optional<HarqProcess> harq;
    auto r = resolve_transmission(1000, db_to_linear(8.0), 1, harq, 4, rng);
    if (r.nacked) {
      ++nacks;
      CHECK(harq.has_value());
    } else {
      CHECK(r.served_bits > 0);
    }
  }
  double ratio = static_cast<double>(nacks) / trials;
  CHECK(ratio > 0.08);
  CHECK(ratio < 0.12);
}
