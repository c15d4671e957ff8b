#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "v2x/channel.hpp"

namespace v2x {

inline constexpr double kPfAverageFloorBits = 1.0;  // epsilon, bits/TTI

/// Per-flow exponentially averaged delivered throughput (bits/TTI).
struct PfState {
  std::vector<double> avg_bits;  // aligned with the node's flow list
  double beta = 0.01;
};

struct SchedFlow {
  long long queue_bits = 0;   // backlog including this TTI's arrivals
  double rate_per_prb = 0.0;  // instantaneous rate estimate, bits/PRB/TTI
};

/// Greedy proportional-fair allocation: PRBs granted one at a time to the
/// flow maximizing rate / provisional average, where the provisional average
/// reflects bits already granted this TTI. Flows stop receiving PRBs once
/// their granted capacity covers the backlog; ties go to the lowest index.
/// Returns PRB counts per flow.
std::vector<int> pf_schedule(std::span<const SchedFlow> flows, const PfState& pf, int n_prb);

/// avg <- (1-beta) avg + beta * served, floored at 1 bit/TTI.
void update_pf_average(PfState& pf, std::span<const long long> served_bits);

/// One chase-combining HARQ process: retransmissions accumulate effective
/// SINR linearly against the threshold of the first attempt.
struct HarqProcess {
  long long payload_bits = 0;
  int attempts = 0;
  double acc_sinr_linear = 0.0;
  double threshold_db = 0.0;
  int original_prbs = 0;
};

struct FlowTxResult {
  long long served_bits = 0;   // delivered this TTI (drained from the queue)
  long long dropped_bits = 0;  // discarded after the HARQ attempt cap
  bool nacked = false;
};

/// Resolves one flow's transmission for this TTI. With a pending HARQ
/// process the grant carries a retransmission of the stored payload (new
/// data is pre-empted); otherwise a transport block of min(queue, rate) is
/// sent. NACKed payloads stay queued and the process is created/advanced;
/// the payload is dropped after max_attempts failures.
FlowTxResult resolve_transmission(long long queue_bits, double eff_sinr_linear,
                                  int n_prb_granted, std::optional<HarqProcess>& harq,
                                  int max_attempts, std::mt19937_64& rng);

}  // namespace v2x
