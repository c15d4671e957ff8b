#include "v2x/mac.hpp"

#include <cassert>
#include <cmath>

namespace v2x {

std::vector<int> pf_schedule(std::span<const SchedFlow> flows, const PfState& pf, int n_prb) {
  assert(flows.size() == pf.avg_bits.size());
  const int n = static_cast<int>(flows.size());
  std::vector<int> granted_prbs(n, 0);
  std::vector<double> granted_bits(n, 0.0);
  for (int prb = 0; prb < n_prb; ++prb) {
    int best = -1;
    double best_metric = 0.0;
    for (int f = 0; f < n; ++f) {
      if (flows[f].queue_bits <= 0) continue;
      if (granted_bits[f] >= static_cast<double>(flows[f].queue_bits)) continue;
      double provisional = (1.0 - pf.beta) * pf.avg_bits[f] + pf.beta * granted_bits[f];
      double metric = flows[f].rate_per_prb / std::max(provisional, kPfAverageFloorBits);
      if (best < 0 || metric > best_metric) {
        best = f;
        best_metric = metric;
      }
    }
    if (best < 0) break;  // nothing left to serve
    granted_prbs[best] += 1;
    granted_bits[best] += flows[best].rate_per_prb;
  }
  return granted_prbs;
}

void update_pf_average(PfState& pf, std::span<const long long> served_bits) {
  assert(served_bits.size() == pf.avg_bits.size());
  for (size_t f = 0; f < served_bits.size(); ++f) {
    double next = (1.0 - pf.beta) * pf.avg_bits[f] + pf.beta * static_cast<double>(served_bits[f]);
    pf.avg_bits[f] = std::max(next, kPfAverageFloorBits);
  }
}

FlowTxResult resolve_transmission(long long queue_bits, double eff_sinr_linear,
                                  int n_prb_granted, std::optional<HarqProcess>& harq,
                                  int max_attempts, std::mt19937_64& rng) {
  FlowTxResult out;
  if (harq.has_value()) {
    // Chase combining: the retransmission's energy adds to the stored SINR.
    harq->acc_sinr_linear += eff_sinr_linear;
    harq->attempts += 1;
    double combined_db = linear_to_db(harq->acc_sinr_linear);
    if (transmission_outcome(combined_db, harq->threshold_db, rng) == TxOutcome::ack) {
      out.served_bits = harq->payload_bits;
      harq.reset();
    } else {
      out.nacked = true;
      if (harq->attempts >= max_attempts) {
        out.dropped_bits = harq->payload_bits;
        harq.reset();
      }
    }
    return out;
  }
  long long capacity = rate_from_sinr(eff_sinr_linear, n_prb_granted);
  long long tb = std::min(queue_bits, capacity);
  if (tb <= 0) return out;
  double eff = spectral_efficiency(eff_sinr_linear);
  double threshold = mcs_threshold_db(eff);
  if (transmission_outcome(linear_to_db(eff_sinr_linear), threshold, rng) == TxOutcome::ack) {
    out.served_bits = tb;
  } else {
    out.nacked = true;
    harq = HarqProcess{tb, 1, eff_sinr_linear, threshold, n_prb_granted};
  }
  return out;
}

}  // namespace v2x
