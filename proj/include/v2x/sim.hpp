#pragma once

#include <map>
#include <optional>
#include <vector>

#include "v2x/config.hpp"
#include "v2x/mac.hpp"
#include "v2x/metrics.hpp"
#include "v2x/mobility.hpp"
#include "v2x/rng.hpp"
#include "v2x/slicing.hpp"
#include "v2x/traffic.hpp"

namespace v2x {

/// Queues are keyed by link endpoint. The proposed mode isolates the slices
/// on separate links (RSU carries video, the slice leader carries safety),
/// so a vehicle owns one queue per slice. The baselines serve both services
/// over the vehicle's single downlink bearer without isolation: safety
/// packets share one FIFO with the video backlog.
enum class QueueKind : int { safety = 0, video = 1, merged = 2 };

struct FlowKey {
  int vehicle_id = 0;
  QueueKind kind = QueueKind::safety;
  auto operator<=>(const FlowKey&) const = default;
};

/// One scheduler: an RSU pool on the 2 GHz grid or a slice-leader/relay pool
/// on the 5.9 GHz grid. All nodes of a band share PRB indices, so grants
/// packed from index 0 collide across nodes.
struct ServingNode {
  NodeRef ref;
  Band band = Band::v2i_2ghz;
  double tx_power_per_prb_dbm = 0.0;
  int n_prb = 0;
  std::vector<int> flow_idx;  // indices into NetworkState::flows, ascending key
};

struct FlowRuntime {
  FlowKey key;
  bool active = true;   // a leader's safety traffic is consumed locally
  int server_node = -1; // index into nodes, -1 before the first re-slice
  double desired_rx_lin = 0.0;                     // per-PRB rx power, fading excluded
  double rate_per_prb_est = 0.0;                   // wideband PF rate estimate
  std::vector<std::pair<int, double>> interferers; // (node index, per-PRB rx power)
};

struct NetworkState {
  SimConfig config;
  int clock_tti = 0;
  std::vector<Vehicle> vehicles;
  std::vector<Rsu> rsus;
  TopologyAssignment topology;
  std::map<FlowKey, PacketQueue> queues;
  std::map<FlowKey, double> pf_avg;       // delivered-rate EWMA, persists across epochs
  std::map<FlowKey, HarqProcess> harq;
  RngStreams rng;
  MetricsReport report;

  // Epoch caches, rebuilt by each re-slice.
  std::vector<ServingNode> nodes;
  std::vector<FlowRuntime> flows;
  std::map<FlowKey, int> flow_of;
  double noise_lin = 0.0;

  // Per (vehicle, slice) measurement accumulators (post warm-up).
  std::map<std::pair<int, int>, long long> active_ttis;
  std::map<std::pair<int, int>, long long> delivered_bits;

  explicit NetworkState(const SimConfig& cfg);

  /// Injects a fixed vehicle population instead of spawning one (tests).
  NetworkState(const SimConfig& cfg, std::vector<Vehicle> fixed_vehicles);

 private:
  void init_common();
};

/// One TTI in fixed order: advance positions, generate arrivals, refresh
/// fading (realized lazily per used PRB), re-slice when clock mod period is
/// zero, run the per-node PF schedulers, resolve transmissions with HARQ,
/// drain queues and record metrics, then advance the clock.
void step(NetworkState& state);

/// Rebuilds topology, serving nodes, links and rate estimates for the epoch
/// starting at the current clock. Pending HARQ processes are cancelled and
/// queues of deactivated flows are flushed to the handover ledger.
void reslice(NetworkState& state);

/// Executes duration_tti steps and returns the accumulated report. Identical
/// (config, seed) pairs produce identical reports.
MetricsReport run_simulation(const SimConfig& config);

}  // namespace v2x
