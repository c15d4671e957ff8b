#include "v2x/sim.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

#include "v2x/channel.hpp"

namespace v2x {

namespace {

double per_prb_power_dbm(double total_dbm, int n_prb) {
  return total_dbm - 10.0 * std::log10(static_cast<double>(n_prb));
}

Slice slice_of(FlowClass fc) {
  return fc == FlowClass::safety ? Slice::autonomous : Slice::infotainment;
}

int slice_index(Slice s) { return static_cast<int>(s); }

std::vector<Vehicle> spawn_for(const SimConfig& cfg, RngStreams& rng) {
  return spawn_vehicles(cfg.scenario_id, cfg.highway_length_m, cfg.video_fraction,
                        rng[Stream::placement]);
}

}  // namespace

NetworkState::NetworkState(const SimConfig& cfg) : config(cfg), rng(cfg.seed) {
  config.validate();
  vehicles = spawn_for(config, rng);
  init_common();
}

NetworkState::NetworkState(const SimConfig& cfg, std::vector<Vehicle> fixed_vehicles)
    : config(cfg), rng(cfg.seed) {
  config.validate();
  vehicles = std::move(fixed_vehicles);
  init_common();
}

void NetworkState::init_common() {
  rsus = place_rsus(config.n_rsu);
  for (auto& r : rsus) {
    r.tx_power_dbm = config.rsu_tx_power_dbm;
    r.resource_pool = config.n_prb;
  }
  noise_lin = db_to_linear(noise_dbm_per_prb(config.noise_figure_db));
  report.run.scenario_id = config.scenario_id;
  report.run.mode = to_string(config.mode);
  report.run.sigma_m = config.sigma_m;
  report.run.seed = config.seed;
  report.run.duration_tti = config.duration_tti;
  report.run.warmup_tti = config.warmup_tti;
  // Proposed mode: isolated per-slice flows. Baselines: one shared bearer
  // per vehicle carrying both services.
  for (const auto& v : vehicles) {
    if (config.mode == Mode::proposed) {
      flows.push_back({FlowKey{v.id, QueueKind::safety}});
      if (v.service_class == ServiceClass::video_capable)
        flows.push_back({FlowKey{v.id, QueueKind::video}});
    } else {
      flows.push_back({FlowKey{v.id, QueueKind::merged}});
    }
  }
  std::sort(flows.begin(), flows.end(),
            [](const FlowRuntime& a, const FlowRuntime& b) { return a.key < b.key; });
  for (size_t i = 0; i < flows.size(); ++i) flow_of[flows[i].key] = static_cast<int>(i);
}

namespace {

/// Epoch-scoped large-scale channel tables. Shadowing is redrawn per link at
/// every re-slice; path loss follows the positions at the re-slice instant.
struct LargeScale {
  // rx power (linear, per PRB) from each RSU at each vehicle
  std::vector<std::vector<double>> v2i_rx_lin;  // [rsu][vehicle]
};

double draw_shadowing(std::mt19937_64& rng, double std_db) {
  if (std_db <= 0.0) return 0.0;  // deterministic large-scale gains
  std::normal_distribution<double> shadow(0.0, std_db);
  return shadow(rng);
}

LargeScale build_v2i_table(NetworkState& st) {
  LargeScale ls;
  auto& shadow_rng = st.rng[Stream::shadowing];
  double tx = per_prb_power_dbm(st.config.rsu_tx_power_dbm, st.config.n_prb);
  ls.v2i_rx_lin.assign(st.rsus.size(), std::vector<double>(st.vehicles.size(), 0.0));
  for (const auto& rsu : st.rsus) {
    for (const auto& v : st.vehicles) {
      double d = ring_distance(rsu.x_m, rsu.y_m, v.x_m, v.y_m, st.config.highway_length_m);
      double gain_db =
          -(path_loss_v2i(d) + draw_shadowing(shadow_rng, st.config.shadowing_std_v2i_db));
      ls.v2i_rx_lin[rsu.id][v.id] = db_to_linear(tx + gain_db);
    }
  }
  return ls;
}

void dump_topology_csv(const NetworkState& st) {
  namespace fs = std::filesystem;
  fs::create_directories(st.config.output_dir);
  std::ofstream out(st.config.output_dir + "/topology_epoch_" +
                    std::to_string(st.clock_tti) + ".csv");
  out << "vehicle_id,cluster_id,leader_id,x_m,y_m\n";
  std::map<int, std::pair<int, int>> membership;  // vehicle -> (cluster, leader)
  for (size_t c = 0; c < st.topology.clusters.size(); ++c) {
    int leader = c < st.topology.leaders.size() ? st.topology.leaders[c] : -1;
    membership[leader] = {static_cast<int>(c), leader};
    for (int m : st.topology.clusters[c]) membership[m] = {static_cast<int>(c), leader};
  }
  for (const auto& v : st.vehicles) {
    auto it = membership.find(v.id);
    int cluster = it == membership.end() ? -1 : it->second.first;
    int leader = it == membership.end() ? -1 : it->second.second;
    out << v.id << "," << cluster << "," << leader << "," << v.x_m << "," << v.y_m << "\n";
  }
}

}  // namespace

void reslice(NetworkState& st) {
  const auto& cfg = st.config;
  LargeScale ls = build_v2i_table(st);

  // Wideband V2I SINR per vehicle (single branch, all-RSU interference):
  // the baseline-2 offload metric.
  std::vector<int> home(st.vehicles.size());
  std::vector<double> v2i_sinr_db(st.vehicles.size());
  for (const auto& v : st.vehicles) {
    home[v.id] = nearest_rsu(v, st.rsus, cfg.highway_length_m);
    double s = ls.v2i_rx_lin[home[v.id]][v.id];
    double interference = 0.0;
    for (const auto& rsu : st.rsus)
      if (rsu.id != home[v.id]) interference += ls.v2i_rx_lin[rsu.id][v.id];
    v2i_sinr_db[v.id] = linear_to_db(s / (st.noise_lin + interference));
  }

  switch (cfg.mode) {
    case Mode::proposed:
      st.topology = proposed_topology(st.vehicles, st.rsus, cfg.highway_length_m, cfg.sigma_m,
                                      cfg.squared_similarity, st.clock_tti,
                                      st.rng[Stream::kmeans]);
      break;
    case Mode::baseline1:
      st.topology = baseline1_topology(st.vehicles, st.rsus, cfg.highway_length_m, st.clock_tti);
      break;
    case Mode::baseline2:
      st.topology = baseline2_topology(st.vehicles, st.rsus, cfg.highway_length_m, v2i_sinr_db,
                                       cfg.offload_threshold_db, st.clock_tti);
      break;
  }
  st.report.merged_cluster_warnings += st.topology.merged_cluster_warnings;
  st.report.rsu_fallback_warnings += st.topology.rsu_fallback_warnings;
  st.report.offload_no_relay_warnings += st.topology.offload_no_relay_warnings;
  if (st.clock_tti >= cfg.warmup_tti)
    st.report.leaders_per_km_epochs.push_back(static_cast<double>(st.topology.leaders.size()) /
                                              (cfg.highway_length_m / 1000.0));
  if (cfg.dump_topology) dump_topology_csv(st);

  // Link conditions changed wholesale; in-flight HARQ payloads stay queued
  // and are rescheduled at the new serving node.
  st.harq.clear();

  // Serving nodes: all RSUs, then every vehicle that serves someone.
  st.nodes.clear();
  std::map<NodeRef, int> node_index;
  for (const auto& rsu : st.rsus) {
    ServingNode n;
    n.ref = NodeRef{NodeRef::Kind::rsu, rsu.id};
    n.band = Band::v2i_2ghz;
    n.tx_power_per_prb_dbm = per_prb_power_dbm(cfg.rsu_tx_power_dbm, cfg.n_prb);
    n.n_prb = cfg.n_prb;
    node_index[n.ref] = static_cast<int>(st.nodes.size());
    st.nodes.push_back(std::move(n));
  }
  std::set<int> relay_vehicles;
  for (const auto& [vid, server] : st.topology.serving_map)
    if (server.kind == NodeRef::Kind::vehicle) relay_vehicles.insert(server.id);
  for (const auto& [vid, server] : st.topology.video_map)
    if (server.kind == NodeRef::Kind::vehicle) relay_vehicles.insert(server.id);
  for (int vid : relay_vehicles) {
    ServingNode n;
    n.ref = NodeRef{NodeRef::Kind::vehicle, vid};
    n.band = Band::v2v_5_9ghz;
    n.tx_power_per_prb_dbm = per_prb_power_dbm(cfg.sl_tx_power_dbm, cfg.n_prb);
    n.n_prb = cfg.n_prb;
    node_index[n.ref] = static_cast<int>(st.nodes.size());
    st.nodes.push_back(std::move(n));
  }

  // Flow activity and serving relations.
  std::set<int> leader_set(st.topology.leaders.begin(), st.topology.leaders.end());
  for (auto& f : st.flows) {
    f.server_node = -1;
    f.interferers.clear();
    switch (f.key.kind) {
      case QueueKind::safety: {
        bool leader = cfg.mode == Mode::proposed && leader_set.count(f.key.vehicle_id) > 0;
        f.active = !leader;  // a leader relays its own safety data locally
        if (f.active) {
          auto it = st.topology.serving_map.find(f.key.vehicle_id);
          if (it != st.topology.serving_map.end()) f.server_node = node_index.at(it->second);
        }
        break;
      }
      case QueueKind::video: {
        f.active = true;
        auto it = st.topology.video_map.find(f.key.vehicle_id);
        if (it != st.topology.video_map.end()) f.server_node = node_index.at(it->second);
        break;
      }
      case QueueKind::merged: {
        f.active = true;
        auto it = st.topology.serving_map.find(f.key.vehicle_id);
        if (it != st.topology.serving_map.end()) f.server_node = node_index.at(it->second);
        break;
      }
    }
    if (!f.active) {
      auto qit = st.queues.find(f.key);
      if (qit != st.queues.end() && !qit->second.empty()) {
        // Handover: the new leader holds its own pending safety data. The
        // bits count as delivered for the throughput ledger but produce no
        // latency or failure samples.
        if (st.clock_tti >= cfg.warmup_tti)
          st.delivered_bits[{f.key.vehicle_id, slice_index(Slice::autonomous)}] +=
              qit->second.total_bits();
        st.report.slice(Slice::autonomous).flushed_bits += qit->second.flush();
      }
    }
  }
  for (auto& n : st.nodes) n.flow_idx.clear();
  for (size_t i = 0; i < st.flows.size(); ++i) {
    const auto& f = st.flows[i];
    if (f.active && f.server_node >= 0)
      st.nodes[f.server_node].flow_idx.push_back(static_cast<int>(i));
  }

  // V2V large-scale gains: tx relay -> rx vehicle, shadowing per link.
  auto& shadow_rng = st.rng[Stream::shadowing];
  double v2v_tx = per_prb_power_dbm(cfg.sl_tx_power_dbm, cfg.n_prb);
  std::map<std::pair<int, int>, double> v2v_rx_lin;  // (tx vehicle, rx vehicle)
  std::vector<int> relay_list(relay_vehicles.begin(), relay_vehicles.end());
  std::set<int> v2v_receivers;
  for (const auto& f : st.flows)
    if (f.active && f.server_node >= 0 &&
        st.nodes[f.server_node].ref.kind == NodeRef::Kind::vehicle)
      v2v_receivers.insert(f.key.vehicle_id);
  for (int rx : v2v_receivers) {
    for (int tx : relay_list) {
      if (tx == rx) continue;
      const auto& tv = st.vehicles[tx];
      const auto& rv = st.vehicles[rx];
      double d = ring_distance(tv.x_m, tv.y_m, rv.x_m, rv.y_m, cfg.highway_length_m);
      double gain_db =
          -(path_loss_v2v(d) + draw_shadowing(shadow_rng, cfg.shadowing_std_v2v_db));
      v2v_rx_lin[{tx, rx}] = db_to_linear(v2v_tx + gain_db);
    }
  }

  // Desired link, strongest interferers and the PF rate estimate per flow.
  for (auto& f : st.flows) {
    if (!f.active || f.server_node < 0) continue;
    const auto& node = st.nodes[f.server_node];
    std::vector<std::pair<double, int>> cochannel;  // (rx power, node idx)
    if (node.ref.kind == NodeRef::Kind::rsu) {
      f.desired_rx_lin = ls.v2i_rx_lin[node.ref.id][f.key.vehicle_id];
      for (const auto& rsu : st.rsus)
        if (rsu.id != node.ref.id)
          cochannel.emplace_back(ls.v2i_rx_lin[rsu.id][f.key.vehicle_id],
                                 node_index.at(NodeRef{NodeRef::Kind::rsu, rsu.id}));
    } else {
      f.desired_rx_lin = v2v_rx_lin.at({node.ref.id, f.key.vehicle_id});
      for (int tx : relay_list)
        if (tx != node.ref.id && tx != f.key.vehicle_id)
          cochannel.emplace_back(v2v_rx_lin.at({tx, f.key.vehicle_id}),
                                 node_index.at(NodeRef{NodeRef::Kind::vehicle, tx}));
    }
    std::stable_sort(cochannel.begin(), cochannel.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    if (static_cast<int>(cochannel.size()) > cfg.interference_neighbors)
      cochannel.resize(cfg.interference_neighbors);
    double interference = 0.0;
    for (const auto& [rx, idx] : cochannel) {
      f.interferers.emplace_back(idx, rx);
      interference += rx;
    }
    double est = kRxBranches * f.desired_rx_lin / (st.noise_lin + interference);
    f.rate_per_prb_est = kPrbBandwidthHz * kTtiSeconds * spectral_efficiency(est);
  }
}

namespace {

struct Grant {
  int flow = 0;  // index into NetworkState::flows
  int start = 0;
  int count = 0;
};

}  // namespace

void step(NetworkState& st) {
  const auto& cfg = st.config;
  const bool measuring = st.clock_tti >= cfg.warmup_tti;

  // (1) mobility
  advance_positions(st.vehicles, kTtiSeconds, cfg.highway_length_m);

  // (2) deterministic arrivals, enqueued before scheduling
  for (auto& f : st.flows) {
    if (!f.active) continue;
    auto enqueue_class = [&](FlowClass fc) {
      auto arrivals = generate_arrivals(st.clock_tti, fc, f.key.vehicle_id);
      if (arrivals.empty()) return;
      auto& q = st.queues[f.key];
      for (const auto& p : arrivals) {
        q.enqueue(p);
        st.report.slice(slice_of(fc)).arrived_bits += p.size_bits;
      }
    };
    switch (f.key.kind) {
      case QueueKind::safety: enqueue_class(FlowClass::safety); break;
      case QueueKind::video: enqueue_class(FlowClass::video); break;
      case QueueKind::merged:
        enqueue_class(FlowClass::safety);
        if (st.vehicles[f.key.vehicle_id].service_class == ServiceClass::video_capable)
          enqueue_class(FlowClass::video);
        break;
    }
  }

  // (3) fast fading is refreshed per TTI; gains are realized lazily below,
  // one draw per used (link, PRB, branch).

  // (4) topology epoch boundary
  if (st.clock_tti % cfg.reslice_period_tti == 0) reslice(st);

  // (5) per-node scheduling: HARQ retransmissions first, then greedy PF.
  std::vector<int> node_used(st.nodes.size(), 0);
  std::vector<std::vector<Grant>> node_grants(st.nodes.size());
  for (size_t ni = 0; ni < st.nodes.size(); ++ni) {
    auto& node = st.nodes[ni];
    if (node.flow_idx.empty()) continue;
    int next_start = 0;
    auto& grants = node_grants[ni];
    std::vector<int> pf_candidates;
    for (int fi : node.flow_idx) {
      auto hit = st.harq.find(st.flows[fi].key);
      if (hit != st.harq.end()) {
        int grant = std::min(hit->second.original_prbs, node.n_prb - next_start);
        if (grant > 0) {
          grants.push_back({fi, next_start, grant});
          next_start += grant;
        }
        // Pre-empted: no new data for this flow while HARQ is pending.
      } else {
        pf_candidates.push_back(fi);
      }
    }
    int prbs_left = node.n_prb - next_start;
    if (prbs_left > 0 && !pf_candidates.empty()) {
      std::vector<SchedFlow> sched(pf_candidates.size());
      PfState pf;
      pf.beta = cfg.pf_beta;
      pf.avg_bits.resize(pf_candidates.size());
      for (size_t i = 0; i < pf_candidates.size(); ++i) {
        const auto& f = st.flows[pf_candidates[i]];
        auto qit = st.queues.find(f.key);
        sched[i].queue_bits = qit == st.queues.end() ? 0 : qit->second.total_bits();
        sched[i].rate_per_prb = f.rate_per_prb_est;
        auto ait = st.pf_avg.find(f.key);
        pf.avg_bits[i] = ait == st.pf_avg.end() ? kPfAverageFloorBits : ait->second;
      }
      auto counts = pf_schedule(sched, pf, prbs_left);
      for (size_t i = 0; i < pf_candidates.size(); ++i) {
        if (counts[i] <= 0) continue;
        grants.push_back({pf_candidates[i], next_start, counts[i]});
        next_start += counts[i];
      }
    }
    node_used[ni] = next_start;
  }

  // Sidelink autonomous mode: each vehicle node picks its slice of the
  // shared 5.9 GHz pool at a random offset, so lightly loaded leaders do
  // not all collide on the same PRB indices. RSUs schedule their own grid
  // deterministically from index 0.
  std::vector<int> pool_offset(st.nodes.size(), 0);
  {
    auto& pool_rng = st.rng[Stream::txpool];
    std::uniform_int_distribution<int> pick(0, cfg.n_prb - 1);
    for (size_t ni = 0; ni < st.nodes.size(); ++ni)
      if (st.nodes[ni].ref.kind == NodeRef::Kind::vehicle && node_used[ni] > 0)
        pool_offset[ni] = pick(pool_rng);
  }

  // The power budget concentrates on the PRBs actually transmitted this
  // TTI (link caches assume an even split over the whole pool).
  std::vector<double> power_boost(st.nodes.size(), 1.0);
  for (size_t ni = 0; ni < st.nodes.size(); ++ni)
    if (node_used[ni] > 0)
      power_boost[ni] = static_cast<double>(st.nodes[ni].n_prb) / node_used[ni];

  // (6) transmission + HARQ resolution
  auto& fading_rng = st.rng[Stream::fading];
  auto& bler_rng = st.rng[Stream::bler];
  std::exponential_distribution<double> rayleigh_power(1.0);  // unit-mean power gain
  std::map<FlowKey, FlowTxResult> results;
  std::vector<double> prb_sinr;
  for (size_t ni = 0; ni < st.nodes.size(); ++ni) {
    for (const auto& g : node_grants[ni]) {
      auto& f = st.flows[g.flow];
      prb_sinr.clear();
      double s_rx = f.desired_rx_lin * power_boost[ni];
      for (int l = g.start; l < g.start + g.count; ++l) {
        int p = (pool_offset[ni] + l) % st.nodes[ni].n_prb;  // physical PRB index
        double branch[kRxBranches];
        for (int b = 0; b < kRxBranches; ++b)
          branch[b] = s_rx * rayleigh_power(fading_rng);
        double interference[kRxBranches] = {0.0, 0.0};
        for (const auto& [idx, rx_lin] : f.interferers) {
          int rel = (p - pool_offset[idx] + st.nodes[idx].n_prb) % st.nodes[idx].n_prb;
          if (rel >= node_used[idx]) continue;  // interferer idle on this PRB
          double i_rx = rx_lin * power_boost[idx];
          for (int b = 0; b < kRxBranches; ++b)
            interference[b] += i_rx * rayleigh_power(fading_rng);
        }
        double sinr_branches[kRxBranches];
        for (int b = 0; b < kRxBranches; ++b)
          sinr_branches[b] = branch[b] / (st.noise_lin + interference[b]);
        prb_sinr.push_back(mrc_combine(std::span<const double>(sinr_branches, kRxBranches)));
      }
      double eff = effective_sinr(prb_sinr);
      long long queue_bits = 0;
      auto qit = st.queues.find(f.key);
      if (qit != st.queues.end()) queue_bits = qit->second.total_bits();
      std::optional<HarqProcess> slot;
      auto hit = st.harq.find(f.key);
      if (hit != st.harq.end()) slot = hit->second;
      FlowTxResult r =
          resolve_transmission(queue_bits, eff, g.count, slot, cfg.harq_max_attempts, bler_rng);
      if (slot.has_value())
        st.harq[f.key] = *slot;
      else
        st.harq.erase(f.key);
      results[f.key] = r;
    }
  }

  // (7) drain served/dropped bits, then sample metrics at end of the TTI
  for (auto& [key, r] : results) {
    auto& q = st.queues[key];
    if (r.served_bits > 0) {
      long long before[2] = {q.class_bits(FlowClass::video), q.class_bits(FlowClass::safety)};
      auto departed = q.serve_bits(r.served_bits, st.clock_tti);
      // A shared bearer drains both classes FIFO, including a partial head.
      st.report.infotainment.departed_bits += before[0] - q.class_bits(FlowClass::video);
      st.report.autonomous.departed_bits += before[1] - q.class_bits(FlowClass::safety);
      for (const auto& p : departed) {
        auto& acc = st.report.slice(slice_of(p.flow_class));
        if (p.arrival_tti >= cfg.warmup_tti && measuring) {
          acc.latency_ms_hist[packet_latency(p)] += 1;
          acc.delivered_packets += 1;
        }
        if (measuring)
          st.delivered_bits[{p.vehicle_id, slice_index(slice_of(p.flow_class))}] += p.size_bits;
      }
    }
    if (r.dropped_bits > 0) {
      long long before[2] = {q.class_bits(FlowClass::video), q.class_bits(FlowClass::safety)};
      auto lost = q.drop_bits(r.dropped_bits);
      st.report.infotainment.dropped_bits += before[0] - q.class_bits(FlowClass::video);
      st.report.autonomous.dropped_bits += before[1] - q.class_bits(FlowClass::safety);
      if (measuring)
        for (const auto& p : lost)
          st.report.slice(slice_of(p.flow_class)).dropped_packets += 1;
    }
  }
  for (size_t ni = 0; ni < st.nodes.size(); ++ni) {
    for (int fi : st.nodes[ni].flow_idx) {
      const auto& key = st.flows[fi].key;
      auto rit = results.find(key);
      long long served = rit == results.end() ? 0 : rit->second.served_bits;
      double prev = st.pf_avg.count(key) ? st.pf_avg[key] : kPfAverageFloorBits;
      st.pf_avg[key] =
          std::max((1.0 - cfg.pf_beta) * prev + cfg.pf_beta * static_cast<double>(served),
                   kPfAverageFloorBits);
    }
  }
  if (measuring) {
    for (const auto& f : st.flows) {
      if (!f.active) continue;
      auto qit = st.queues.find(f.key);
      auto sample = [&](Slice s, long long bits) {
        auto& acc = st.report.slice(s);
        int nominal = s == Slice::autonomous ? kSafetyPacketBits : kVideoBitsPerTti;
        int pkts = static_cast<int>((bits + nominal - 1) / nominal);
        acc.queue_len_pkts_hist[pkts] += 1;
        acc.queue_len_bits_hist[bits] += 1;
        st.active_ttis[{f.key.vehicle_id, slice_index(s)}] += 1;
      };
      switch (f.key.kind) {
        case QueueKind::safety:
          sample(Slice::autonomous, qit == st.queues.end() ? 0 : qit->second.total_bits());
          break;
        case QueueKind::video:
          sample(Slice::infotainment, qit == st.queues.end() ? 0 : qit->second.total_bits());
          break;
        case QueueKind::merged: {
          long long safety = qit == st.queues.end() ? 0 : qit->second.class_bits(FlowClass::safety);
          long long video = qit == st.queues.end() ? 0 : qit->second.class_bits(FlowClass::video);
          sample(Slice::autonomous, safety);
          if (st.vehicles[f.key.vehicle_id].service_class == ServiceClass::video_capable)
            sample(Slice::infotainment, video);
          break;
        }
      }
    }
  }

  // (8)
  st.clock_tti += 1;
}

MetricsReport run_simulation(const SimConfig& config) {
  config.validate();
  NetworkState st(config);
  for (int t = 0; t < config.duration_tti; ++t) step(st);

  // Per-vehicle run-average throughput over each flow's active time.
  for (const auto& [key, ttis] : st.active_ttis) {
    if (ttis <= 0) continue;
    auto dit = st.delivered_bits.find(key);
    long long bits = dit == st.delivered_bits.end() ? 0 : dit->second;
    Slice s = key.second == 0 ? Slice::autonomous : Slice::infotainment;
    // bits * 1000 / TTIs keeps integer-valued rates exact in binary.
    st.report.slice(s).throughput_bps.push_back(static_cast<double>(bits) * 1000.0 /
                                                static_cast<double>(ttis));
  }
  for (const auto& [key, q] : st.queues) {
    st.report.autonomous.residual_bits += q.class_bits(FlowClass::safety);
    st.report.infotainment.residual_bits += q.class_bits(FlowClass::video);
  }
  for (Slice s : {Slice::autonomous, Slice::infotainment}) {
    auto& acc = st.report.slice(s);
    // Conservation: every arrived bit departed, dropped, was flushed at a
    // handover, or is still queued.
    assert(acc.arrived_bits ==
           acc.departed_bits + acc.dropped_bits + acc.flushed_bits + acc.residual_bits);
  }
  return st.report;
}

}  // namespace v2x
