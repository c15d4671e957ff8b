#include "v2x/slicing.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace v2x {

Eigen::MatrixXd similarity_matrix(const PointMatrix& positions, double sigma_m, bool squared) {
  if (!(sigma_m > 0.0)) throw std::invalid_argument("similarity_matrix: sigma must be > 0");
  const auto n = positions.rows();
  Eigen::MatrixXd a(n, n);
  const double denom = 2.0 * sigma_m * sigma_m;
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double d2 = (positions.row(i) - positions.row(j)).squaredNorm();
      double w = std::exp(-(squared ? d2 : std::sqrt(d2)) / denom);
      a(i, j) = w;
      a(j, i) = w;
    }
  }
  return a;
}

Eigen::MatrixXd laplacian(const Eigen::MatrixXd& similarity) {
  Eigen::MatrixXd w = similarity;
  w.diagonal().setZero();
  Eigen::VectorXd degree = w.rowwise().sum();
  Eigen::MatrixXd l = -w;
  l.diagonal() += degree;
  return l;
}

int eigengap_k(const std::vector<double>& eigenvalues_ascending, int k_max) {
  const int n = static_cast<int>(eigenvalues_ascending.size());
  if (n < 2) return 1;
  int best_i = 1;
  double best_gap = -1.0;
  for (int i = 1; i <= n - 1; ++i) {
    double gap = eigenvalues_ascending[i] - eigenvalues_ascending[i - 1];
    if (gap > best_gap) {
      best_gap = gap;
      best_i = i;
    }
  }
  return std::clamp(best_i, 1, std::max(k_max, 1));
}

Eigen::MatrixXd spectral_embed(const Eigen::MatrixXd& laplacian_matrix, int k) {
  assert(k >= 1 && k <= laplacian_matrix.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian_matrix);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("spectral_embed: eigensolver did not converge");
  return solver.eigenvectors().leftCols(k);  // eigenvalues come out ascending
}

namespace {

double sq_dist(const Eigen::MatrixXd& points, int row, const Eigen::MatrixXd& centroids, int c) {
  return (points.row(row) - centroids.row(c)).squaredNorm();
}

int count_distinct_rows(const Eigen::MatrixXd& points) {
  const int n = static_cast<int>(points.rows());
  int distinct = 0;
  for (int i = 0; i < n; ++i) {
    bool seen = false;
    for (int j = 0; j < i && !seen; ++j)
      seen = (points.row(i) - points.row(j)).squaredNorm() == 0.0;
    if (!seen) ++distinct;
  }
  return distinct;
}

}  // namespace

KmeansResult kmeans(const Eigen::MatrixXd& points, int k, std::mt19937_64& rng) {
  const int n = static_cast<int>(points.rows());
  if (n == 0) throw std::invalid_argument("kmeans: no points");
  k = std::clamp(k, 1, n);
  int distinct = count_distinct_rows(points);
  k = std::min(k, distinct);

  // k-means++ seeding
  Eigen::MatrixXd centroids(k, points.cols());
  std::uniform_int_distribution<int> pick0(0, n - 1);
  centroids.row(0) = points.row(pick0(rng));
  std::vector<double> min_d2(n);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::max();
      for (int j = 0; j < c; ++j) best = std::min(best, sq_dist(points, i, centroids, j));
      min_d2[i] = best;
      total += best;
    }
    int chosen = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> unit(0.0, total);
      double target = unit(rng);
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        acc += min_d2[i];
        if (acc >= target) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = pick0(rng);  // all points coincide with chosen centroids
    }
    centroids.row(c) = points.row(chosen);
  }

  KmeansResult result;
  result.assignment.assign(n, 0);
  std::vector<int> counts(k, 0);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = iter == 0;
    // Assignment step (ties to the lowest cluster index).
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = sq_dist(points, i, centroids, 0);
      for (int c = 1; c < k; ++c) {
        double d = sq_dist(points, i, centroids, c);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (result.assignment[i] != best) {
        result.assignment[i] = best;
        changed = true;
      }
    }
    std::fill(counts.begin(), counts.end(), 0);
    for (int i = 0; i < n; ++i) counts[result.assignment[i]]++;
    // Repair empty clusters by splitting the largest one: its member
    // farthest from the centroid becomes the seed of the empty cluster.
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      int donor = static_cast<int>(std::max_element(counts.begin(), counts.end()) -
                                   counts.begin());
      int worst = -1;
      double worst_d = -1.0;
      for (int i = 0; i < n; ++i) {
        if (result.assignment[i] != donor) continue;
        double d = sq_dist(points, i, centroids, donor);
        if (d > worst_d) {
          worst_d = d;
          worst = i;
        }
      }
      assert(worst >= 0 && counts[donor] > 1);
      counts[donor]--;
      result.assignment[worst] = c;
      counts[c] = 1;
      changed = true;
    }
    // Update step.
    centroids.setZero();
    for (int i = 0; i < n; ++i) centroids.row(result.assignment[i]) += points.row(i);
    for (int c = 0; c < k; ++c) centroids.row(c) /= static_cast<double>(counts[c]);

    double objective = 0.0;
    for (int i = 0; i < n; ++i) objective += sq_dist(points, i, centroids, result.assignment[i]);
    result.objective_history.push_back(objective);
    if (!changed) break;
  }
  result.centroids = std::move(centroids);
  return result;
}

std::vector<int> threshold_components(const Eigen::MatrixXd& similarity, double threshold) {
  const int n = static_cast<int>(similarity.rows());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (similarity(i, j) > threshold) {
        int a = find(i), b = find(j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
  std::vector<int> label(n, -1);
  int next = 0;
  for (int i = 0; i < n; ++i) {
    int root = find(i);
    if (label[root] < 0) label[root] = next++;
    label[i] = label[root];
  }
  return label;
}

std::vector<std::vector<int>> cluster_vehicles(const PointMatrix& positions, double sigma_m,
                                               bool squared, std::mt19937_64& rng) {
  const int n = static_cast<int>(positions.rows());
  if (n < 2) throw std::invalid_argument("cluster_vehicles: need at least 2 vehicles");
  Eigen::MatrixXd a = similarity_matrix(positions, sigma_m, squared);
  Eigen::MatrixXd l = laplacian(a);
  std::vector<int> assignment;
  int k = 1;
  try {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(l);
    if (solver.info() != Eigen::Success)
      throw std::runtime_error("eigensolver did not converge");
    std::vector<double> eigenvalues(solver.eigenvalues().data(),
                                    solver.eigenvalues().data() + n);
    // Cluster-count guard. Beyond k ~ n/5 the spectral embedding stops being
    // geographically local on quasi-uniform highway traffic and elected
    // leaders end up hundreds of meters from cluster members, which a 20 dBm
    // sidelink cannot serve. The guard never cuts below the zero-eigenvalue
    // multiplicity: with k under the component count, k-means would have to
    // merge mutually disconnected pieces through a rank-deficient projection.
    int zero_multiplicity = 0;
    for (double ev : eigenvalues)
      if (ev < 1e-8) ++zero_multiplicity;
    const int k_max = std::max((n + 4) / 5, zero_multiplicity);
    k = eigengap_k(eigenvalues, k_max);
    Eigen::MatrixXd embedding = solver.eigenvectors().leftCols(k);
    // Lloyd's iteration lands in poor local optima often enough here that a
    // split cluster strands members far from any usable leader; keep the
    // best of several seedings by objective.
    constexpr int kRestarts = 10;
    KmeansResult best;
    double best_objective = std::numeric_limits<double>::max();
    for (int r = 0; r < kRestarts; ++r) {
      auto km = kmeans(embedding, k, rng);
      double objective = km.objective_history.back();
      if (objective < best_objective) {
        best_objective = objective;
        best = std::move(km);
      }
    }
    k = static_cast<int>(best.centroids.rows());
    assignment = std::move(best.assignment);
  } catch (const std::runtime_error&) {
    // Degraded path: distance-threshold clustering.
    assignment = threshold_components(a, std::exp(-1.0));
    k = *std::max_element(assignment.begin(), assignment.end()) + 1;
  }
  std::vector<std::vector<int>> clusters(k);
  for (int i = 0; i < n; ++i) clusters[assignment[i]].push_back(i);
  return clusters;
}

LeaderElection select_slice_leaders(const std::vector<std::vector<int>>& clusters,
                                    const std::vector<int>& candidates,
                                    const PointMatrix& positions) {
  LeaderElection out;
  std::vector<std::vector<int>> work = clusters;
  std::vector<bool> is_candidate(positions.rows(), false);
  for (int c : candidates) is_candidate[c] = true;

  // Cluster centroids in geographic space; processed largest first.
  std::vector<int> order(work.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return work[a].size() > work[b].size(); });

  std::vector<int> leader_of(work.size(), -1);
  std::vector<bool> merged(work.size(), false);
  for (int ci : order) {
    if (work[ci].empty()) {
      merged[ci] = true;  // emptied by earlier elections; nothing to serve
      continue;
    }
    Eigen::RowVector2d centroid = Eigen::RowVector2d::Zero();
    for (int m : work[ci]) centroid += positions.row(m);
    centroid /= static_cast<double>(work[ci].size());

    int best = -1;
    double best_d = std::numeric_limits<double>::max();
    for (int v = 0; v < static_cast<int>(positions.rows()); ++v) {
      if (!is_candidate[v]) continue;
      double d = (positions.row(v) - centroid).norm();
      if (d < best_d || (d == best_d && v < best)) {
        best_d = d;
        best = v;
      }
    }
    if (best < 0) {
      // Candidate pool exhausted: fold this cluster into the nearest led one.
      merged[ci] = true;
      out.merged_clusters += 1;
      int target = -1;
      double target_d = std::numeric_limits<double>::max();
      for (size_t cj = 0; cj < work.size(); ++cj) {
        if (cj == static_cast<size_t>(ci) || merged[cj] || leader_of[cj] < 0) continue;
        Eigen::RowVector2d other = Eigen::RowVector2d::Zero();
        for (int m : work[cj]) other += positions.row(m);
        other /= static_cast<double>(work[cj].size());
        double d = (other - centroid).norm();
        if (d < target_d) {
          target_d = d;
          target = static_cast<int>(cj);
        }
      }
      if (target >= 0) {
        work[target].insert(work[target].end(), work[ci].begin(), work[ci].end());
        work[ci].clear();
      }
      continue;
    }
    leader_of[ci] = best;
    is_candidate[best] = false;
    for (auto& cl : work) std::erase(cl, best);
  }

  for (size_t ci = 0; ci < work.size(); ++ci) {
    if (leader_of[ci] < 0) continue;
    out.leaders.push_back(leader_of[ci]);
    out.clusters.push_back(std::move(work[ci]));
  }
  return out;
}

namespace {

PointMatrix local_chart(const std::vector<Vehicle>& vehicles, const std::vector<int>& ids,
                        const Rsu& rsu, double highway_length_m) {
  PointMatrix pts(ids.size(), 2);
  for (size_t i = 0; i < ids.size(); ++i) {
    const auto& v = vehicles[ids[i]];
    pts(i, 0) = ring_delta(v.x_m, rsu.x_m, highway_length_m);
    pts(i, 1) = v.y_m;
  }
  return pts;
}

}  // namespace

TopologyAssignment proposed_topology(const std::vector<Vehicle>& vehicles,
                                     const std::vector<Rsu>& rsus, double highway_length_m,
                                     double sigma_m, bool squared, int epoch_tti,
                                     std::mt19937_64& kmeans_rng) {
  TopologyAssignment topo;
  topo.epoch_tti = epoch_tti;

  std::vector<std::vector<int>> scope(rsus.size());
  for (const auto& v : vehicles)
    scope[nearest_rsu(v, rsus, highway_length_m)].push_back(v.id);

  std::vector<int> unclustered;  // vehicles in scopes too small to cluster
  std::map<int, int> home_rsu;
  for (const auto& rsu : rsus) {
    const auto& ids = scope[rsu.id];
    for (int id : ids) home_rsu[id] = rsu.id;
    if (ids.empty()) continue;
    if (ids.size() == 1) {
      unclustered.push_back(ids[0]);
      continue;
    }
    PointMatrix pts = local_chart(vehicles, ids, rsu, highway_length_m);
    auto clusters = cluster_vehicles(pts, sigma_m, squared, kmeans_rng);
    std::vector<int> candidates;
    for (size_t i = 0; i < ids.size(); ++i)
      if (vehicles[ids[i]].service_class == ServiceClass::video_capable)
        candidates.push_back(static_cast<int>(i));
    if (candidates.empty()) {
      // No SL-eligible vehicle in this cell; everyone stays on the RSU.
      for (int id : ids) unclustered.push_back(id);
      continue;
    }
    auto election = select_slice_leaders(clusters, candidates, pts);
    topo.merged_cluster_warnings += election.merged_clusters;
    std::vector<bool> assigned(ids.size(), false);
    for (size_t c = 0; c < election.leaders.size(); ++c) {
      int leader_id = ids[election.leaders[c]];
      assigned[election.leaders[c]] = true;
      topo.leaders.push_back(leader_id);
      topo.serving_map[leader_id] = NodeRef{NodeRef::Kind::rsu, rsu.id};
      std::vector<int> members;
      for (int m : election.clusters[c]) {
        assigned[m] = true;
        members.push_back(ids[m]);
      }
      topo.clusters.push_back(std::move(members));
    }
    // Clusters place the access points; each clustered vehicle is then
    // served by the nearest leader in the cell, which is what lets the
    // leader actually hold a reliable sidelink to everyone it schedules.
    for (size_t i = 0; i < ids.size(); ++i) {
      if (!assigned[i]) {
        unclustered.push_back(ids[i]);  // merge found no led target
        continue;
      }
      if (topo.serving_map.count(ids[i])) continue;  // leaders already mapped
      int best = -1;
      double best_d = std::numeric_limits<double>::max();
      for (size_t c = 0; c < election.leaders.size(); ++c) {
        int lid = ids[election.leaders[c]];
        double d = (pts.row(i) - pts.row(election.leaders[c])).norm();
        if (d < best_d || (d == best_d && lid < best)) {
          best_d = d;
          best = lid;
        }
      }
      if (best >= 0) topo.serving_map[ids[i]] = NodeRef{NodeRef::Kind::vehicle, best};
      else unclustered.push_back(ids[i]);
    }
  }

  // Vehicles without a cluster: nearest leader when one exists, else the RSU.
  for (int id : unclustered) {
    const auto& v = vehicles[id];
    int best = -1;
    double best_d = std::numeric_limits<double>::max();
    for (int lid : topo.leaders) {
      double d = ring_distance(v.x_m, v.y_m, vehicles[lid].x_m, vehicles[lid].y_m,
                               highway_length_m);
      if (d < best_d || (d == best_d && lid < best)) {
        best_d = d;
        best = lid;
      }
    }
    if (best >= 0) {
      topo.serving_map[id] = NodeRef{NodeRef::Kind::vehicle, best};
    } else {
      topo.serving_map[id] = NodeRef{NodeRef::Kind::rsu, home_rsu[id]};
      topo.rsu_fallback_warnings += 1;
    }
  }

  // Infotainment always rides the V2I link of the home RSU.
  for (const auto& v : vehicles)
    if (v.service_class == ServiceClass::video_capable)
      topo.video_map[v.id] = NodeRef{NodeRef::Kind::rsu, home_rsu[v.id]};
  return topo;
}

TopologyAssignment baseline1_topology(const std::vector<Vehicle>& vehicles,
                                      const std::vector<Rsu>& rsus, double highway_length_m,
                                      int epoch_tti) {
  TopologyAssignment topo;
  topo.epoch_tti = epoch_tti;
  for (const auto& v : vehicles) {
    NodeRef rsu{NodeRef::Kind::rsu, nearest_rsu(v, rsus, highway_length_m)};
    topo.serving_map[v.id] = rsu;
    if (v.service_class == ServiceClass::video_capable) topo.video_map[v.id] = rsu;
  }
  return topo;
}

TopologyAssignment baseline2_topology(const std::vector<Vehicle>& vehicles,
                                      const std::vector<Rsu>& rsus, double highway_length_m,
                                      const std::vector<double>& v2i_sinr_db,
                                      double offload_threshold_db, int epoch_tti) {
  assert(v2i_sinr_db.size() == vehicles.size());
  TopologyAssignment topo;
  topo.epoch_tti = epoch_tti;
  std::vector<int> home(vehicles.size());
  std::vector<bool> offloaded(vehicles.size());
  for (size_t i = 0; i < vehicles.size(); ++i) {
    home[i] = nearest_rsu(vehicles[i], rsus, highway_length_m);
    offloaded[i] = v2i_sinr_db[i] < offload_threshold_db;
  }
  for (size_t i = 0; i < vehicles.size(); ++i) {
    const auto& v = vehicles[i];
    NodeRef server{NodeRef::Kind::rsu, home[i]};
    if (offloaded[i]) {
      int relay = -1;
      double best_d = std::numeric_limits<double>::max();
      for (size_t j = 0; j < vehicles.size(); ++j) {
        if (offloaded[j] || home[j] != home[i]) continue;
        double d = ring_distance(v.x_m, v.y_m, vehicles[j].x_m, vehicles[j].y_m,
                                 highway_length_m);
        if (d < best_d || (d == best_d && vehicles[j].id < relay)) {
          best_d = d;
          relay = vehicles[j].id;
        }
      }
      if (relay >= 0) {
        server = NodeRef{NodeRef::Kind::vehicle, relay};
      } else {
        topo.offload_no_relay_warnings += 1;  // degraded: stays on the RSU
      }
    }
    topo.serving_map[v.id] = server;
    if (v.service_class == ServiceClass::video_capable) topo.video_map[v.id] = server;
  }
  return topo;
}

}  // namespace v2x
