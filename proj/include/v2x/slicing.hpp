#pragma once

#include <Eigen/Dense>
#include <map>
#include <random>
#include <vector>

#include "v2x/mobility.hpp"

namespace v2x {

using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, 2>;

/// Gaussian similarity between all position pairs. With squared=false the
/// exponent uses the plain Euclidean norm, exp(-||d_v - d_v'|| / (2 sigma^2));
/// with squared=true the conventional squared-distance kernel. Entries lie in
/// (0, 1] with a unit diagonal and the matrix is symmetric.
Eigen::MatrixXd similarity_matrix(const PointMatrix& positions, double sigma_m, bool squared);

/// Unnormalized graph Laplacian L = D - W, where W is the similarity with a
/// zeroed diagonal and D its degree matrix. Every row sums to zero.
Eigen::MatrixXd laplacian(const Eigen::MatrixXd& similarity);

/// Largest-gap cluster-count heuristic over ascending eigenvalues:
/// k = argmax_i (x_{i+1} - x_i), i in 1..n-1, ties to the smallest i,
/// clamped to [1, k_max]. Returns 1 when fewer than two eigenvalues.
int eigengap_k(const std::vector<double>& eigenvalues_ascending, int k_max);

/// Rows are the spectral embedding: columns are the eigenvectors of the k
/// smallest eigenvalues of the symmetric matrix L. Throws std::runtime_error
/// if the eigensolver does not converge.
Eigen::MatrixXd spectral_embed(const Eigen::MatrixXd& laplacian_matrix, int k);

struct KmeansResult {
  std::vector<int> assignment;           // point -> cluster, every cluster non-empty
  Eigen::MatrixXd centroids;             // k x dims
  std::vector<double> objective_history; // after each Lloyd iteration
};

/// Lloyd's iteration with k-means++ seeding. k is reduced to the number of
/// distinct points when necessary; empty clusters are repaired by moving the
/// point farthest from its centroid.
KmeansResult kmeans(const Eigen::MatrixXd& points, int k, std::mt19937_64& rng);

/// Connected components of the similarity graph keeping edges with weight
/// strictly above the threshold. Returns component index per node.
std::vector<int> threshold_components(const Eigen::MatrixXd& similarity, double threshold);

/// Similarity -> Laplacian -> eigengap -> spectral embedding -> k-means.
/// k is clamped to max(ceil(n/5), zero-eigenvalue multiplicity): larger
/// counts push the embedding into a regime where clusters stop being
/// geographically local, while anything below the component count would
/// force k-means to merge disconnected pieces. Falls back to components of
/// the similarity thresholded at e^-1 if the eigensolver fails. The returned
/// clusters partition {0..n-1}.
std::vector<std::vector<int>> cluster_vehicles(const PointMatrix& positions, double sigma_m,
                                               bool squared, std::mt19937_64& rng);

struct LeaderElection {
  std::vector<int> leaders;                // one per surviving cluster
  std::vector<std::vector<int>> clusters;  // leaders removed from membership
  int merged_clusters = 0;                 // clusters folded into a neighbor
};

/// Per cluster, in size-descending order, the leader is the candidate closest
/// to the cluster's geometric centroid (ties to the lowest id). An elected
/// leader leaves the candidate pool and any cluster that contained it. A
/// cluster with no candidates left merges into the nearest remaining cluster.
LeaderElection select_slice_leaders(const std::vector<std::vector<int>>& clusters,
                                    const std::vector<int>& candidates,
                                    const PointMatrix& positions);

struct NodeRef {
  enum class Kind { rsu, vehicle } kind = Kind::rsu;
  int id = 0;
  bool operator==(const NodeRef&) const = default;
  auto operator<=>(const NodeRef&) const = default;
};

/// Output of a topology policy: cluster membership, slice leaders and the
/// serving relations consumed by the schedulers until the next re-slice.
struct TopologyAssignment {
  std::vector<std::vector<int>> clusters;  // vehicle ids, pairwise disjoint
  std::vector<int> leaders;                // vehicle ids, disjoint from clusters
  std::map<int, NodeRef> serving_map;      // safety-slice serving node per vehicle
  std::map<int, NodeRef> video_map;        // infotainment serving node per video vehicle
  int epoch_tti = 0;
  int merged_cluster_warnings = 0;
  int rsu_fallback_warnings = 0;   // safety delivered by an RSU for lack of a leader
  int offload_no_relay_warnings = 0;
};

/// Proposed policy: per-RSU spectral clustering plus leader election. Cluster
/// members get safety from their leader; leaders anchor to the RSU; vehicles
/// in scopes too small to cluster use the nearest leader, else the RSU.
TopologyAssignment proposed_topology(const std::vector<Vehicle>& vehicles,
                                     const std::vector<Rsu>& rsus, double highway_length_m,
                                     double sigma_m, bool squared, int epoch_tti,
                                     std::mt19937_64& kmeans_rng);

/// Baseline 1: every vehicle is served by its nearest RSU for both slices.
TopologyAssignment baseline1_topology(const std::vector<Vehicle>& vehicles,
                                      const std::vector<Rsu>& rsus, double highway_length_m,
                                      int epoch_tti);

/// Baseline 2: vehicles whose wideband V2I SINR falls below the threshold are
/// offloaded to the geographically closest non-offloaded vehicle in the same
/// cell, which relays both traffic types; the rest stay on the RSU.
TopologyAssignment baseline2_topology(const std::vector<Vehicle>& vehicles,
                                      const std::vector<Rsu>& rsus, double highway_length_m,
                                      const std::vector<double>& v2i_sinr_db,
                                      double offload_threshold_db, int epoch_tti);

}  // namespace v2x
