#pragma once

// Normalized spectral clustering (Ng, Jordan and Weiss) over kernel
// affinities, and the bijective vs fixed-point comparison built on it.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "distkern/matrices.hpp"

namespace distkern {

enum class ZeroDegree {
  Error,       // throw DegenerateInput
  TreatAsOne,  // isolated node: its row of the embedding is zero
};

struct SpectralOptions {
  std::size_t restarts = 20;
  std::size_t max_iterations = 300;
  double tolerance = 1e-6;  // relative inertia change
  ZeroDegree zero_degree = ZeroDegree::Error;
  unsigned threads = 1;
};

struct ClusterResult {
  std::vector<int> labels;
  std::size_t k = 0;
  double inertia = 0.0;
  /// lambda_k - lambda_{k+1} of the normalized affinity, eigenvalues in
  /// descending order; 0 when k == N.
  double eigengap = 0.0;
  /// Clusters that ended empty in the winning restart.
  std::size_t empty_clusters = 0;
  std::size_t isolated_nodes = 0;
};

/// Embeds with the k leading eigenvectors of Deg^-1/2 K Deg^-1/2, normalizes
/// rows to unit length and runs seeded k-means++ with restarts.
/// Errors: k == 0 or k > N (InvalidInput), negative affinity (InvalidInput),
/// zero-degree row under ZeroDegree::Error (DegenerateInput).
ClusterResult spectral_cluster(const PairwiseMatrix& affinity, std::size_t k, std::uint64_t seed,
                               const SpectralOptions& options = {});

/// Lloyd iterations from k-means++ seeds; rows of `points` are observations.
/// Restart r draws from CounterStream(derive_seed(seed, kKMeans, 0), r); the
/// lowest inertia wins, ties to the lower restart.
ClusterResult kmeans(const Eigen::MatrixXd& points, std::size_t k, std::uint64_t seed,
                     const SpectralOptions& options = {});

double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

/// Index of the point with the smallest first coordinate, ties by index.
std::size_t leftmost_index(const DataMatrix& data);

struct TransformClusteringReport {
  ClusterResult bijective;
  ClusterResult fixed_point;
  std::size_t anchor = 0;
  /// Negative fixed-point kernel entries set to 0 for the affinity.
  std::size_t clamped_entries = 0;
  /// Agreement between the two labelings.
  double ari_between = 0.0;
  std::optional<double> ari_bijective;   // against truth, when supplied
  std::optional<double> ari_fixed_point;
};

/// Clusters on the bijective and fixed-point kernels induced by Euclidean
/// distances. The default anchor is leftmost_index(data). The fixed-point
/// kernel always has a zero row at the anchor; that node is handled with
/// ZeroDegree::TreatAsOne.
TransformClusteringReport compare_transform_clustering(const DataMatrix& data, std::size_t k,
                                                       std::optional<std::size_t> anchor, std::uint64_t seed,
                                                       std::optional<std::span<const int>> truth = std::nullopt,
                                                       const SpectralOptions& options = {});

/// Balanced 2-D mixture with identity covariance and component means
/// (0,0), (10,0), (0,10); observation i belongs to component i mod 3.
std::pair<DataMatrix, std::vector<int>> three_component_mixture(std::size_t n, std::uint64_t seed);

}  // namespace distkern
