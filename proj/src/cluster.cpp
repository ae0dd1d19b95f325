#include "distkern/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "distkern/error.hpp"
#include "distkern/parallel.hpp"
#include "distkern/random.hpp"
#include "distkern/transforms.hpp"

namespace distkern {

namespace {

using Index = Eigen::Index;

double squared_distance(const Eigen::MatrixXd& points, Index i, const Eigen::MatrixXd& centers, Index c) {
  return (points.row(i) - centers.row(c)).squaredNorm();
}

// k-means++: first center uniform, later ones drawn with probability
// proportional to squared distance to the nearest chosen center.
Eigen::MatrixXd plus_plus_init(const Eigen::MatrixXd& points, std::size_t k, random::CounterStream& rng) {
  const Index n = points.rows();
  Eigen::MatrixXd centers(static_cast<Index>(k), points.cols());
  centers.row(0) = points.row(rng.below(static_cast<std::uint32_t>(n)));
  std::vector<double> nearest(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
      auto& d = nearest[static_cast<std::size_t>(i)];
      d = std::min(d, squared_distance(points, i, centers, static_cast<Index>(c - 1)));
      total += d;
    }
    Index pick = 0;
    if (total > 0.0) {
      const double target = rng.uniform01() * total;
      double acc = 0.0;
      pick = n - 1;
      for (Index i = 0; i < n; ++i) {
        acc += nearest[static_cast<std::size_t>(i)];
        if (acc > target && nearest[static_cast<std::size_t>(i)] > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng.below(static_cast<std::uint32_t>(n));
    }
    centers.row(static_cast<Index>(c)) = points.row(pick);
  }
  return centers;
}

double assign(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers, std::vector<int>& labels) {
  double inertia = 0.0;
  for (Index i = 0; i < points.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int label = 0;
    for (Index c = 0; c < centers.rows(); ++c) {
      const double d = squared_distance(points, i, centers, c);
      if (d < best) {
        best = d;
        label = static_cast<int>(c);
      }
    }
    labels[static_cast<std::size_t>(i)] = label;
    inertia += best;
  }
  return inertia;
}

struct Run {
  std::vector<int> labels;
  double inertia = 0.0;
  std::size_t empty = 0;
};

Run lloyd(const Eigen::MatrixXd& points, std::size_t k, random::CounterStream rng, const SpectralOptions& options) {
  const Index n = points.rows();
  Eigen::MatrixXd centers = plus_plus_init(points, k, rng);
  Run run;
  run.labels.assign(static_cast<std::size_t>(n), 0);
  run.inertia = assign(points, centers, run.labels);

  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(centers.rows(), centers.cols());
    std::vector<std::size_t> counts(k, 0);
    for (Index i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(run.labels[static_cast<std::size_t>(i)]);
      sums.row(static_cast<Index>(c)) += points.row(i);
      ++counts[c];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        centers.row(static_cast<Index>(c)) = sums.row(static_cast<Index>(c)) / static_cast<double>(counts[c]);
        continue;
      }
      // Empty cluster: move it to the point worst served by its center.
      Index worst = 0;
      double worst_d = -1.0;
      for (Index i = 0; i < n; ++i) {
        const double d = squared_distance(points, i, centers, run.labels[static_cast<std::size_t>(i)]);
        if (d > worst_d) {
          worst_d = d;
          worst = i;
        }
      }
      centers.row(static_cast<Index>(c)) = points.row(worst);
    }
    const double next = assign(points, centers, run.labels);
    const double change = std::abs(run.inertia - next);
    run.inertia = next;
    if (change <= options.tolerance * std::max(next, std::numeric_limits<double>::min())) break;
  }

  std::vector<std::size_t> counts(k, 0);
  for (int label : run.labels) ++counts[static_cast<std::size_t>(label)];
  run.empty = static_cast<std::size_t>(std::count(counts.begin(), counts.end(), std::size_t{0}));
  return run;
}

}  // namespace

ClusterResult kmeans(const Eigen::MatrixXd& points, std::size_t k, std::uint64_t seed,
                     const SpectralOptions& options) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (k == 0 || k > n) throw Error(ErrorCode::InvalidInput, "k must lie in [1, N]");
  if (options.restarts == 0) throw Error(ErrorCode::InvalidInput, "k-means needs at least one restart");

  const std::uint64_t base = random::derive_seed(seed, random::tags::kKMeans, 0);
  std::vector<Run> runs(options.restarts);
  parallel_for(options.restarts, options.threads,
               [&](std::size_t r) { runs[r] = lloyd(points, k, random::CounterStream(base, r), options); });

  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r) {
    if (runs[r].inertia < runs[best].inertia) best = r;
  }
  ClusterResult result;
  result.k = k;
  result.labels = std::move(runs[best].labels);
  result.inertia = runs[best].inertia;
  result.empty_clusters = runs[best].empty;
  return result;
}

ClusterResult spectral_cluster(const PairwiseMatrix& affinity, std::size_t k, std::uint64_t seed,
                               const SpectralOptions& options) {
  const std::size_t n = affinity.n();
  if (k == 0 || k > n) throw Error(ErrorCode::InvalidInput, "k must lie in [1, N]");
  const Eigen::MatrixXd& a = affinity.values();
  if (a.minCoeff() < 0.0) throw Error(ErrorCode::InvalidInput, "affinity entries must be non-negative");

  Eigen::VectorXd inv_sqrt(static_cast<Index>(n));
  std::size_t isolated = 0;
  for (Index i = 0; i < static_cast<Index>(n); ++i) {
    const double degree = a.col(i).sum();
    if (degree <= 0.0) {
      if (options.zero_degree == ZeroDegree::Error) {
        throw Error(ErrorCode::DegenerateInput, "affinity row " + std::to_string(i) + " has zero degree");
      }
      ++isolated;
      inv_sqrt(i) = 1.0;
    } else {
      inv_sqrt(i) = 1.0 / std::sqrt(degree);
    }
  }

  const Eigen::MatrixXd l = inv_sqrt.asDiagonal() * a * inv_sqrt.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(l);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::InvalidInput, "symmetric eigensolver did not converge");
  }
  const Index nn = static_cast<Index>(n);
  const Index kk = static_cast<Index>(k);
  // Eigenvalues ascend, so the k leading ones are the last k columns.
  Eigen::MatrixXd embedding = solver.eigenvectors().rightCols(kk);
  for (Index i = 0; i < nn; ++i) {
    const double norm = embedding.row(i).norm();
    if (norm > 0.0) embedding.row(i) /= norm;
  }

  ClusterResult result = kmeans(embedding, k, seed, options);
  result.eigengap = k < n ? solver.eigenvalues()(nn - kk) - solver.eigenvalues()(nn - kk - 1) : 0.0;
  result.isolated_nodes = isolated;
  return result;
}

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::SizeMismatch, "label vectors differ in length");
  const std::size_t n = a.size();
  if (n < 2) return 1.0;

  std::map<std::pair<int, int>, double> cells;
  std::map<int, double> rows;
  std::map<int, double> cols;
  for (std::size_t i = 0; i < n; ++i) {
    cells[{a[i], b[i]}] += 1.0;
    rows[a[i]] += 1.0;
    cols[b[i]] += 1.0;
  }
  auto pairs = [](double m) { return m * (m - 1.0) / 2.0; };
  double index = 0.0;
  for (const auto& [key, m] : cells) index += pairs(m);
  double sum_rows = 0.0;
  for (const auto& [key, m] : rows) sum_rows += pairs(m);
  double sum_cols = 0.0;
  for (const auto& [key, m] : cols) sum_cols += pairs(m);

  const double expected = sum_rows * sum_cols / pairs(static_cast<double>(n));
  const double max_index = 0.5 * (sum_rows + sum_cols);
  // Both partitions trivial (all singletons or one block) on the same side.
  if (max_index == expected) return index == max_index ? 1.0 : 0.0;
  return (index - expected) / (max_index - expected);
}

std::size_t leftmost_index(const DataMatrix& data) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < data.n(); ++i) {
    if (data(i, 0) < data(best, 0)) best = i;
  }
  return best;
}

TransformClusteringReport compare_transform_clustering(const DataMatrix& data, std::size_t k,
                                                       std::optional<std::size_t> anchor, std::uint64_t seed,
                                                       std::optional<std::span<const int>> truth,
                                                       const SpectralOptions& options) {
  if (truth && truth->size() != data.n()) {
    throw Error(ErrorCode::SizeMismatch, "truth labels and data differ in length");
  }
  const PairwiseMatrix d = distance_matrix(data, Metric::Euclidean);

  TransformClusteringReport report;
  report.anchor = anchor.value_or(leftmost_index(data));
  report.bijective = spectral_cluster(bijective_to_kernel(d).matrix, k, seed, options);

  const PairwiseMatrix fixed = fixed_point_to_kernel(d, report.anchor).matrix;
  Eigen::MatrixXd clamped = fixed.values();
  for (Index j = 0; j < clamped.cols(); ++j) {
    for (Index i = 0; i < clamped.rows(); ++i) {
      if (clamped(i, j) < 0.0) {
        clamped(i, j) = 0.0;
        ++report.clamped_entries;
      }
    }
  }
  SpectralOptions fixed_options = options;
  fixed_options.zero_degree = ZeroDegree::TreatAsOne;
  report.fixed_point = spectral_cluster(PairwiseMatrix(std::move(clamped), MatrixKind::Kernel,
                                                       "fixed-point kernel (clamped)", fixed.lineage()),
                                        k, seed, fixed_options);

  report.ari_between = adjusted_rand_index(report.bijective.labels, report.fixed_point.labels);
  if (truth) {
    report.ari_bijective = adjusted_rand_index(report.bijective.labels, *truth);
    report.ari_fixed_point = adjusted_rand_index(report.fixed_point.labels, *truth);
  }
  return report;
}

std::pair<DataMatrix, std::vector<int>> three_component_mixture(std::size_t n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::SampleTooSmall, "mixture needs n >= 1");
  static constexpr double means[3][2] = {{0.0, 0.0}, {10.0, 0.0}, {0.0, 10.0}};
  random::CounterStream rng(random::derive_seed(seed, random::tags::kSimulation, 1), 0);
  Eigen::MatrixXd x(static_cast<Index>(n), 2);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int c = static_cast<int>(i % 3);
    labels[i] = c;
    x(static_cast<Index>(i), 0) = means[c][0] + rng.normal();
    x(static_cast<Index>(i), 1) = means[c][1] + rng.normal();
  }
  return {DataMatrix(std::move(x)), std::move(labels)};
}

}  // namespace distkern
