#pragma once

// Distance covariance / HSIC statistics on pairwise matrices.
//
// Every variant has the form  scale * trace(A B)  where A and B are centered
// versions of the two input matrices:
//
//   biased     A = H Mx H,  B = H My H,  scale = 1 / N^2
//   unbiased   A, B U-centered,          scale = 1 / (N (N - 3))
//   corrected  as unbiased, computed on bijective induced kernels with
//              max/(N-1) added back to every off-diagonal entry, which makes
//              it coincide with the unbiased statistic on the distances.
//
// A and B are symmetric, so the trace is the entrywise sum of A o B and no
// matrix product is formed. Centering commutes with simultaneous row/column
// permutation, so a permutation replicate reuses the centered matrices.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>

#include <Eigen/Dense>

#include "distkern/matrices.hpp"
#include "distkern/transforms.hpp"

namespace distkern {

enum class Family { Dcov, Hsic };

const char* to_string(Family family);

/// Describes which statistic a value is.
struct StatVariant {
  Family family = Family::Dcov;
  bool biased = true;
  bool normalized = false;
  bool corrected = false;

  std::string describe() const;
  bool operator==(const StatVariant&) const = default;
};

enum class Estimator { Biased, Unbiased, CorrectedUnbiased };

const char* to_string(Estimator estimator);

/// What to compute. The family follows from the matrix kinds.
struct StatOptions {
  Estimator estimator = Estimator::Biased;
  bool normalized = false;
};

struct StatValue {
  double value = 0.0;
  StatVariant variant;
  std::size_t n = 0;
  /// Family plus provenance of both inputs, e.g. "Hsic [x: bijective kernel from euclidean distance; ...]".
  std::string lineage;
};

/// Centered pair ready for repeated evaluation under permutations of y.
class PreparedStatistic {
 public:
  static PreparedStatistic prepare(const PairwiseMatrix& mx, const PairwiseMatrix& my, const StatOptions& options);

  /// Statistic with y's observations relabelled by perm (y index perm[i] is
  /// paired with x index i). perm must be a permutation of 0..N-1.
  double evaluate(std::span<const std::size_t> perm) const;
  double evaluate_identity() const;

  StatValue observed() const;

  std::size_t n() const { return static_cast<std::size_t>(a_.rows()); }
  const StatVariant& variant() const { return variant_; }
  const std::string& lineage() const { return lineage_; }
  /// True when normalization hit a zero self-statistic; every evaluation is 0.
  bool degenerate() const { return degenerate_; }
  const Eigen::MatrixXd& x_centered() const { return a_; }
  const Eigen::MatrixXd& y_centered() const { return b_; }

 private:
  PreparedStatistic() = default;
  double finish(double raw_sum) const;

  Eigen::MatrixXd a_;
  Eigen::MatrixXd b_;
  double scale_ = 1.0;
  double normalizer_ = 1.0;
  bool degenerate_ = false;
  StatVariant variant_;
  std::string lineage_;
};

/// (1/N^2) trace(H Mx H H My H).
StatValue biased_stat(const PairwiseMatrix& mx, const PairwiseMatrix& my);

/// Cauchy-Schwarz normalization of the chosen estimator. A self-statistic
/// <= 1e-300 makes the value 0.
StatValue normalized_stat(const PairwiseMatrix& mx, const PairwiseMatrix& my,
                          Estimator estimator = Estimator::Biased);

/// (1/(N(N-3))) trace(Cx Cy) with U-centered Cx, Cy. Requires N >= 4.
StatValue unbiased_stat(const PairwiseMatrix& mx, const PairwiseMatrix& my);

/// Unbiased HSIC on the bijective induced kernels of two distance matrices,
/// with max/(N-1) added to the off-diagonal of each U-centered kernel.
/// Equal to unbiased_stat(d, other_d).
StatValue corrected_unbiased_hsic(const PairwiseMatrix& d, const PairwiseMatrix& other_d);

StatValue compute_statistic(const PairwiseMatrix& mx, const PairwiseMatrix& my, const StatOptions& options);

/// Declarative data -> statistic composition.
struct PipelineConfig {
  std::variant<Metric, KernelSpec> representation = Metric::Euclidean;
  TransformChoice transform = TransformChoice::None;
  std::size_t anchor = 0;
  StatOptions options;

  std::string describe() const;
};

/// Throws InvalidInput for combinations that cannot be computed, e.g. the
/// corrected estimator on kernels that are not bijective induced kernels.
void validate(const PipelineConfig& config);

std::pair<PairwiseMatrix, PairwiseMatrix> build_matrices(const DataMatrix& x, const DataMatrix& y,
                                                         const PipelineConfig& config);

StatValue stat_pipeline(const DataMatrix& x, const DataMatrix& y, const PipelineConfig& config);

}  // namespace distkern
