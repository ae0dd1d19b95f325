#pragma once

// Pairwise distance and kernel matrices built from sample data, plus the
// centering operators every statistic in the library is defined through.
//
// Centering never materializes H = I - J/N. Row, column and grand means are
// enough for every form used here and keep centering at O(N^2).

#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include <Eigen/Dense>

namespace distkern {

/// N observations (rows) by p dimensions (columns), all entries finite.
class DataMatrix {
 public:
  explicit DataMatrix(Eigen::MatrixXd values);

  /// One-dimensional sample, one observation per element.
  static DataMatrix from_column(std::span<const double> column);

  std::size_t n() const { return static_cast<std::size_t>(values_.rows()); }
  std::size_t p() const { return static_cast<std::size_t>(values_.cols()); }
  double operator()(std::size_t i, std::size_t c) const {
    return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
  }
  const Eigen::MatrixXd& values() const { return values_; }

 private:
  Eigen::MatrixXd values_;
};

enum class MatrixKind { Distance, Kernel };

enum class TransformKind { Bijective, BijectiveScaled, FixedPoint };

const char* to_string(MatrixKind kind);
const char* to_string(TransformKind kind);

/// Records which metric/kernel transform produced a matrix so that it can be
/// inverted exactly. max_used is the max element consumed by the bijective
/// variants; anchor is the fixed-point observation index.
struct TransformSpec {
  TransformKind kind = TransformKind::Bijective;
  std::optional<double> max_used;
  std::optional<std::size_t> anchor;

  /// Constant c such that the induced matrix is c*J - (source), i.e. the
  /// offset the unbiased correction has to add back. Only defined for the
  /// bijective variants.
  std::optional<double> affine_offset() const;
};

enum class Validation { Strict, Lenient };

/// Soft violations of the Distance invariants, recorded instead of thrown
/// when a matrix is built with Validation::Lenient.
struct MatrixWarnings {
  bool nonzero_diagonal = false;
  bool negative_entries = false;

  bool any() const { return nonzero_diagonal || negative_entries; }
};

/// Symmetric N x N matrix tagged as a distance or kernel matrix.
///
/// Symmetry is checked bitwise. Distance matrices must have a zero diagonal
/// and non-negative entries; with Validation::Lenient those two conditions
/// only raise warnings. Non-finite entries and asymmetry are always errors.
class PairwiseMatrix {
 public:
  PairwiseMatrix(Eigen::MatrixXd values, MatrixKind kind, std::string provenance,
                 std::optional<TransformSpec> lineage = std::nullopt,
                 Validation validation = Validation::Strict);

  std::size_t n() const { return static_cast<std::size_t>(values_.rows()); }
  MatrixKind kind() const { return kind_; }
  double max_element() const { return max_element_; }
  const std::string& provenance() const { return provenance_; }
  const std::optional<TransformSpec>& lineage() const { return lineage_; }
  const MatrixWarnings& warnings() const { return warnings_; }
  const Eigen::MatrixXd& values() const { return values_; }

  double operator()(std::size_t i, std::size_t j) const {
    return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

 private:
  Eigen::MatrixXd values_;
  MatrixKind kind_;
  double max_element_ = 0.0;
  std::string provenance_;
  std::optional<TransformSpec> lineage_;
  MatrixWarnings warnings_;
};

enum class Centering { Left, Right, Double, UCentered };

const char* to_string(Centering centering);

class CenteredMatrix {
 public:
  CenteredMatrix(Eigen::MatrixXd values, Centering centering)
      : values_(std::move(values)), centering_(centering) {}

  std::size_t n() const { return static_cast<std::size_t>(values_.rows()); }
  Centering centering() const { return centering_; }
  const Eigen::MatrixXd& values() const { return values_; }
  double operator()(std::size_t i, std::size_t j) const {
    return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

 private:
  Eigen::MatrixXd values_;
  Centering centering_;
};

enum class Metric { Euclidean, L1 };

const char* to_string(Metric metric);

enum class KernelFamily { Gaussian, Laplacian };

/// Denominator convention of the Gaussian kernel: exp(-d^2 / (2 s^2)) or
/// exp(-d^2 / s^2).
enum class GaussianScale { TwoSigmaSquared, SigmaSquared };

const char* to_string(KernelFamily family);
const char* to_string(GaussianScale scale);

struct KernelSpec {
  KernelFamily family = KernelFamily::Gaussian;
  /// Explicit bandwidth; empty selects the median heuristic.
  std::optional<double> bandwidth;
  GaussianScale gaussian_scale = GaussianScale::TwoSigmaSquared;

  std::string describe() const;
};

PairwiseMatrix distance_matrix(const DataMatrix& data, Metric metric);

/// Median of the N(N-1)/2 strictly off-diagonal pairwise Euclidean distances.
/// Zero distances between duplicate points stay in the pool. Throws
/// SampleTooSmall for N < 2.
double median_heuristic_bandwidth(const DataMatrix& data);

/// Builds the kernel matrix. The median heuristic throws DegenerateBandwidth
/// when the median distance is zero.
PairwiseMatrix kernel_matrix(const DataMatrix& data, const KernelSpec& spec);

enum class Side { Left, Right };

/// H M H via row/column/grand means.
CenteredMatrix double_center(const PairwiseMatrix& m);
CenteredMatrix double_center(const CenteredMatrix& m);

/// Left: H M (subtract column means). Right: M H (subtract row means).
CenteredMatrix single_center(const PairwiseMatrix& m, Side side);
/// Applying the opposite side to an already single-centered matrix yields a
/// matrix tagged Double.
CenteredMatrix single_center(const CenteredMatrix& m, Side side);

/// The U-centering used by the unbiased statistics. Requires N >= 4.
CenteredMatrix u_center(const PairwiseMatrix& m);

namespace detail {

/// Neumaier-compensated sum over all entries, in storage order.
double accurate_sum(const Eigen::MatrixXd& m);

Eigen::MatrixXd double_center_values(const Eigen::MatrixXd& m);
Eigen::MatrixXd u_center_values(const Eigen::MatrixXd& m);

/// Median with the even-length rule (mean of the two central values).
/// Reorders the input.
double median_in_place(std::span<double> values);

}  // namespace detail

}  // namespace distkern
