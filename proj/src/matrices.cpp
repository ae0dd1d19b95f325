#include "distkern/matrices.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "distkern/error.hpp"

namespace distkern {

namespace {

using Index = Eigen::Index;

void require_finite(const Eigen::MatrixXd& m, const char* what) {
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      if (!std::isfinite(m(i, j))) {
        std::ostringstream msg;
        msg << what << ": non-finite entry at (" << i << ", " << j << ")";
        throw Error(ErrorCode::InvalidInput, msg.str());
      }
    }
  }
}

double squared_euclidean(const Eigen::MatrixXd& x, Index a, Index b) {
  double acc = 0.0;
  for (Index c = 0; c < x.cols(); ++c) {
    const double diff = x(a, c) - x(b, c);
    acc += diff * diff;
  }
  return acc;
}

double l1(const Eigen::MatrixXd& x, Index a, Index b) {
  double acc = 0.0;
  for (Index c = 0; c < x.cols(); ++c) acc += std::abs(x(a, c) - x(b, c));
  return acc;
}

// Fills the upper triangle through fn and mirrors it, so symmetry is exact.
template <typename Fn>
Eigen::MatrixXd symmetric_from_pairs(Index n, double diagonal, Fn&& fn) {
  Eigen::MatrixXd out(n, n);
  for (Index j = 0; j < n; ++j) {
    out(j, j) = diagonal;
    for (Index i = 0; i < j; ++i) {
      const double v = fn(i, j);
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

Eigen::VectorXd row_sums(const Eigen::MatrixXd& m) {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(m.rows());
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) s(i) += m(i, j);
  }
  return s;
}

Eigen::VectorXd col_sums(const Eigen::MatrixXd& m) {
  Eigen::VectorXd s(m.cols());
  for (Index j = 0; j < m.cols(); ++j) {
    double acc = 0.0;
    for (Index i = 0; i < m.rows(); ++i) acc += m(i, j);
    s(j) = acc;
  }
  return s;
}

Eigen::MatrixXd left_center_values(const Eigen::MatrixXd& m) {
  const double n = static_cast<double>(m.rows());
  const Eigen::VectorXd cs = col_sums(m);
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (Index j = 0; j < m.cols(); ++j) {
    const double mean = cs(j) / n;
    for (Index i = 0; i < m.rows(); ++i) out(i, j) = m(i, j) - mean;
  }
  return out;
}

Eigen::MatrixXd right_center_values(const Eigen::MatrixXd& m) {
  const double n = static_cast<double>(m.cols());
  const Eigen::VectorXd rs = row_sums(m);
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) out(i, j) = m(i, j) - rs(i) / n;
  }
  return out;
}

}  // namespace

DataMatrix::DataMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw Error(ErrorCode::InvalidInput, "data matrix needs at least one row and one column");
  }
  require_finite(values_, "data matrix");
}

DataMatrix DataMatrix::from_column(std::span<const double> column) {
  Eigen::MatrixXd m(static_cast<Index>(column.size()), 1);
  for (std::size_t i = 0; i < column.size(); ++i) m(static_cast<Index>(i), 0) = column[i];
  return DataMatrix(std::move(m));
}

const char* to_string(MatrixKind kind) {
  return kind == MatrixKind::Distance ? "distance" : "kernel";
}

const char* to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::Bijective: return "bijective";
    case TransformKind::BijectiveScaled: return "bijective-scaled";
    case TransformKind::FixedPoint: return "fixed-point";
  }
  return "unknown";
}

const char* to_string(Centering centering) {
  switch (centering) {
    case Centering::Left: return "left";
    case Centering::Right: return "right";
    case Centering::Double: return "double";
    case Centering::UCentered: return "u-centered";
  }
  return "unknown";
}

const char* to_string(Metric metric) {
  return metric == Metric::Euclidean ? "euclidean" : "l1";
}

const char* to_string(KernelFamily family) {
  return family == KernelFamily::Gaussian ? "gaussian" : "laplacian";
}

const char* to_string(GaussianScale scale) {
  return scale == GaussianScale::TwoSigmaSquared ? "two-sigma-squared" : "sigma-squared";
}

std::optional<double> TransformSpec::affine_offset() const {
  switch (kind) {
    case TransformKind::Bijective: return max_used;
    case TransformKind::BijectiveScaled: return 1.0;
    case TransformKind::FixedPoint: return std::nullopt;
  }
  return std::nullopt;
}

std::string KernelSpec::describe() const {
  std::ostringstream s;
  s << to_string(family) << " kernel (";
  if (bandwidth) {
    s << "bandwidth=" << *bandwidth;
  } else {
    s << "median bandwidth";
  }
  if (family == KernelFamily::Gaussian) s << ", " << to_string(gaussian_scale);
  s << ")";
  return s.str();
}

PairwiseMatrix::PairwiseMatrix(Eigen::MatrixXd values, MatrixKind kind, std::string provenance,
                               std::optional<TransformSpec> lineage, Validation validation)
    : values_(std::move(values)),
      kind_(kind),
      provenance_(std::move(provenance)),
      lineage_(std::move(lineage)) {
  if (values_.rows() < 1 || values_.rows() != values_.cols()) {
    throw Error(ErrorCode::InvalidInput, "pairwise matrix must be square and non-empty");
  }
  require_finite(values_, "pairwise matrix");
  const Index n = values_.rows();
  max_element_ = values_(0, 0);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      const double v = values_(i, j);
      max_element_ = std::max(max_element_, v);
      if (i < j && v != values_(j, i)) {
        std::ostringstream msg;
        msg << "pairwise matrix is not symmetric at (" << i << ", " << j << ")";
        throw Error(ErrorCode::InvalidInput, msg.str());
      }
    }
  }
  if (kind_ != MatrixKind::Distance) return;

  for (Index i = 0; i < n; ++i) {
    if (values_(i, i) != 0.0) warnings_.nonzero_diagonal = true;
  }
  warnings_.negative_entries = values_.minCoeff() < 0.0;
  if (validation == Validation::Strict && warnings_.any()) {
    throw Error(ErrorCode::InvalidInput,
                warnings_.nonzero_diagonal ? "distance matrix has a non-zero diagonal"
                                           : "distance matrix has negative entries");
  }
}

PairwiseMatrix distance_matrix(const DataMatrix& data, Metric metric) {
  const Eigen::MatrixXd& x = data.values();
  const Index n = x.rows();
  Eigen::MatrixXd d = metric == Metric::Euclidean
                          ? symmetric_from_pairs(n, 0.0, [&](Index a, Index b) {
                              return std::sqrt(squared_euclidean(x, a, b));
                            })
                          : symmetric_from_pairs(n, 0.0, [&](Index a, Index b) { return l1(x, a, b); });
  return PairwiseMatrix(std::move(d), MatrixKind::Distance, std::string(to_string(metric)) + " distance");
}

double median_heuristic_bandwidth(const DataMatrix& data) {
  const Eigen::MatrixXd& x = data.values();
  const Index n = x.rows();
  if (n < 2) {
    throw Error(ErrorCode::SampleTooSmall, "median heuristic needs at least two observations");
  }
  std::vector<double> pool;
  pool.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Index j = 1; j < n; ++j) {
    for (Index i = 0; i < j; ++i) pool.push_back(std::sqrt(squared_euclidean(x, i, j)));
  }
  return detail::median_in_place(pool);
}

PairwiseMatrix kernel_matrix(const DataMatrix& data, const KernelSpec& spec) {
  double sigma = 0.0;
  if (spec.bandwidth) {
    sigma = *spec.bandwidth;
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
      throw Error(ErrorCode::InvalidInput, "kernel bandwidth must be positive and finite");
    }
  } else {
    sigma = median_heuristic_bandwidth(data);
    if (!(sigma > 0.0)) {
      throw Error(ErrorCode::DegenerateBandwidth,
                  "median pairwise distance is zero; all points coincide");
    }
  }

  const Eigen::MatrixXd& x = data.values();
  const Index n = x.rows();
  Eigen::MatrixXd k;
  if (spec.family == KernelFamily::Gaussian) {
    const double denom =
        spec.gaussian_scale == GaussianScale::TwoSigmaSquared ? 2.0 * sigma * sigma : sigma * sigma;
    k = symmetric_from_pairs(n, 1.0, [&](Index a, Index b) {
      return std::exp(-squared_euclidean(x, a, b) / denom);
    });
  } else {
    k = symmetric_from_pairs(n, 1.0, [&](Index a, Index b) { return std::exp(-l1(x, a, b) / sigma); });
  }

  std::ostringstream provenance;
  KernelSpec resolved = spec;
  resolved.bandwidth = sigma;
  provenance << resolved.describe();
  if (!spec.bandwidth) provenance << " from median heuristic";
  return PairwiseMatrix(std::move(k), MatrixKind::Kernel, provenance.str());
}

CenteredMatrix double_center(const PairwiseMatrix& m) {
  return CenteredMatrix(detail::double_center_values(m.values()), Centering::Double);
}

CenteredMatrix double_center(const CenteredMatrix& m) {
  return CenteredMatrix(detail::double_center_values(m.values()), Centering::Double);
}

CenteredMatrix single_center(const PairwiseMatrix& m, Side side) {
  if (side == Side::Left) return CenteredMatrix(left_center_values(m.values()), Centering::Left);
  return CenteredMatrix(right_center_values(m.values()), Centering::Right);
}

CenteredMatrix single_center(const CenteredMatrix& m, Side side) {
  Centering out = side == Side::Left ? Centering::Left : Centering::Right;
  if ((m.centering() == Centering::Left && side == Side::Right) ||
      (m.centering() == Centering::Right && side == Side::Left) || m.centering() == Centering::Double) {
    out = Centering::Double;
  }
  return CenteredMatrix(side == Side::Left ? left_center_values(m.values()) : right_center_values(m.values()),
                        out);
}

CenteredMatrix u_center(const PairwiseMatrix& m) {
  if (m.n() < 4) {
    throw Error(ErrorCode::SampleTooSmall, "U-centering needs at least four observations");
  }
  return CenteredMatrix(detail::u_center_values(m.values()), Centering::UCentered);
}

namespace detail {

double accurate_sum(const Eigen::MatrixXd& m) {
  double sum = 0.0;
  double compensation = 0.0;
  const double* data = m.data();
  const Index size = m.size();
  for (Index k = 0; k < size; ++k) {
    const double v = data[k];
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      compensation += (sum - t) + v;
    } else {
      compensation += (v - t) + sum;
    }
    sum = t;
  }
  return sum + compensation;
}

Eigen::MatrixXd double_center_values(const Eigen::MatrixXd& m) {
  const Index n = m.rows();
  const double nd = static_cast<double>(n);
  const Eigen::VectorXd rs = row_sums(m);
  const Eigen::VectorXd cs = col_sums(m);
  const double grand_mean = accurate_sum(m) / (nd * nd);
  Eigen::MatrixXd out(n, n);
  for (Index j = 0; j < n; ++j) {
    const double col_mean = cs(j) / nd;
    for (Index i = 0; i < n; ++i) out(i, j) = m(i, j) - rs(i) / nd - col_mean + grand_mean;
  }
  return out;
}

Eigen::MatrixXd u_center_values(const Eigen::MatrixXd& m) {
  const Index n = m.rows();
  const double nd = static_cast<double>(n);
  const Eigen::VectorXd rs = row_sums(m);
  const Eigen::VectorXd cs = col_sums(m);
  const double grand = accurate_sum(m) / ((nd - 1.0) * (nd - 2.0));
  Eigen::MatrixXd out(n, n);
  for (Index j = 0; j < n; ++j) {
    const double col_term = cs(j) / (nd - 2.0);
    for (Index i = 0; i < n; ++i) {
      out(i, j) = i == j ? 0.0 : m(i, j) - rs(i) / (nd - 2.0) - col_term + grand;
    }
  }
  return out;
}

double median_in_place(std::span<double> values) {
  if (values.empty()) throw Error(ErrorCode::InvalidInput, "median of an empty pool");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

}  // namespace detail

}  // namespace distkern
