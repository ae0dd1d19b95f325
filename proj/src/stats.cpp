#include "distkern/stats.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "distkern/error.hpp"

namespace distkern {

namespace {

using Index = Eigen::Index;

constexpr double kDegenerateSelfStat = 1e-300;

double trace_sum(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Index n = a.rows();
  double total = 0.0;
  for (Index j = 0; j < n; ++j) {
    double column = 0.0;
    for (Index i = 0; i < n; ++i) column += a(i, j) * b(i, j);
    total += column;
  }
  return total;
}

double trace_sum_permuted(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                          std::span<const std::size_t> perm) {
  const Index n = a.rows();
  double total = 0.0;
  for (Index j = 0; j < n; ++j) {
    const double* b_col = b.data() + static_cast<Index>(perm[static_cast<std::size_t>(j)]) * n;
    const double* a_col = a.data() + j * n;
    double column = 0.0;
    for (Index i = 0; i < n; ++i) column += a_col[i] * b_col[perm[static_cast<std::size_t>(i)]];
    total += column;
  }
  return total;
}

// U-centered bijective induced kernel with the off-diagonal offset restored.
Eigen::MatrixXd corrected_centered(const PairwiseMatrix& m) {
  double offset = 0.0;
  Eigen::MatrixXd u;
  if (m.kind() == MatrixKind::Distance) {
    const Transformed k = bijective_to_kernel(m);
    offset = *k.spec.affine_offset();
    u = detail::u_center_values(k.matrix.values());
  } else {
    const auto& lineage = m.lineage();
    if (!lineage || !lineage->affine_offset()) {
      throw Error(ErrorCode::InvalidInput,
                  "corrected estimator needs distance matrices or bijective induced kernels");
    }
    offset = *lineage->affine_offset();
    u = detail::u_center_values(m.values());
  }
  const Index n = u.rows();
  const double shift = offset / static_cast<double>(n - 1);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      if (i != j) u(i, j) += shift;
    }
  }
  return u;
}

}  // namespace

const char* to_string(Family family) { return family == Family::Dcov ? "dcov" : "hsic"; }

const char* to_string(Estimator estimator) {
  switch (estimator) {
    case Estimator::Biased: return "biased";
    case Estimator::Unbiased: return "unbiased";
    case Estimator::CorrectedUnbiased: return "corrected-unbiased";
  }
  return "unknown";
}

std::string StatVariant::describe() const {
  std::string s = to_string(family);
  s += biased ? " biased" : " unbiased";
  if (corrected) s += " corrected";
  if (normalized) s += " normalized";
  return s;
}

PreparedStatistic PreparedStatistic::prepare(const PairwiseMatrix& mx, const PairwiseMatrix& my,
                                             const StatOptions& options) {
  if (mx.n() != my.n()) {
    std::ostringstream msg;
    msg << "matrix sizes differ: " << mx.n() << " vs " << my.n();
    throw Error(ErrorCode::SizeMismatch, msg.str());
  }
  if (mx.kind() != my.kind()) {
    throw Error(ErrorCode::InvalidInput, "both matrices must be distances or both kernels");
  }
  const std::size_t n = mx.n();
  const bool unbiased = options.estimator != Estimator::Biased;
  if (n < 2) throw Error(ErrorCode::SampleTooSmall, "statistics need at least two observations");
  if (unbiased && n < 4) {
    throw Error(ErrorCode::SampleTooSmall, "unbiased statistics need at least four observations");
  }

  PreparedStatistic p;
  const double nd = static_cast<double>(n);
  switch (options.estimator) {
    case Estimator::Biased:
      p.a_ = detail::double_center_values(mx.values());
      p.b_ = detail::double_center_values(my.values());
      p.scale_ = 1.0 / (nd * nd);
      break;
    case Estimator::Unbiased:
      p.a_ = detail::u_center_values(mx.values());
      p.b_ = detail::u_center_values(my.values());
      p.scale_ = 1.0 / (nd * (nd - 3.0));
      break;
    case Estimator::CorrectedUnbiased:
      p.a_ = corrected_centered(mx);
      p.b_ = corrected_centered(my);
      p.scale_ = 1.0 / (nd * (nd - 3.0));
      break;
  }

  const bool corrected = options.estimator == Estimator::CorrectedUnbiased;
  p.variant_.family = corrected || mx.kind() == MatrixKind::Kernel ? Family::Hsic : Family::Dcov;
  p.variant_.biased = !unbiased;
  p.variant_.normalized = options.normalized;
  p.variant_.corrected = corrected;

  std::ostringstream lineage;
  lineage << to_string(p.variant_.family);
  if (corrected && mx.kind() == MatrixKind::Distance) lineage << " via bijective kernels";
  lineage << " [x: " << mx.provenance() << "; y: " << my.provenance() << "]";
  p.lineage_ = lineage.str();

  if (options.normalized) {
    const double self_x = p.scale_ * trace_sum(p.a_, p.a_);
    const double self_y = p.scale_ * trace_sum(p.b_, p.b_);
    if (!(self_x > kDegenerateSelfStat) || !(self_y > kDegenerateSelfStat)) {
      p.degenerate_ = true;
    } else {
      p.normalizer_ = std::sqrt(self_x) * std::sqrt(self_y);
    }
  }
  return p;
}

double PreparedStatistic::finish(double raw_sum) const {
  if (degenerate_) return 0.0;
  const double value = scale_ * raw_sum;
  return variant_.normalized ? value / normalizer_ : value;
}

double PreparedStatistic::evaluate(std::span<const std::size_t> perm) const {
  if (perm.size() != n()) throw Error(ErrorCode::SizeMismatch, "permutation length differs from N");
  return finish(trace_sum_permuted(a_, b_, perm));
}

double PreparedStatistic::evaluate_identity() const { return finish(trace_sum(a_, b_)); }

StatValue PreparedStatistic::observed() const {
  return StatValue{evaluate_identity(), variant_, n(), lineage_};
}

StatValue compute_statistic(const PairwiseMatrix& mx, const PairwiseMatrix& my, const StatOptions& options) {
  return PreparedStatistic::prepare(mx, my, options).observed();
}

StatValue biased_stat(const PairwiseMatrix& mx, const PairwiseMatrix& my) {
  return compute_statistic(mx, my, StatOptions{Estimator::Biased, false});
}

StatValue normalized_stat(const PairwiseMatrix& mx, const PairwiseMatrix& my, Estimator estimator) {
  return compute_statistic(mx, my, StatOptions{estimator, true});
}

StatValue unbiased_stat(const PairwiseMatrix& mx, const PairwiseMatrix& my) {
  return compute_statistic(mx, my, StatOptions{Estimator::Unbiased, false});
}

StatValue corrected_unbiased_hsic(const PairwiseMatrix& d, const PairwiseMatrix& other_d) {
  if (d.kind() != MatrixKind::Distance || other_d.kind() != MatrixKind::Distance) {
    throw Error(ErrorCode::InvalidInput, "corrected_unbiased_hsic expects two distance matrices");
  }
  return compute_statistic(d, other_d, StatOptions{Estimator::CorrectedUnbiased, false});
}

std::string PipelineConfig::describe() const {
  std::ostringstream s;
  if (const auto* metric = std::get_if<Metric>(&representation)) {
    s << to_string(*metric) << " distance";
  } else {
    s << std::get<KernelSpec>(representation).describe();
  }
  if (transform != TransformChoice::None) {
    s << " -> " << to_string(transform);
    if (transform == TransformChoice::FixedPoint) s << " (anchor " << anchor << ")";
  }
  s << " | " << to_string(options.estimator) << (options.normalized ? " normalized" : "");
  return s.str();
}

void validate(const PipelineConfig& config) {
  if (config.options.estimator != Estimator::CorrectedUnbiased) return;
  const bool from_metric = std::holds_alternative<Metric>(config.representation);
  // The inputs must end up as distances or as kernels with a bijective lineage.
  const bool ok = from_metric ? config.transform != TransformChoice::FixedPoint
                              : config.transform != TransformChoice::None;
  if (!ok) {
    throw Error(ErrorCode::InvalidInput,
                "the corrected estimator applies to distances or their bijective induced kernels");
  }
}

std::pair<PairwiseMatrix, PairwiseMatrix> build_matrices(const DataMatrix& x, const DataMatrix& y,
                                                         const PipelineConfig& config) {
  validate(config);
  if (x.n() != y.n()) {
    std::ostringstream msg;
    msg << "x has " << x.n() << " observations, y has " << y.n();
    throw Error(ErrorCode::SizeMismatch, msg.str());
  }
  auto base = [&](const DataMatrix& data) {
    if (const auto* metric = std::get_if<Metric>(&config.representation)) {
      return distance_matrix(data, *metric);
    }
    return kernel_matrix(data, std::get<KernelSpec>(config.representation));
  };
  PairwiseMatrix mx = apply_transform(base(x), config.transform, config.anchor);
  PairwiseMatrix my = apply_transform(base(y), config.transform, config.anchor);
  return {std::move(mx), std::move(my)};
}

StatValue stat_pipeline(const DataMatrix& x, const DataMatrix& y, const PipelineConfig& config) {
  auto [mx, my] = build_matrices(x, y, config);
  return compute_statistic(mx, my, config.options);
}

}  // namespace distkern
