#include "distkern/transforms.hpp"

#include <sstream>

#include "distkern/error.hpp"

namespace distkern {

namespace {

using Index = Eigen::Index;

void require_kind(const PairwiseMatrix& m, MatrixKind kind, const char* op) {
  if (m.kind() != kind) {
    std::ostringstream msg;
    msg << op << " expects a " << to_string(kind) << " matrix, got " << to_string(m.kind());
    throw Error(ErrorCode::InvalidInput, msg.str());
  }
}

void require_anchor(const PairwiseMatrix& m, std::size_t anchor) {
  if (anchor >= m.n()) {
    std::ostringstream msg;
    msg << "anchor index " << anchor << " out of range for N = " << m.n();
    throw Error(ErrorCode::OutOfRange, msg.str());
  }
}

Eigen::MatrixXd offset_minus(double offset, const Eigen::MatrixXd& m) {
  return (Eigen::MatrixXd::Constant(m.rows(), m.cols(), offset) - m).eval();
}

}  // namespace

Transformed bijective_to_kernel(const PairwiseMatrix& d) {
  require_kind(d, MatrixKind::Distance, "bijective_to_kernel");
  const double max_used = d.max_element();
  TransformSpec spec{TransformKind::Bijective, max_used, std::nullopt};
  PairwiseMatrix k(offset_minus(max_used, d.values()), MatrixKind::Kernel,
                   "bijective kernel from " + d.provenance(), spec);
  return {std::move(k), spec};
}

Transformed bijective_to_metric(const PairwiseMatrix& k) {
  require_kind(k, MatrixKind::Kernel, "bijective_to_metric");
  const double max_used = k.max_element();
  TransformSpec spec{TransformKind::Bijective, max_used, std::nullopt};
  PairwiseMatrix d(offset_minus(max_used, k.values()), MatrixKind::Distance,
                   "bijective metric from " + k.provenance(), spec, Validation::Lenient);
  return {std::move(d), spec};
}

Transformed bijective_scaled(const PairwiseMatrix& m) {
  const double max_used = m.max_element();
  if (!(max_used > 0.0)) {
    throw Error(ErrorCode::DegenerateInput,
                "scaled bijection needs a positive max element; use the unscaled transform");
  }
  const MatrixKind out_kind = m.kind() == MatrixKind::Distance ? MatrixKind::Kernel : MatrixKind::Distance;
  TransformSpec spec{TransformKind::BijectiveScaled, max_used, std::nullopt};
  Eigen::MatrixXd values = (1.0 - m.values().array() / max_used).matrix();
  std::string provenance = std::string("scaled bijective ") +
                           (out_kind == MatrixKind::Kernel ? "kernel" : "metric") + " from " + m.provenance();
  PairwiseMatrix out(std::move(values), out_kind, std::move(provenance), spec, Validation::Lenient);
  return {std::move(out), spec};
}

Transformed fixed_point_to_kernel(const PairwiseMatrix& d, std::size_t anchor) {
  require_kind(d, MatrixKind::Distance, "fixed_point_to_kernel");
  require_anchor(d, anchor);
  const Index n = static_cast<Index>(d.n());
  const Index z = static_cast<Index>(anchor);
  const Eigen::MatrixXd& dv = d.values();
  Eigen::MatrixXd k(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i <= j; ++i) {
      const double v = dv(i, z) + dv(j, z) - dv(i, j);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  TransformSpec spec{TransformKind::FixedPoint, std::nullopt, anchor};
  std::ostringstream provenance;
  provenance << "fixed-point kernel (anchor " << anchor << ") from " << d.provenance();
  PairwiseMatrix out(std::move(k), MatrixKind::Kernel, provenance.str(), spec);
  return {std::move(out), spec};
}

PairwiseMatrix fixed_point_to_metric(const PairwiseMatrix& k) {
  require_kind(k, MatrixKind::Kernel, "fixed_point_to_metric");
  const Index n = static_cast<Index>(k.n());
  const Eigen::MatrixXd& kv = k.values();
  Eigen::MatrixXd d(n, n);
  for (Index j = 0; j < n; ++j) {
    d(j, j) = 0.0;
    for (Index i = 0; i < j; ++i) {
      const double v = 0.5 * kv(i, i) + 0.5 * kv(j, j) - kv(i, j);
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return PairwiseMatrix(std::move(d), MatrixKind::Distance, "fixed-point metric from " + k.provenance(),
                        TransformSpec{TransformKind::FixedPoint, std::nullopt, std::nullopt},
                        Validation::Lenient);
}

Eigen::VectorXd fixed_point_shift(const PairwiseMatrix& d, std::size_t anchor) {
  require_kind(d, MatrixKind::Distance, "fixed_point_shift");
  require_anchor(d, anchor);
  const double half_max = d.max_element() / 2.0;
  return (half_max - d.values().col(static_cast<Index>(anchor)).array()).matrix();
}

const char* to_string(TransformChoice choice) {
  switch (choice) {
    case TransformChoice::None: return "none";
    case TransformChoice::Bijective: return "bijective";
    case TransformChoice::BijectiveScaled: return "bijective-scaled";
    case TransformChoice::FixedPoint: return "fixed-point";
  }
  return "unknown";
}

PairwiseMatrix apply_transform(const PairwiseMatrix& m, TransformChoice choice, std::size_t anchor) {
  const bool from_distance = m.kind() == MatrixKind::Distance;
  switch (choice) {
    case TransformChoice::None: return m;
    case TransformChoice::Bijective:
      return from_distance ? bijective_to_kernel(m).matrix : bijective_to_metric(m).matrix;
    case TransformChoice::BijectiveScaled: return bijective_scaled(m).matrix;
    case TransformChoice::FixedPoint:
      return from_distance ? fixed_point_to_kernel(m, anchor).matrix : fixed_point_to_metric(m);
  }
  throw Error(ErrorCode::InvalidInput, "unknown transform");
}

}  // namespace distkern
