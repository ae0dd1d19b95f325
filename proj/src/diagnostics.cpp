#include "distkern/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "distkern/error.hpp"
#include "distkern/transforms.hpp"

namespace distkern {

namespace {

using Index = Eigen::Index;

double eigen_scale(const Eigen::MatrixXd& m) { return std::max(1.0, m.cwiseAbs().maxCoeff()); }

std::vector<double> sorted_eigenvalues(const Eigen::MatrixXd& m, Eigen::VectorXd* extreme_vector, bool want_max) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, extreme_vector ? Eigen::ComputeEigenvectors
                                                                          : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::InvalidInput, "symmetric eigensolver did not converge");
  }
  const Eigen::VectorXd& ev = solver.eigenvalues();  // ascending
  if (extreme_vector) {
    *extreme_vector = solver.eigenvectors().col(want_max ? ev.size() - 1 : 0);
  }
  return std::vector<double>(ev.data(), ev.data() + ev.size());
}

// Leading coefficients of the eigenvector, enough to reproduce the violation.
Witness eigen_witness(const std::string& what, double eigenvalue, const Eigen::VectorXd& vec) {
  Witness w;
  std::ostringstream desc;
  desc << what << " eigenvalue " << eigenvalue;
  w.description = desc.str();
  w.values.push_back(eigenvalue);
  Index top = 0;
  vec.cwiseAbs().maxCoeff(&top);
  w.indices.push_back(static_cast<std::size_t>(top));
  for (Index i = 0; i < vec.size(); ++i) w.values.push_back(vec(i));
  return w;
}

PropertyReport min_eigen_check(Property property, const Eigen::MatrixXd& m, double scale, double tol,
                               const char* label) {
  PropertyReport report;
  report.property = property;
  report.tolerance = tol;
  Eigen::VectorXd vec;
  report.eigenvalues = sorted_eigenvalues(m, &vec, false);
  const double lowest = report.eigenvalues.front();
  report.holds = lowest >= -tol * scale;
  if (!report.holds) report.witness = eigen_witness(label, lowest, vec);
  return report;
}

}  // namespace

const char* to_string(Property property) {
  switch (property) {
    case Property::NegativeType: return "negative-type";
    case Property::PositiveDefinite: return "positive-definite";
    case Property::RankPreserving: return "rank-preserving";
    case Property::TranslationInvariant: return "translation-invariant";
    case Property::Bijective: return "bijective";
  }
  return "unknown";
}

PropertyReport check_positive_definite(const PairwiseMatrix& k, double tol) {
  return min_eigen_check(Property::PositiveDefinite, k.values(), eigen_scale(k.values()), tol, "minimum");
}

PropertyReport check_positive_definite_zero_sum(const PairwiseMatrix& k, double tol) {
  return min_eigen_check(Property::PositiveDefinite, detail::double_center_values(k.values()),
                         eigen_scale(k.values()), tol, "minimum centered");
}

PropertyReport check_negative_type(const PairwiseMatrix& d, double tol) {
  if (d.warnings().nonzero_diagonal) {
    throw Error(ErrorCode::InvalidInput, "negative-type check needs a zero diagonal");
  }
  PropertyReport report;
  report.property = Property::NegativeType;
  report.tolerance = tol;
  Eigen::VectorXd vec;
  report.eigenvalues = sorted_eigenvalues(detail::double_center_values(d.values()), &vec, true);
  const double highest = report.eigenvalues.back();
  report.holds = highest <= tol * eigen_scale(d.values());
  if (!report.holds) report.witness = eigen_witness("maximum centered", highest, vec);
  return report;
}

Theorem1Report check_theorem1_biconditional(const PairwiseMatrix& d, double tol) {
  Theorem1Report report;
  report.negative_type = check_negative_type(d, tol);
  const PairwiseMatrix k = bijective_to_kernel(d).matrix;
  report.kernel_zero_sum_psd = check_positive_definite_zero_sum(k, tol);
  report.kernel_psd = check_positive_definite(k, tol);
  report.consistent = report.negative_type.holds == report.kernel_zero_sum_psd.holds &&
                      report.negative_type.holds == report.kernel_psd.holds;
  return report;
}

PropertyReport audit_rank_preservation(const PairwiseMatrix& m, const PairwiseMatrix& t) {
  if (m.n() != t.n()) throw Error(ErrorCode::SizeMismatch, "rank audit needs matrices of equal size");
  PropertyReport report;
  report.property = Property::RankPreserving;
  const std::size_t n = m.n();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n && report.holds; ++i) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return m(i, a) < m(i, b); });
    for (std::size_t q = 1; q < n; ++q) {
      const std::size_t s = order[q - 1];
      const std::size_t u = order[q];
      const bool tie = m(i, s) == m(i, u);
      // Rounding of max - d can merge distinct neighbours, so order is checked weakly.
      const bool ok = tie ? t(i, s) == t(i, u) : t(i, s) >= t(i, u);
      if (!ok) {
        Witness w;
        std::ostringstream desc;
        desc << "row " << i << ": m(" << i << "," << s << ")=" << m(i, s) << (tie ? " == " : " < ") << "m(" << i
             << "," << u << ")=" << m(i, u) << " but t(" << i << "," << s << ")=" << t(i, s) << ", t(" << i << ","
             << u << ")=" << t(i, u);
        w.description = desc.str();
        w.indices = {i, s, u};
        w.values = {m(i, s), m(i, u), t(i, s), t(i, u)};
        report.holds = false;
        report.witness = std::move(w);
        break;
      }
    }
  }
  return report;
}

PropertyReport audit_translation_invariance(const DataMatrix& data, const PairwiseMatrix& m, double data_tol,
                                            double value_tol) {
  if (data.n() != m.n()) throw Error(ErrorCode::SizeMismatch, "data and matrix sizes differ");
  PropertyReport report;
  report.property = Property::TranslationInvariant;
  report.tolerance = value_tol;

  const Eigen::MatrixXd& x = data.values();
  const double data_scale = std::max(1.0, x.cwiseAbs().maxCoeff());
  const double quantum = data_tol * data_scale;
  const double value_slack = value_tol * eigen_scale(m.values());

  // Difference vectors are quantized and sign-normalized (first non-zero
  // coordinate positive), so i-j and j-i land in the same group.
  struct Group {
    std::size_t i, j;
    double value;
  };
  std::map<std::vector<long long>, Group> groups;
  const std::size_t n = data.n();
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i <= j; ++i) {
      std::vector<long long> key(data.p());
      for (std::size_t c = 0; c < data.p(); ++c) {
        key[c] = std::llround((x(static_cast<Index>(i), static_cast<Index>(c)) -
                               x(static_cast<Index>(j), static_cast<Index>(c))) /
                              quantum);
      }
      const auto nz = std::find_if(key.begin(), key.end(), [](long long v) { return v != 0; });
      if (nz != key.end() && *nz < 0) {
        for (auto& v : key) v = -v;
      }
      const double value = m(i, j);
      auto [it, inserted] = groups.try_emplace(std::move(key), Group{i, j, value});
      if (!inserted && std::abs(it->second.value - value) > value_slack) {
        Witness w;
        std::ostringstream desc;
        desc << "pairs (" << it->second.i << "," << it->second.j << ") and (" << i << "," << j
             << ") share a difference vector but m = " << it->second.value << " vs " << value;
        w.description = desc.str();
        w.indices = {it->second.i, it->second.j, i, j};
        w.values = {it->second.value, value};
        report.holds = false;
        report.witness = std::move(w);
        return report;
      }
    }
  }
  return report;
}

PropertyReport audit_bijectivity(const PairwiseMatrix& original, const PairwiseMatrix& round_trip) {
  if (original.n() != round_trip.n()) throw Error(ErrorCode::SizeMismatch, "round-trip changed the size");
  PropertyReport report;
  report.property = Property::Bijective;
  const std::size_t n = original.n();
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      if (original(i, j) != round_trip(i, j)) {
        Witness w;
        std::ostringstream desc;
        desc.precision(17);
        desc << "entry (" << i << "," << j << "): " << original(i, j) << " became " << round_trip(i, j);
        w.description = desc.str();
        w.indices = {i, j};
        w.values = {original(i, j), round_trip(i, j)};
        report.holds = false;
        report.witness = std::move(w);
        return report;
      }
    }
  }
  return report;
}

}  // namespace distkern
