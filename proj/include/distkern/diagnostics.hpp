#pragma once

// Finite-sample property certificates for distance and kernel matrices.
//
// Eigenvalue tests use Eigen's symmetric eigensolver. Tolerances are relative:
// a check passes when the offending eigenvalue is within tol * scale of zero,
// where scale = max(1, max |entry|) of the matrix being certified.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "distkern/matrices.hpp"

namespace distkern {

inline constexpr double kDefaultEigenTolerance = 1e-8;

enum class Property { NegativeType, PositiveDefinite, RankPreserving, TranslationInvariant, Bijective };

const char* to_string(Property property);

struct Witness {
  std::string description;
  std::vector<std::size_t> indices;
  std::vector<double> values;
};

struct PropertyReport {
  Property property = Property::PositiveDefinite;
  bool holds = true;
  std::optional<Witness> witness;  // present whenever holds == false
  double tolerance = 0.0;
  /// Sorted ascending; only filled by the eigenvalue checks.
  std::vector<double> eigenvalues;
};

/// Minimum eigenvalue >= -tol * max(1, max|k|).
PropertyReport check_positive_definite(const PairwiseMatrix& k, double tol = kDefaultEigenTolerance);

/// Maximum eigenvalue of H D H <= tol * max(1, max|d|). On zero-sum vectors
/// the quadratic forms of D and H D H agree, and H projects onto them.
PropertyReport check_negative_type(const PairwiseMatrix& d, double tol = kDefaultEigenTolerance);

/// PSD test restricted to zero-sum coefficient vectors: minimum eigenvalue of
/// H K H >= -tol * max(1, max|k|).
PropertyReport check_positive_definite_zero_sum(const PairwiseMatrix& k, double tol = kDefaultEigenTolerance);

struct Theorem1Report {
  PropertyReport negative_type;        // d
  PropertyReport kernel_zero_sum_psd;  // max(d) J - d on zero-sum vectors
  PropertyReport kernel_psd;           // max(d) J - d on all vectors
  /// negative_type.holds == kernel_zero_sum_psd.holds == kernel_psd.holds
  bool consistent = false;
};

/// Negative type of d against positive definiteness of its bijective
/// induced kernel, both the zero-sum restricted and the full form.
Theorem1Report check_theorem1_biconditional(const PairwiseMatrix& d, double tol = kDefaultEigenTolerance);

/// For every row i, the order of row i of m is exactly reversed in t:
/// m(i,s) < m(i,u) implies t(i,s) > t(i,u), and ties stay ties.
PropertyReport audit_rank_preservation(const PairwiseMatrix& m, const PairwiseMatrix& t);

/// Pairs whose difference vectors x_i - x_j agree up to sign (within
/// data_tol * data scale) must have entries of m equal within value_tol *
/// max(1, max|m|).
PropertyReport audit_translation_invariance(const DataMatrix& data, const PairwiseMatrix& m,
                                            double data_tol = 1e-9, double value_tol = 1e-12);

/// Bitwise equality of a matrix and its transform round-trip.
PropertyReport audit_bijectivity(const PairwiseMatrix& original, const PairwiseMatrix& round_trip);

}  // namespace distkern
