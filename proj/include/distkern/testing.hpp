#pragma once

// Seeded permutation tests.
//
// Replicate r relabels y by random::replicate_permutation(seed, r, N), a pure
// function of (seed, r), so results do not depend on how replicates are spread
// over threads. The p-value is (1 + #{r : T_r >= T_obs}) / (R + 1); ties count
// as exceedances.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "distkern/matrices.hpp"
#include "distkern/stats.hpp"

namespace distkern {

inline constexpr std::size_t kDefaultPermutations = 1000;

struct TestResult {
  StatValue observed;
  double p_value = 1.0;
  std::size_t permutations = 0;
  std::uint64_t seed = 0;
  std::vector<double> replicate_stats;  // empty unless requested
};

struct PermutationOptions {
  std::size_t permutations = kDefaultPermutations;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool keep_replicates = false;
};

double permutation_p_value(double observed, std::span<const double> replicates);

TestResult permutation_test(const PreparedStatistic& statistic, const PermutationOptions& options);
TestResult permutation_test(const PairwiseMatrix& mx, const PairwiseMatrix& my, const StatOptions& stat,
                            const PermutationOptions& options);

/// One paired comparison: the same permutation stream applied to a distance
/// statistic and to the matching kernel statistic.
struct EquivalenceCase {
  std::string label;
  TestResult distance_side;
  TestResult kernel_side;
  bool p_values_identical = false;
  /// Whether identical p-values are guaranteed for this pairing. The
  /// fixed-point unbiased pairing is a negative control and is not.
  bool expected_identical = true;
};

struct EquivalenceReport {
  std::vector<EquivalenceCase> cases;
  /// Every case with expected_identical has bit-identical p-values.
  bool passed = false;
};

/// Runs biased and unbiased Dcov on (dx, dy) against HSIC on their bijective
/// induced kernels with a shared permutation stream. With an anchor, also
/// adds the unbiased fixed-point HSIC as a negative control. Unbiased cases
/// are skipped for N < 4.
EquivalenceReport pvalue_equivalence_check(const PairwiseMatrix& dx, const PairwiseMatrix& dy,
                                           const PermutationOptions& options,
                                           std::optional<std::size_t> fixed_point_anchor = std::nullopt);

}  // namespace distkern
