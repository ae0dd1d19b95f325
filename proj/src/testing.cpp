#include "distkern/testing.hpp"

#include "distkern/error.hpp"
#include "distkern/parallel.hpp"
#include "distkern/random.hpp"
#include "distkern/transforms.hpp"

namespace distkern {

double permutation_p_value(double observed, std::span<const double> replicates) {
  std::size_t exceed = 0;
  for (double r : replicates) {
    if (r >= observed) ++exceed;
  }
  return static_cast<double>(1 + exceed) / static_cast<double>(replicates.size() + 1);
}

TestResult permutation_test(const PreparedStatistic& statistic, const PermutationOptions& options) {
  if (options.permutations == 0) {
    throw Error(ErrorCode::InvalidInput, "permutation count must be at least 1");
  }
  const std::size_t n = statistic.n();
  std::vector<double> replicates(options.permutations);
  parallel_for(options.permutations, options.threads, [&](std::size_t r) {
    const auto perm = random::replicate_permutation(options.seed, r, n);
    replicates[r] = statistic.evaluate(perm);
  });

  TestResult result;
  result.observed = statistic.observed();
  result.p_value = permutation_p_value(result.observed.value, replicates);
  result.permutations = options.permutations;
  result.seed = options.seed;
  if (options.keep_replicates) result.replicate_stats = std::move(replicates);
  return result;
}

TestResult permutation_test(const PairwiseMatrix& mx, const PairwiseMatrix& my, const StatOptions& stat,
                            const PermutationOptions& options) {
  if (options.permutations == 0) {
    throw Error(ErrorCode::InvalidInput, "permutation count must be at least 1");
  }
  return permutation_test(PreparedStatistic::prepare(mx, my, stat), options);
}

EquivalenceReport pvalue_equivalence_check(const PairwiseMatrix& dx, const PairwiseMatrix& dy,
                                           const PermutationOptions& options,
                                           std::optional<std::size_t> fixed_point_anchor) {
  if (dx.kind() != MatrixKind::Distance || dy.kind() != MatrixKind::Distance) {
    throw Error(ErrorCode::InvalidInput, "p-value equivalence check expects two distance matrices");
  }
  const PairwiseMatrix kx = bijective_to_kernel(dx).matrix;
  const PairwiseMatrix ky = bijective_to_kernel(dy).matrix;

  EquivalenceReport report;
  auto add = [&](std::string label, const PairwiseMatrix& ax, const PairwiseMatrix& ay, const PairwiseMatrix& bx,
                 const PairwiseMatrix& by, Estimator estimator, bool expected) {
    EquivalenceCase c;
    c.label = std::move(label);
    c.distance_side = permutation_test(ax, ay, StatOptions{estimator, false}, options);
    c.kernel_side = permutation_test(bx, by, StatOptions{estimator, false}, options);
    c.p_values_identical = c.distance_side.p_value == c.kernel_side.p_value;
    c.expected_identical = expected;
    report.cases.push_back(std::move(c));
  };

  add("biased dcov vs bijective hsic", dx, dy, kx, ky, Estimator::Biased, true);
  if (dx.n() >= 4) {
    add("unbiased dcov vs bijective hsic (uncorrected)", dx, dy, kx, ky, Estimator::Unbiased, true);
    if (fixed_point_anchor) {
      const PairwiseMatrix fx = fixed_point_to_kernel(dx, *fixed_point_anchor).matrix;
      const PairwiseMatrix fy = fixed_point_to_kernel(dy, *fixed_point_anchor).matrix;
      add("unbiased dcov vs fixed-point hsic", dx, dy, fx, fy, Estimator::Unbiased, false);
    }
  }

  report.passed = true;
  for (const auto& c : report.cases) {
    if (c.expected_identical && !c.p_values_identical) report.passed = false;
  }
  return report;
}

}  // namespace distkern
