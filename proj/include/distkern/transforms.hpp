#pragma once

// Metric <-> kernel transformations on sample matrices.
//
// The bijective transform maps a distance matrix D to max(D) - D and a kernel
// matrix K to max(K) - K. The fixed-point transform anchors on one sample
// observation z: k(i,j) = d(i,z) + d(j,z) - d(i,j), and back via
// d(i,j) = k(i,i)/2 + k(j,j)/2 - k(i,j).

#include <cstddef>
#include <optional>

#include <Eigen/Dense>

#include "distkern/matrices.hpp"

namespace distkern {

struct Transformed {
  PairwiseMatrix matrix;
  TransformSpec spec;
};

/// max(D) - D. Requires a Distance matrix.
Transformed bijective_to_kernel(const PairwiseMatrix& d);

/// max(K) - K. When the kernel max is not on a constant diagonal the result is
/// still tagged Distance but carries warnings().nonzero_diagonal.
Transformed bijective_to_metric(const PairwiseMatrix& k);

/// 1 - M / max(M), flipping the kind. Throws DegenerateInput when max <= 0.
Transformed bijective_scaled(const PairwiseMatrix& m);

/// Fixed-point induced kernel anchored at observation `anchor`.
Transformed fixed_point_to_kernel(const PairwiseMatrix& d, std::size_t anchor);

/// Fixed-point induced metric k(i,i)/2 + k(j,j)/2 - k(i,j).
PairwiseMatrix fixed_point_to_metric(const PairwiseMatrix& k);

/// Shift f with bijective(i,j) == fixed_point(i,j) + f(i) + f(j), where
/// f(i) = max(D)/2 - d(i, anchor).
Eigen::VectorXd fixed_point_shift(const PairwiseMatrix& d, std::size_t anchor);

enum class TransformChoice { None, Bijective, BijectiveScaled, FixedPoint };

const char* to_string(TransformChoice choice);

/// Dispatches on the input kind: distances go to kernels and kernels to
/// distances. The anchor is only consulted for FixedPoint on distances.
PairwiseMatrix apply_transform(const PairwiseMatrix& m, TransformChoice choice,
                               std::size_t anchor = 0);

}  // namespace distkern
