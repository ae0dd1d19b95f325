#pragma once

#include <random>

#include <Eigen/Dense>

#include "distkern/matrices.hpp"

namespace testutil {

inline Eigen::MatrixXd gaussian_data(std::size_t n, std::size_t p, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index c = 0; c < x.cols(); ++c) x(i, c) = normal(gen);
  return x;
}

inline distkern::DataMatrix data(std::size_t n, std::size_t p, unsigned seed) {
  return distkern::DataMatrix(gaussian_data(n, p, seed));
}

inline distkern::PairwiseMatrix distance(const Eigen::MatrixXd& values) {
  return distkern::PairwiseMatrix(values, distkern::MatrixKind::Distance, "test");
}

inline distkern::PairwiseMatrix kernel(const Eigen::MatrixXd& values) {
  return distkern::PairwiseMatrix(values, distkern::MatrixKind::Kernel, "test");
}

inline Eigen::MatrixXd mat(std::initializer_list<std::initializer_list<double>> rows) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

}  // namespace testutil
