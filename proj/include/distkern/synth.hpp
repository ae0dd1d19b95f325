#pragma once

// Simulated dependence structures and the power-estimation harness.
//
// All relations are one-dimensional in x and y. Draws come from
// CounterStream(derive_seed(seed, kSimulation, 0), 0) in observation order;
// for each i the x-side draws are taken before the noise draws.

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "distkern/matrices.hpp"
#include "distkern/stats.hpp"

namespace distkern {

enum class Relation { Quadratic, Linear, Spiral, Sine, IndependentCloud };

const char* to_string(Relation relation);
Relation parse_relation(const std::string& text);

struct SimulationSpec {
  Relation relation = Relation::Quadratic;
  std::size_t n = 100;
  double noise = 0.0;
  std::uint64_t seed = 0;
};

void validate(const SimulationSpec& spec);

/// Quadratic: x_i = i/n, y = x^2 + noise*e.
/// Linear:    x ~ U(-1,1), y = x + noise*e.
/// Sine:      x ~ U(-1,1), y = sin(4 pi x) + noise*e.
/// Spiral:    u ~ U(0,5), x = u cos(pi u) + 0.4 noise e1, y = u sin(pi u) + 0.4 noise e2.
/// IndependentCloud: x, y independent N(0,1).
std::pair<DataMatrix, DataMatrix> generate(const SimulationSpec& spec);

struct PowerOptions {
  double alpha = 0.05;
  std::size_t trials = 1000;
  std::size_t permutations = 199;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct PowerReport {
  Relation relation = Relation::Quadratic;
  std::size_t n = 0;
  double noise = 0.0;
  std::string method;
  double alpha = 0.05;
  std::size_t trials = 0;
  std::size_t permutations = 0;
  std::uint64_t seed = 0;
  std::size_t rejections = 0;
  double power = 0.0;
  double monte_carlo_se = 0.0;
  std::vector<double> p_values;  // one per trial, in trial order
};

/// Seed of trial t's data and permutation streams.
std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial);

/// Trial t draws data with SimulationSpec{relation, n, noise, trial_seed(seed, t)}
/// (spec.seed is ignored) and rejects when its permutation p-value <= alpha.
PowerReport estimate_power(const SimulationSpec& spec, const PipelineConfig& method, const PowerOptions& options);

}  // namespace distkern
