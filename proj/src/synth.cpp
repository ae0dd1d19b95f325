#include "distkern/synth.hpp"

#include <cmath>
#include <numbers>

#include "distkern/error.hpp"
#include "distkern/parallel.hpp"
#include "distkern/random.hpp"
#include "distkern/testing.hpp"

namespace distkern {

const char* to_string(Relation relation) {
  switch (relation) {
    case Relation::Quadratic: return "quadratic";
    case Relation::Linear: return "linear";
    case Relation::Spiral: return "spiral";
    case Relation::Sine: return "sine";
    case Relation::IndependentCloud: return "independent-cloud";
  }
  return "unknown";
}

Relation parse_relation(const std::string& text) {
  for (Relation r : {Relation::Quadratic, Relation::Linear, Relation::Spiral, Relation::Sine,
                     Relation::IndependentCloud}) {
    if (text == to_string(r)) return r;
  }
  if (text == "cloud" || text == "independent") return Relation::IndependentCloud;
  throw Error(ErrorCode::InvalidInput, "unknown relation '" + text + "'");
}

void validate(const SimulationSpec& spec) {
  if (spec.n < 2) throw Error(ErrorCode::SampleTooSmall, "simulation needs n >= 2");
  if (!(spec.noise >= 0.0) || !std::isfinite(spec.noise)) {
    throw Error(ErrorCode::InvalidInput, "noise must be finite and >= 0");
  }
}

std::pair<DataMatrix, DataMatrix> generate(const SimulationSpec& spec) {
  validate(spec);
  random::CounterStream rng(random::derive_seed(spec.seed, random::tags::kSimulation, 0), 0);
  const auto n = static_cast<Eigen::Index>(spec.n);
  Eigen::MatrixXd x(n, 1);
  Eigen::MatrixXd y(n, 1);
  constexpr double pi = std::numbers::pi;

  for (Eigen::Index i = 0; i < n; ++i) {
    switch (spec.relation) {
      case Relation::Quadratic: {
        const double xi = static_cast<double>(i + 1) / static_cast<double>(n);
        x(i, 0) = xi;
        y(i, 0) = xi * xi + (spec.noise > 0.0 ? spec.noise * rng.normal() : 0.0);
        break;
      }
      case Relation::Linear: {
        const double xi = rng.uniform(-1.0, 1.0);
        x(i, 0) = xi;
        y(i, 0) = xi + spec.noise * rng.normal();
        break;
      }
      case Relation::Sine: {
        const double xi = rng.uniform(-1.0, 1.0);
        x(i, 0) = xi;
        y(i, 0) = std::sin(4.0 * pi * xi) + spec.noise * rng.normal();
        break;
      }
      case Relation::Spiral: {
        const double u = rng.uniform(0.0, 5.0);
        const double e1 = rng.normal();
        const double e2 = rng.normal();
        x(i, 0) = u * std::cos(pi * u) + 0.4 * spec.noise * e1;
        y(i, 0) = u * std::sin(pi * u) + 0.4 * spec.noise * e2;
        break;
      }
      case Relation::IndependentCloud: {
        x(i, 0) = rng.normal();
        y(i, 0) = rng.normal();
        break;
      }
    }
  }
  return {DataMatrix(std::move(x)), DataMatrix(std::move(y))};
}

std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial) {
  return random::derive_seed(seed, random::tags::kTrialData, trial);
}

PowerReport estimate_power(const SimulationSpec& spec, const PipelineConfig& method, const PowerOptions& options) {
  validate(spec);
  validate(method);
  if (options.trials < 1) throw Error(ErrorCode::InvalidInput, "power needs at least one trial");
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) {
    throw Error(ErrorCode::InvalidInput, "alpha must lie in (0, 1)");
  }
  if (options.permutations < 1) throw Error(ErrorCode::InvalidInput, "power needs at least one permutation");

  PowerReport report;
  report.relation = spec.relation;
  report.n = spec.n;
  report.noise = spec.noise;
  report.method = method.describe();
  report.alpha = options.alpha;
  report.trials = options.trials;
  report.permutations = options.permutations;
  report.seed = options.seed;
  report.p_values.assign(options.trials, 1.0);

  parallel_for(options.trials, options.threads, [&](std::size_t t) {
    SimulationSpec trial = spec;
    trial.seed = trial_seed(options.seed, t);
    const auto [x, y] = generate(trial);
    const auto [mx, my] = build_matrices(x, y, method);
    PermutationOptions perm;
    perm.permutations = options.permutations;
    perm.seed = trial.seed;
    perm.threads = 1;
    report.p_values[t] = permutation_test(mx, my, method.options, perm).p_value;
  });

  for (double p : report.p_values) {
    if (p <= options.alpha) ++report.rejections;
  }
  const double m = static_cast<double>(options.trials);
  report.power = static_cast<double>(report.rejections) / m;
  report.monte_carlo_se = std::sqrt(report.power * (1.0 - report.power) / m);
  return report;
}

}  // namespace distkern
