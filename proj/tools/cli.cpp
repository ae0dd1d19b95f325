#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "distkern/cluster.hpp"
#include "distkern/csv.hpp"
#include "distkern/diagnostics.hpp"
#include "distkern/error.hpp"
#include "distkern/matrices.hpp"
#include "distkern/stats.hpp"
#include "distkern/synth.hpp"
#include "distkern/testing.hpp"
#include "distkern/transforms.hpp"

namespace distkern::cli {

namespace {

using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::vector<std::string> kTransformNames = {"none", "bijective", "bijective-scaled", "fixed-point"};
const std::vector<std::string> kVariantNames = {"biased", "unbiased", "normalized", "corrected"};

// ---------------------------------------------------------------------------
// Option groups shared by several subcommands.

struct Common {
  std::string output;
  unsigned threads = 1;
  bool timing = false;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("-o,--output", c.output, "Write the JSON report to this file instead of standard output");
  app->add_option("--threads", c.threads, "Worker threads (0 = hardware concurrency); results do not depend on it")
      ->capture_default_str();
  app->add_flag("--timing", c.timing, "Fill elapsed_ms in the report (otherwise null, keeping output reproducible)");
}

struct Inputs {
  std::string x;
  std::string y;
  bool header = false;
  bool matrix_in = false;
  std::string kind = "distance";
  CLI::Option* kind_opt = nullptr;
};

void add_inputs(CLI::App* app, Inputs& in, bool with_y) {
  app->add_option("--x", in.x, with_y ? "CSV of the x sample (rows = observations) or, with --matrix-in, its N x N matrix"
                                      : "CSV of the sample (rows = observations) or, with --matrix-in, an N x N matrix")
      ->required();
  if (with_y) {
    app->add_option("--y", in.y, "CSV of the y sample or, with --matrix-in, its N x N matrix")->required();
  }
  app->add_flag("--header", in.header, "Skip the first CSV line");
  app->add_flag("--matrix-in", in.matrix_in, "Inputs are precomputed pairwise matrices instead of data");
  in.kind_opt = app->add_option("--kind", in.kind, "Matrix kind for --matrix-in")
                    ->check(CLI::IsMember({"distance", "kernel"}))
                    ->capture_default_str();
}

struct Representation {
  std::string metric = "euclidean";
  std::string kernel;
  double bandwidth = 0.0;
  std::string gaussian_scale = "two-sigma-squared";
  std::string transform = "none";
  std::size_t anchor = 0;
  CLI::Option* metric_opt = nullptr;
  CLI::Option* kernel_opt = nullptr;
  CLI::Option* bandwidth_opt = nullptr;
  CLI::Option* scale_opt = nullptr;
  CLI::Option* anchor_opt = nullptr;

  bool uses_kernel() const { return !kernel.empty(); }
};

void add_representation(CLI::App* app, Representation& r, bool with_transform) {
  r.metric_opt = app->add_option("--metric", r.metric, "Distance metric")
                     ->check(CLI::IsMember({"euclidean", "l1"}))
                     ->capture_default_str();
  r.kernel_opt = app->add_option("--kernel", r.kernel, "Use a kernel instead of a metric")
                     ->check(CLI::IsMember({"gaussian", "laplacian"}));
  r.kernel_opt->excludes(r.metric_opt);
  r.bandwidth_opt =
      app->add_option("--bandwidth", r.bandwidth, "Kernel bandwidth (default: median of pairwise distances)")
          ->check(CLI::PositiveNumber);
  r.scale_opt = app->add_option("--gaussian-scale", r.gaussian_scale,
                                "Gaussian denominator: two-sigma-squared = exp(-d^2/(2s^2)), sigma-squared = exp(-d^2/s^2)")
                    ->check(CLI::IsMember({"two-sigma-squared", "sigma-squared"}))
                    ->capture_default_str();
  if (with_transform) {
    app->add_option("--transform", r.transform, "Metric/kernel transform applied to both sides")
        ->check(CLI::IsMember(kTransformNames))
        ->capture_default_str();
    r.anchor_opt = app->add_option("--anchor", r.anchor, "Anchor observation of the fixed-point transform")
                       ->capture_default_str();
  }
}

TransformChoice parse_transform(const std::string& name) {
  if (name == "bijective") return TransformChoice::Bijective;
  if (name == "bijective-scaled") return TransformChoice::BijectiveScaled;
  if (name == "fixed-point") return TransformChoice::FixedPoint;
  return TransformChoice::None;
}

KernelSpec kernel_spec(const Representation& r) {
  KernelSpec spec;
  spec.family = r.kernel == "laplacian" ? KernelFamily::Laplacian : KernelFamily::Gaussian;
  if (r.bandwidth_opt->count() > 0) spec.bandwidth = r.bandwidth;
  spec.gaussian_scale =
      r.gaussian_scale == "sigma-squared" ? GaussianScale::SigmaSquared : GaussianScale::TwoSigmaSquared;
  return spec;
}

void check_representation(const Representation& r) {
  if (!r.uses_kernel()) {
    if (r.bandwidth_opt->count() > 0) throw UsageError("--bandwidth needs --kernel");
    if (r.scale_opt->count() > 0) throw UsageError("--gaussian-scale needs --kernel gaussian");
  } else if (r.kernel != "gaussian" && r.scale_opt->count() > 0) {
    throw UsageError("--gaussian-scale only applies to --kernel gaussian");
  }
}

void check_matrix_mode(const Inputs& in, const Representation& r) {
  if (in.matrix_in) {
    if (r.metric_opt->count() + r.kernel_opt->count() + r.bandwidth_opt->count() + r.scale_opt->count() > 0) {
      throw UsageError("--metric/--kernel/--bandwidth/--gaussian-scale do not apply with --matrix-in");
    }
  } else if (in.kind_opt->count() > 0) {
    throw UsageError("--kind only applies with --matrix-in");
  }
}

StatOptions parse_variants(const std::vector<std::string>& tokens) {
  bool biased = false;
  bool unbiased = false;
  bool corrected = false;
  StatOptions options;
  for (const auto& t : tokens) {
    if (t == "biased") biased = true;
    if (t == "unbiased") unbiased = true;
    if (t == "normalized") options.normalized = true;
    if (t == "corrected") corrected = true;
  }
  if (biased && (unbiased || corrected)) throw UsageError("--variant biased excludes unbiased and corrected");
  if (corrected) {
    options.estimator = Estimator::CorrectedUnbiased;
  } else if (unbiased) {
    options.estimator = Estimator::Unbiased;
  }
  return options;
}

std::vector<std::string> canonical_variants(const StatOptions& options) {
  std::vector<std::string> out;
  switch (options.estimator) {
    case Estimator::Biased: out.emplace_back("biased"); break;
    case Estimator::Unbiased: out.emplace_back("unbiased"); break;
    case Estimator::CorrectedUnbiased: out.emplace_back("unbiased"); out.emplace_back("corrected"); break;
  }
  if (options.normalized) out.emplace_back("normalized");
  return out;
}

PipelineConfig pipeline(const Representation& r, const StatOptions& options) {
  PipelineConfig config;
  if (r.uses_kernel()) {
    config.representation = kernel_spec(r);
  } else {
    config.representation = r.metric == "l1" ? Metric::L1 : Metric::Euclidean;
  }
  config.transform = parse_transform(r.transform);
  config.anchor = r.anchor;
  config.options = options;
  return config;
}

// Everything needed to rebuild the statistic's inputs, checked up front.
void check_stat_config(const Inputs& in, const Representation& r, const StatOptions& options) {
  check_matrix_mode(in, r);
  if (!in.matrix_in) check_representation(r);
  const TransformChoice transform = parse_transform(r.transform);
  if (transform != TransformChoice::FixedPoint && r.anchor_opt && r.anchor_opt->count() > 0) {
    throw UsageError("--anchor only applies with --transform fixed-point");
  }
  if (in.matrix_in) {
    if (options.estimator != Estimator::CorrectedUnbiased) return;
    // The statistic must end up on distances or on bijective induced kernels;
    // raw and fixed-point kernels have no constant offset to add back.
    const bool ok = in.kind == "distance" ? transform != TransformChoice::FixedPoint : transform != TransformChoice::None;
    if (!ok) {
      throw UsageError("corrected needs distances or bijective induced kernels");
    }
    return;
  }
  try {
    validate(pipeline(r, options));
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

MatrixKind parse_kind(const std::string& kind) { return kind == "kernel" ? MatrixKind::Kernel : MatrixKind::Distance; }

csv::ReadOptions read_options(bool header) {
  csv::ReadOptions o;
  o.header = header;
  return o;
}

std::pair<PairwiseMatrix, PairwiseMatrix> load_pair(const Inputs& in, const Representation& r,
                                                    const StatOptions& options) {
  const auto ro = read_options(in.header);
  if (in.matrix_in) {
    const MatrixKind kind = parse_kind(in.kind);
    PairwiseMatrix mx = csv::read_pairwise(in.x, kind, ro);
    PairwiseMatrix my = csv::read_pairwise(in.y, kind, ro);
    const TransformChoice t = parse_transform(r.transform);
    if (t == TransformChoice::None) return {std::move(mx), std::move(my)};
    return {apply_transform(mx, t, r.anchor), apply_transform(my, t, r.anchor)};
  }
  const DataMatrix x = csv::read_data(in.x, ro);
  const DataMatrix y = csv::read_data(in.y, ro);
  return build_matrices(x, y, pipeline(r, options));
}

// ---------------------------------------------------------------------------
// JSON helpers.

Json nullable(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json inputs_echo(const Inputs& in) {
  Json j;
  j["x"] = in.x;
  if (!in.y.empty()) j["y"] = in.y;
  j["header"] = in.header;
  j["matrix_in"] = in.matrix_in;
  j["kind"] = in.matrix_in ? Json(in.kind) : Json(nullptr);
  return j;
}

void echo_representation(Json& j, const Representation& r, bool with_transform) {
  j["metric"] = r.uses_kernel() ? Json(nullptr) : Json(r.metric);
  j["kernel"] = r.uses_kernel() ? Json(r.kernel) : Json(nullptr);
  j["bandwidth"] = r.bandwidth_opt->count() > 0 ? Json(r.bandwidth) : Json(nullptr);
  j["gaussian_scale"] = r.gaussian_scale;
  if (with_transform) {
    j["transform"] = r.transform;
    j["anchor"] = r.anchor;
  }
}

Json stat_json(const StatValue& v) {
  Json j;
  j["value"] = v.value;
  j["family"] = to_string(v.variant.family);
  j["biased"] = v.variant.biased;
  j["normalized"] = v.variant.normalized;
  j["corrected"] = v.variant.corrected;
  j["variant"] = v.variant.describe();
  j["n"] = v.n;
  j["lineage"] = v.lineage;
  return j;
}

Json report_json(const PropertyReport& r) {
  Json j;
  j["property"] = to_string(r.property);
  j["holds"] = r.holds;
  j["tolerance"] = r.tolerance;
  if (r.witness) {
    j["witness"] = {{"description", r.witness->description},
                    {"indices", r.witness->indices},
                    {"values", r.witness->values}};
  } else {
    j["witness"] = nullptr;
  }
  if (!r.eigenvalues.empty()) {
    j["min_eigenvalue"] = r.eigenvalues.front();
    j["max_eigenvalue"] = r.eigenvalues.back();
    j["eigenvalues"] = r.eigenvalues;
  }
  return j;
}

Json cluster_json(const ClusterResult& c) {
  return Json{{"k", c.k},
              {"inertia", c.inertia},
              {"eigengap", c.eigengap},
              {"empty_clusters", c.empty_clusters},
              {"isolated_nodes", c.isolated_nodes},
              {"labels", c.labels}};
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::InvalidInput, "cannot write " + path);
  f << text;
  if (!f) throw Error(ErrorCode::InvalidInput, "failed writing " + path);
}

void emit(const Common& c, Json doc, Json echo, Clock::time_point start, std::ostream& out) {
  doc["config_echo"] = std::move(echo);
  if (c.timing) {
    doc["elapsed_ms"] = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  } else {
    doc["elapsed_ms"] = nullptr;
  }
  const std::string text = doc.dump(2) + "\n";
  if (c.output.empty()) {
    out << text;
  } else {
    write_text(c.output, text);
  }
}

std::vector<int> read_labels(const std::string& path) {
  const Eigen::MatrixXd t = csv::read_table(std::filesystem::path(path));
  if (t.cols() != 1) throw Error(ErrorCode::Parse, path + ": labels must be a single column");
  std::vector<int> labels(static_cast<std::size_t>(t.rows()));
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    const double v = t(i, 0);
    if (v != std::floor(v) || std::abs(v) > 1e9) {
      throw Error(ErrorCode::Parse, path + ": row " + std::to_string(i + 1) + ": label must be an integer");
    }
    labels[static_cast<std::size_t>(i)] = static_cast<int>(v);
  }
  return labels;
}

std::string labels_csv(const std::vector<const std::vector<int>*>& columns) {
  std::ostringstream s;
  const std::size_t n = columns.front()->size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c > 0) s << ',';
      s << (*columns[c])[i];
    }
    s << '\n';
  }
  return s.str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Distance covariance and HSIC: statistics, transforms, permutation tests, diagnostics,\n"
               "simulations and spectral clustering.",
               "distkern"};
  app.require_subcommand(1, 1);
  app.footer("Exit codes: 0 success, 1 computational error, 2 usage error.");

  Common common;
  Inputs stat_in, test_in, diag_in;
  Representation stat_repr, test_repr, diag_repr, power_repr;
  std::vector<std::string> variants;

  // stat
  CLI::App* stat = app.add_subcommand("stat", "Compute one dependence statistic");
  add_inputs(stat, stat_in, true);
  add_representation(stat, stat_repr, true);
  stat->add_option("--variant", variants, "Any of biased|unbiased|normalized|corrected (corrected implies unbiased)")
      ->check(CLI::IsMember(kVariantNames))
      ->delimiter(',');
  add_common(stat, common);

  // test
  std::size_t permutations = kDefaultPermutations;
  std::uint64_t seed = 0;
  bool keep_replicates = false;
  CLI::App* test = app.add_subcommand("test", "Permutation test of independence (y is permuted)");
  add_inputs(test, test_in, true);
  add_representation(test, test_repr, true);
  test->add_option("--variant", variants, "Any of biased|unbiased|normalized|corrected (corrected implies unbiased)")
      ->check(CLI::IsMember(kVariantNames))
      ->delimiter(',');
  test->add_option("-R,--permutations", permutations, "Number of permutation replicates")->capture_default_str();
  test->add_option("--seed", seed, "Seed of the permutation stream")->capture_default_str();
  test->add_flag("--keep-replicates", keep_replicates, "Include every replicate statistic in the report");
  add_common(test, common);

  // transform
  std::string matrix_path;
  std::string matrix_out;
  std::string sidecar;
  std::string kind = "distance";
  std::string transform_name;
  std::size_t anchor = 0;
  bool header = false;
  CLI::App* transform = app.add_subcommand("transform", "Transform a distance matrix into a kernel or back");
  transform->add_option("--in", matrix_path, "N x N matrix CSV")->required();
  transform->add_option("--kind", kind, "Kind of the input matrix")
      ->check(CLI::IsMember({"distance", "kernel"}))
      ->capture_default_str();
  transform->add_option("--transform", transform_name, "Transform to apply")
      ->check(CLI::IsMember({"bijective", "bijective-scaled", "fixed-point"}))
      ->required();
  CLI::Option* transform_anchor =
      transform->add_option("--anchor", anchor, "Anchor observation of the fixed-point transform")
          ->capture_default_str();
  transform->add_option("--out", matrix_out, "Output matrix CSV")->required();
  transform->add_option("--sidecar", sidecar, "Lineage JSON written next to the matrix (default: <out>.json)");
  transform->add_flag("--header", header, "Skip the first CSV line");
  add_common(transform, common);

  // diagnose
  double tol = kDefaultEigenTolerance;
  std::optional<std::size_t> diag_anchor;
  CLI::App* diagnose = app.add_subcommand("diagnose", "Negative-type / positive-definiteness certificates and audits");
  add_inputs(diagnose, diag_in, false);
  add_representation(diagnose, diag_repr, false);
  diagnose->add_option("--tol", tol, "Relative eigenvalue tolerance")->capture_default_str();
  CLI::Option* diag_anchor_opt =
      diagnose->add_option("--anchor", anchor, "Fixed-point anchor for the audits (default: leftmost point, or 0)");
  add_common(diagnose, common);

  // simulate
  std::string relation = "quadratic";
  std::size_t n = 100;
  double noise = 0.0;
  std::string x_out;
  std::string y_out;
  const std::vector<std::string> relations = {"quadratic", "linear", "spiral", "sine", "independent-cloud"};
  CLI::App* simulate = app.add_subcommand("simulate", "Generate a simulated (x, y) sample");
  simulate->add_option("--relation", relation, "Dependence structure")
      ->check(CLI::IsMember(relations))
      ->capture_default_str();
  simulate->add_option("--n", n, "Sample size")->capture_default_str();
  simulate->add_option("--noise", noise, "Noise level (>= 0)")->capture_default_str();
  simulate->add_option("--seed", seed, "Seed")->capture_default_str();
  simulate->add_option("--x-out", x_out, "Write x to this CSV");
  simulate->add_option("--y-out", y_out, "Write y to this CSV");
  add_common(simulate, common);

  // power
  std::size_t trials = 1000;
  double alpha = 0.05;
  std::string pvalues_csv;
  double power_noise = 1.0;
  std::size_t power_permutations = 199;
  CLI::App* power = app.add_subcommand("power", "Monte Carlo power of a permutation test");
  power->add_option("--relation", relation, "Dependence structure")
      ->check(CLI::IsMember(relations))
      ->capture_default_str();
  power->add_option("--n", n, "Sample size per trial")->capture_default_str();
  power->add_option("--noise", power_noise, "Noise level (>= 0)")->capture_default_str();
  add_representation(power, power_repr, true);
  power->add_option("--variant", variants, "Any of biased|unbiased|normalized|corrected (corrected implies unbiased)")
      ->check(CLI::IsMember(kVariantNames))
      ->delimiter(',');
  power->add_option("-M,--trials", trials, "Monte Carlo trials")->capture_default_str();
  power->add_option("-R,--permutations", power_permutations, "Permutations per trial")->capture_default_str();
  power->add_option("--alpha", alpha, "Significance level")->capture_default_str();
  power->add_option("--seed", seed, "Seed")->capture_default_str();
  power->add_option("--pvalues-csv", pvalues_csv, "Write the per-trial p-values (one per line)");
  add_common(power, common);

  // cluster
  std::size_t k = 0;
  std::string mode = "compare";
  std::string truth_path;
  std::string labels_out;
  std::size_t restarts = 20;
  CLI::App* cluster = app.add_subcommand("cluster", "Spectral clustering on induced kernels of Euclidean distances");
  cluster->add_option("--x", matrix_path, "Data CSV (rows = observations)")->required();
  cluster->add_flag("--header", header, "Skip the first CSV line");
  cluster->add_option("--k", k, "Number of clusters")->required()->check(CLI::PositiveNumber);
  cluster->add_option("--mode", mode, "Which induced kernel to cluster on")
      ->check(CLI::IsMember({"bijective", "fixed-point", "compare"}))
      ->capture_default_str();
  CLI::Option* cluster_anchor =
      cluster->add_option("--anchor", anchor, "Fixed-point anchor (default: leftmost point)");
  cluster->add_option("--seed", seed, "k-means seed")->capture_default_str();
  cluster->add_option("--restarts", restarts, "k-means restarts")->capture_default_str();
  cluster->add_option("--truth", truth_path, "CSV of true integer labels, one per line");
  cluster->add_option("--labels-out", labels_out, "Write labels CSV (compare mode: bijective,fixed-point columns)");
  add_common(cluster, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  const auto start = Clock::now();
  try {
    if (stat->parsed() || test->parsed()) {
      const Inputs& inputs = stat->parsed() ? stat_in : test_in;
      const Representation& repr = stat->parsed() ? stat_repr : test_repr;
      const StatOptions options = parse_variants(variants);
      check_stat_config(inputs, repr, options);
      if (test->parsed() && permutations == 0) throw UsageError("--permutations must be at least 1");

      Json echo{{"subcommand", stat->parsed() ? "stat" : "test"}};
      echo.update(inputs_echo(inputs));
      echo_representation(echo, repr, true);
      echo["variant"] = canonical_variants(options);

      const auto [mx, my] = load_pair(inputs, repr, options);
      Json doc;
      if (stat->parsed()) {
        doc = stat_json(compute_statistic(mx, my, options));
      } else {
        echo["permutations"] = permutations;
        echo["seed"] = seed;
        echo["keep_replicates"] = keep_replicates;
        PermutationOptions po;
        po.permutations = permutations;
        po.seed = seed;
        po.threads = common.threads;
        po.keep_replicates = keep_replicates;
        const TestResult r = permutation_test(mx, my, options, po);
        doc["statistic"] = r.observed.value;
        doc["variant"] = r.observed.variant.describe();
        doc["p_value"] = r.p_value;
        doc["permutations"] = r.permutations;
        doc["seed"] = r.seed;
        doc["observed"] = stat_json(r.observed);
        if (keep_replicates) doc["replicates"] = r.replicate_stats;
      }
      emit(common, std::move(doc), std::move(echo), start, out);
      return kExitOk;
    }

    if (transform->parsed()) {
      const TransformChoice t = parse_transform(transform_name);
      if (t != TransformChoice::FixedPoint && transform_anchor->count() > 0) {
        throw UsageError("--anchor only applies with --transform fixed-point");
      }
      const PairwiseMatrix m = csv::read_pairwise(matrix_path, parse_kind(kind), read_options(header));
      const PairwiseMatrix result = apply_transform(m, t, anchor);
      csv::write_table(std::filesystem::path(matrix_out), result.values());

      Json lineage = nullptr;
      if (result.lineage()) {
        const auto& l = *result.lineage();
        lineage = {{"kind", to_string(l.kind)},
                   {"max_used", nullable(l.max_used)},
                   {"anchor", l.anchor ? Json(*l.anchor) : Json(nullptr)}};
      }
      Json doc;
      doc["input"] = {{"path", matrix_path}, {"kind", to_string(m.kind())}, {"n", m.n()},
                      {"max_element", m.max_element()}};
      doc["output"] = {{"path", matrix_out},
                       {"kind", to_string(result.kind())},
                       {"provenance", result.provenance()},
                       {"max_element", result.max_element()},
                       {"warnings",
                        {{"nonzero_diagonal", result.warnings().nonzero_diagonal},
                         {"negative_entries", result.warnings().negative_entries}}}};
      doc["lineage"] = lineage;
      Json echo{{"subcommand", "transform"}, {"in", matrix_path},       {"kind", kind},
                {"header", header},          {"transform", transform_name}, {"anchor", anchor},
                {"out", matrix_out},         {"sidecar", sidecar}};
      const std::string sidecar_path = sidecar.empty() ? matrix_out + ".json" : sidecar;
      Json side = doc;
      side["config_echo"] = echo;
      write_text(sidecar_path, side.dump(2) + "\n");
      emit(common, std::move(doc), std::move(echo), start, out);
      return kExitOk;
    }

    if (diagnose->parsed()) {
      const Inputs& inputs = diag_in;
      const Representation& repr = diag_repr;
      check_matrix_mode(inputs, repr);
      if (!inputs.matrix_in) check_representation(repr);
      const auto ro = read_options(inputs.header);
      std::optional<DataMatrix> data;
      std::optional<PairwiseMatrix> m;
      if (inputs.matrix_in) {
        m.emplace(csv::read_pairwise(inputs.x, parse_kind(inputs.kind), ro));
      } else {
        data.emplace(csv::read_data(inputs.x, ro));
        if (repr.uses_kernel()) {
          m.emplace(kernel_matrix(*data, kernel_spec(repr)));
        } else {
          m.emplace(distance_matrix(*data, repr.metric == "l1" ? Metric::L1 : Metric::Euclidean));
        }
      }
      if (diag_anchor_opt->count() > 0) {
        diag_anchor = anchor;
      } else {
        diag_anchor = data ? leftmost_index(*data) : 0;
      }

      Json reports;
      if (m->kind() == MatrixKind::Distance) {
        const PairwiseMatrix khat = bijective_to_kernel(*m).matrix;
        const PairwiseMatrix ktilde = fixed_point_to_kernel(*m, *diag_anchor).matrix;
        reports["negative_type"] = report_json(check_negative_type(*m, tol));
        const Theorem1Report t1 = check_theorem1_biconditional(*m, tol);
        reports["theorem1"] = {{"negative_type", report_json(t1.negative_type)},
                               {"kernel_zero_sum_psd", report_json(t1.kernel_zero_sum_psd)},
                               {"kernel_psd", report_json(t1.kernel_psd)},
                               {"consistent", t1.consistent}};
        reports["bijectivity"] = report_json(audit_bijectivity(*m, bijective_to_metric(khat).matrix));
        reports["rank_preservation_bijective"] = report_json(audit_rank_preservation(*m, khat));
        reports["rank_preservation_fixed_point"] = report_json(audit_rank_preservation(*m, ktilde));
        if (data) {
          reports["translation_invariance"] = report_json(audit_translation_invariance(*data, *m));
          reports["translation_invariance_bijective"] = report_json(audit_translation_invariance(*data, khat));
          reports["translation_invariance_fixed_point"] = report_json(audit_translation_invariance(*data, ktilde));
        }
      } else {
        const PairwiseMatrix dhat = bijective_to_metric(*m).matrix;
        reports["positive_definite"] = report_json(check_positive_definite(*m, tol));
        reports["bijectivity"] = report_json(audit_bijectivity(*m, bijective_to_kernel(dhat).matrix));
        reports["rank_preservation_bijective"] = report_json(audit_rank_preservation(*m, dhat));
        if (data) {
          reports["translation_invariance"] = report_json(audit_translation_invariance(*data, *m));
          reports["translation_invariance_bijective"] = report_json(audit_translation_invariance(*data, dhat));
        }
      }
      Json doc;
      doc["kind"] = to_string(m->kind());
      doc["n"] = m->n();
      doc["provenance"] = m->provenance();
      doc["anchor"] = m->kind() == MatrixKind::Distance ? Json(*diag_anchor) : Json(nullptr);
      doc["reports"] = std::move(reports);
      Json echo{{"subcommand", "diagnose"}};
      echo.update(inputs_echo(inputs));
      echo_representation(echo, repr, false);
      echo["tol"] = tol;
      echo["anchor"] = diag_anchor_opt->count() > 0 ? Json(anchor) : Json(nullptr);
      emit(common, std::move(doc), std::move(echo), start, out);
      return kExitOk;
    }

    if (simulate->parsed()) {
      if (x_out.empty() != y_out.empty()) throw UsageError("--x-out and --y-out go together");
      SimulationSpec spec{parse_relation(relation), n, noise, seed};
      try {
        validate(spec);
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
      const auto [x, y] = generate(spec);
      if (x_out.empty()) {
        Eigen::MatrixXd both(static_cast<Eigen::Index>(x.n()), 2);
        both << x.values(), y.values();
        std::ostringstream s;
        csv::write_table(s, both);
        if (common.output.empty()) {
          out << s.str();
        } else {
          write_text(common.output, s.str());
        }
        return kExitOk;
      }
      csv::write_table(std::filesystem::path(x_out), x.values());
      csv::write_table(std::filesystem::path(y_out), y.values());
      Json doc{{"relation", relation}, {"n", n}, {"noise", noise}, {"seed", seed}, {"x_out", x_out}, {"y_out", y_out}};
      Json echo{{"subcommand", "simulate"}, {"relation", relation}, {"n", n}, {"noise", noise},
                {"seed", seed},             {"x_out", x_out},       {"y_out", y_out}};
      emit(common, std::move(doc), std::move(echo), start, out);
      return kExitOk;
    }

    if (power->parsed()) {
      const Representation& repr = power_repr;
      const StatOptions options = parse_variants(variants);
      check_representation(repr);
      if (parse_transform(repr.transform) != TransformChoice::FixedPoint && repr.anchor_opt->count() > 0) {
        throw UsageError("--anchor only applies with --transform fixed-point");
      }
      const PipelineConfig config = pipeline(repr, options);
      SimulationSpec spec{parse_relation(relation), n, power_noise, seed};
      PowerOptions po;
      po.alpha = alpha;
      po.trials = trials;
      po.permutations = power_permutations;
      po.seed = seed;
      po.threads = common.threads;
      try {
        validate(config);
        validate(spec);
        if (trials < 1) throw Error(ErrorCode::InvalidInput, "--trials must be at least 1");
        if (power_permutations < 1) throw Error(ErrorCode::InvalidInput, "--permutations must be at least 1");
        if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidInput, "--alpha must lie in (0, 1)");
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
      const PowerReport r = estimate_power(spec, config, po);
      if (!pvalues_csv.empty()) {
        std::ostringstream s;
        for (double p : r.p_values) s << csv::format_number(p) << '\n';
        write_text(pvalues_csv, s.str());
      }
      Json doc{{"relation", to_string(r.relation)},
               {"n", r.n},
               {"noise", r.noise},
               {"method", r.method},
               {"alpha", r.alpha},
               {"trials", r.trials},
               {"permutations", r.permutations},
               {"seed", r.seed},
               {"rejections", r.rejections},
               {"power", r.power},
               {"monte_carlo_se", r.monte_carlo_se}};
      Json echo{{"subcommand", "power"}, {"relation", relation}, {"n", n}, {"noise", power_noise}};
      echo_representation(echo, repr, true);
      echo["variant"] = canonical_variants(options);
      echo["trials"] = trials;
      echo["permutations"] = power_permutations;
      echo["alpha"] = alpha;
      echo["seed"] = seed;
      echo["pvalues_csv"] = pvalues_csv;
      emit(common, std::move(doc), std::move(echo), start, out);
      return kExitOk;
    }

    if (cluster->parsed()) {
      if (restarts < 1) throw UsageError("--restarts must be at least 1");
      if (mode == "bijective" && cluster_anchor->count() > 0) throw UsageError("--anchor needs a fixed-point mode");
      const DataMatrix data = csv::read_data(matrix_path, read_options(header));
      std::optional<std::vector<int>> truth;
      if (!truth_path.empty()) truth = read_labels(truth_path);
      SpectralOptions so;
      so.restarts = restarts;
      so.threads = common.threads;

      Json doc;
      std::string labels_text;
      if (mode == "bijective") {
        const PairwiseMatrix khat = bijective_to_kernel(distance_matrix(data, Metric::Euclidean)).matrix;
        const ClusterResult r = spectral_cluster(khat, k, seed, so);
        doc["bijective"] = cluster_json(r);
        if (truth) doc["ari_bijective"] = adjusted_rand_index(r.labels, *truth);
        labels_text = labels_csv({&r.labels});
      } else {
        std::optional<std::size_t> a;
        if (cluster_anchor->count() > 0) a = anchor;
        std::optional<std::span<const int>> t;
        if (truth) t = std::span<const int>(*truth);
        const TransformClusteringReport r = compare_transform_clustering(data, k, a, seed, t, so);
        doc["anchor"] = r.anchor;
        doc["clamped_entries"] = r.clamped_entries;
        if (mode == "compare") {
          doc["bijective"] = cluster_json(r.bijective);
          doc["fixed_point"] = cluster_json(r.fixed_point);
          doc["ari_between"] = r.ari_between;
          doc["ari_bijective"] = nullable(r.ari_bijective);
          doc["ari_fixed_point"] = nullable(r.ari_fixed_point);
          labels_text = labels_csv({&r.bijective.labels, &r.fixed_point.labels});
        } else {
          doc["fixed_point"] = cluster_json(r.fixed_point);
          doc["ari_fixed_point"] = nullable(r.ari_fixed_point);
          labels_text = labels_csv({&r.fixed_point.labels});
        }
      }
      if (!labels_out.empty()) write_text(labels_out, labels_text);
      Json echo{{"subcommand", "cluster"}, {"x", matrix_path}, {"header", header},
                {"k", k},                  {"mode", mode},       {"seed", seed},
                {"restarts", restarts},    {"truth", truth_path}, {"labels_out", labels_out}};
      echo["anchor"] = cluster_anchor->count() > 0 ? Json(anchor) : Json(nullptr);
      emit(common, std::move(doc), std::move(echo), start, out);
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return kExitComputation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitComputation;
  }
  return kExitUsage;
}

}  // namespace distkern::cli
