#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "fgd/error.hpp"
#include "fgd/functions.hpp"
#include "fgd/io.hpp"
#include "fgd/lms.hpp"
#include "fgd/optim.hpp"

namespace fgd::experiments {

namespace fs = std::filesystem;
using io::json;

// ---------------------------------------------------------------------------
// Function descriptors

struct ShiftedQuadraticSpec {
  double a = 1.0;
  double xstar = 5.0;
  double fm = 0.0;
};
struct PolynomialSpec {
  std::vector<double> coeffs;
};
struct SeparableQuadraticSpec {
  std::vector<double> a;
  std::vector<double> xstar;
  double fm = 0.0;
};
struct RosenbrockSpec {};

using FunctionSpec = std::variant<ShiftedQuadraticSpec, PolynomialSpec, SeparableQuadraticSpec, RosenbrockSpec>;

/// A scalar polynomial owned and exposed as a one-dimensional objective.
class OwnedScalar : public MultivariateFunction {
 public:
  explicit OwnedScalar(Polynomial p) : p_(std::move(p)) {}
  std::size_t dimension() const override { return 1; }
  double value(std::span<const double> v) const override { return p_.value(v[0]); }
  double partial(std::size_t, unsigned order, std::span<const double> v) const override {
    return p_.deriv(order, v[0]);
  }
  std::optional<unsigned> section_degree(std::size_t) const override { return p_.degree_bound(); }
  std::optional<double> minimum_value() const override { return p_.minimum_value(); }

 private:
  Polynomial p_;
};

inline std::unique_ptr<MultivariateFunction> instantiate(const FunctionSpec& spec) {
  struct Visitor {
    std::unique_ptr<MultivariateFunction> operator()(const ShiftedQuadraticSpec& s) const {
      return std::make_unique<OwnedScalar>(make_shifted_quadratic(s.a, s.xstar, s.fm));
    }
    std::unique_ptr<MultivariateFunction> operator()(const PolynomialSpec& s) const {
      return std::make_unique<OwnedScalar>(make_polynomial(s.coeffs));
    }
    std::unique_ptr<MultivariateFunction> operator()(const SeparableQuadraticSpec& s) const {
      return std::make_unique<SeparableQuadratic>(s.a, s.xstar, s.fm);
    }
    std::unique_ptr<MultivariateFunction> operator()(const RosenbrockSpec&) const {
      return std::make_unique<Rosenbrock>();
    }
  };
  return std::visit(Visitor{}, spec);
}

// ---------------------------------------------------------------------------
// Experiment description

struct GridPoint {
  std::string label;
  OptimizerConfig config;
  /// Overrides ExperimentSpec::x0 for this run.
  std::optional<std::vector<double>> x0;
};

/// Per-coordinate absolute band |x_j - target_j| <= tol.
struct Band {
  std::vector<double> target;
  double tol = 0.0;
};

struct LmsSetup {
  std::vector<double> true_weights{2.0, -3.0, 1.0};
  std::vector<double> w0{0.1, -0.1, 0.1};
  int horizon = 2000;
  double noise_variance = 0.01;
  std::uint64_t seed = 1;
};

struct ContourSpec {
  double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
  int resolution = 51;
};

struct ExperimentSpec {
  std::string id;
  std::string description;
  FunctionSpec function = ShiftedQuadraticSpec{};
  std::vector<double> x0{1.0};
  std::vector<GridPoint> grid;
  std::optional<Band> band;
  /// When set, grid configs drive the transverse-filter identification instead.
  std::optional<LmsSetup> lms;
  std::optional<ContourSpec> contour;

  void validate() const {
    if (id.empty()) throw ConfigError("experiment id must not be empty");
    if (grid.empty()) throw ConfigError("experiment '" + id + "' has an empty config grid");
    std::set<std::string> labels;
    for (const auto& g : grid) {
      if (g.label.empty()) throw ConfigError("grid point without a label in '" + id + "'");
      if (!labels.insert(g.label).second) throw ConfigError("duplicate grid label '" + g.label + "'");
    }
    if (!lms) {
      const auto f = instantiate(function);
      if (x0.size() != f->dimension()) throw ConfigError("x0 dimension does not match the function");
      for (const auto& g : grid) {
        if (g.x0 && g.x0->size() != f->dimension()) throw ConfigError("grid x0 dimension mismatch");
      }
    }
    if (contour && contour->resolution < 2) throw ConfigError("contour resolution must be >= 2");
  }
};

// ---------------------------------------------------------------------------
// Contour grid

struct ContourGrid {
  std::vector<double> xs;
  std::vector<double> ys;
  /// values[iy][ix] = f(xs[ix], ys[iy])
  std::vector<std::vector<double>> values;
};

inline ContourGrid contour_grid(const MultivariateFunction& f, const ContourSpec& spec) {
  if (f.dimension() != 2) throw ConfigError("contour grid needs a two-dimensional function");
  if (spec.resolution < 2) throw ConfigError("contour resolution must be >= 2");
  ContourGrid g;
  const int n = spec.resolution;
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / (n - 1);
    g.xs.push_back(spec.x_lo + t * (spec.x_hi - spec.x_lo));
    g.ys.push_back(spec.y_lo + t * (spec.y_hi - spec.y_lo));
  }
  for (double y : g.ys) {
    std::vector<double> row;
    for (double x : g.xs) {
      const double v[2] = {x, y};
      row.push_back(f.value(v));
    }
    g.values.push_back(std::move(row));
  }
  return g;
}

inline void write_contour_csv(std::ostream& os, const ContourGrid& g) {
  os << "x,y,f\n";
  for (std::size_t iy = 0; iy < g.ys.size(); ++iy) {
    for (std::size_t ix = 0; ix < g.xs.size(); ++ix) {
      os << io::format_double(g.xs[ix]) << ',' << io::format_double(g.ys[iy]) << ','
         << io::format_double(g.values[iy][ix]) << '\n';
    }
  }
}

// ---------------------------------------------------------------------------
// Running

struct RunSummary {
  std::string label;
  Termination termination = Termination::MaxIters;
  std::size_t iterations = 0;
  std::vector<double> final_point;
  double final_value = 0.0;
  std::optional<std::size_t> band_entry;
  /// final_point - band target
  std::vector<double> final_error;
  std::vector<std::string> warnings;
  /// Set when the run threw before producing a trajectory.
  std::string error;
  std::string file;

  bool failed() const {
    return !error.empty() || termination == Termination::Diverged || termination == Termination::DomainError;
  }
};

struct RunReport {
  std::string id;
  std::vector<RunSummary> runs;

  std::size_t failures() const {
    std::size_t n = 0;
    for (const auto& r : runs) n += r.failed() ? 1 : 0;
    return n;
  }
};

struct ExperimentResult {
  RunReport report;
  /// One per grid point (empty trajectory when the run threw). Unused for LMS experiments.
  std::vector<Trajectory> trajectories;
  std::vector<lms::TapTrajectory> taps;
};

struct RunOptions {
  std::optional<fs::path> out_dir;
  /// Replaces the LMS signal seed.
  std::optional<std::uint64_t> seed;
};

namespace detail {

inline json summary_to_json(const RunSummary& r, const OptimizerConfig& cfg) {
  json j;
  j["label"] = r.label;
  j["config"] = io::config_to_json(cfg);
  j["termination"] = name(r.termination);
  j["iterations"] = r.iterations;
  j["final_point"] = r.final_point;
  j["final_value"] = r.final_value;
  j["band_entry"] = r.band_entry ? json(*r.band_entry) : json(nullptr);
  j["final_error"] = r.final_error;
  j["warnings"] = r.warnings;
  j["error"] = r.error;
  j["file"] = r.file;
  return j;
}

inline std::vector<double> minus(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out;
  for (std::size_t j = 0; j < a.size() && j < b.size(); ++j) out.push_back(a[j] - b[j]);
  return out;
}

}  // namespace detail

/// Executes every grid point, writing <out>/<id>/<label>.csv per run and <out>/<id>/summary.json.
/// A failing run is recorded in the report and does not stop the batch.
inline ExperimentResult run_experiment(const ExperimentSpec& spec, const RunOptions& opts = {}) {
  spec.validate();
  ExperimentResult result;
  result.report.id = spec.id;

  fs::path dir;
  if (opts.out_dir) {
    dir = *opts.out_dir / spec.id;
    fs::create_directories(dir);
  }

  std::optional<lms::FilterScenario> scenario;
  if (spec.lms) {
    scenario = lms::make_scenario(opts.seed.value_or(spec.lms->seed), spec.lms->horizon,
                                  spec.lms->true_weights, spec.lms->noise_variance);
  }
  const auto f = spec.lms ? nullptr : instantiate(spec.function);

  for (const auto& g : spec.grid) {
    RunSummary s;
    s.label = g.label;
    try {
      if (scenario) {
        auto taps = lms::run_lms(*scenario, g.config, spec.lms->w0);
        s.termination = taps.termination;
        s.iterations = taps.weights.size();
        s.final_point = taps.final_weights();
        s.final_value = taps.errors.empty() ? 0.0 : taps.errors.back();
        if (spec.band) s.final_error = detail::minus(s.final_point, spec.band->target);
        if (opts.out_dir) {
          s.file = g.label + ".csv";
          std::ofstream os(dir / s.file);
          io::write_tap_csv(os, taps);
        }
        result.taps.push_back(std::move(taps));
      } else {
        auto traj = run_multivariate(*f, g.x0.value_or(spec.x0), g.config);
        s.termination = traj.termination;
        s.iterations = traj.num_steps();
        s.final_point = traj.final_iterate();
        s.final_value = traj.values.back();
        s.warnings = traj.warnings;
        if (spec.band) {
          s.band_entry = band_entry(traj, spec.band->target, spec.band->tol);
          s.final_error = detail::minus(s.final_point, spec.band->target);
        }
        if (opts.out_dir) {
          s.file = g.label + ".csv";
          std::ofstream os(dir / s.file);
          io::write_trajectory_csv(os, traj);
        }
        result.trajectories.push_back(std::move(traj));
      }
    } catch (const Error& e) {
      s.error = e.what();
      if (scenario) result.taps.emplace_back();
      else result.trajectories.emplace_back();
    }
    result.report.runs.push_back(std::move(s));
  }

  if (opts.out_dir) {
    if (spec.contour && !spec.lms) {
      std::ofstream os(dir / "contour.csv");
      write_contour_csv(os, contour_grid(*f, *spec.contour));
    }
    json summary;
    summary["id"] = spec.id;
    summary["description"] = spec.description;
    summary["failures"] = result.report.failures();
    json runs = json::array();
    for (std::size_t i = 0; i < result.report.runs.size(); ++i) {
      runs.push_back(detail::summary_to_json(result.report.runs[i], spec.grid[i].config));
    }
    summary["runs"] = std::move(runs);
    std::ofstream os(dir / "summary.json");
    os << summary.dump(2) << '\n';
  }
  return result;
}

// ---------------------------------------------------------------------------
// Built-in reproductions

namespace detail {

inline ExperimentSpec make_spec(std::string id, std::string description, FunctionSpec f = ShiftedQuadraticSpec{},
                                std::vector<double> x0 = {1.0}) {
  ExperimentSpec e;
  e.id = std::move(id);
  e.description = std::move(description);
  e.function = std::move(f);
  e.x0 = std::move(x0);
  return e;
}

inline GridPoint point(std::string label, OptimizerConfig cfg) { return {std::move(label), std::move(cfg), {}}; }

inline std::string label_of(const char* prefix, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%.1f", prefix, v);
  return buf;
}

}  // namespace detail

/// The built-in experiments, one per example / sub-figure, parameters frozen.
inline std::vector<ExperimentSpec> builtin_experiments() {
  using detail::point;
  std::vector<ExperimentSpec> out;
  const FunctionSpec quad = ShiftedQuadraticSpec{1.0, 5.0, 0.0};

  {
    auto e = detail::make_spec("motivation", "f=(x-5)^2: classical vs naive RL vs naive Caputo, c=0 x0=1 mu=0.5 alpha=0.7", quad);
    OptimizerConfig base;
    base.mu = {0.5};
    base.alpha = 0.7;
    base.c = 0.0;
    base.max_iters = 50;
    OptimizerConfig rl = base, caputo = base;
    base.algorithm = Algorithm::Classical;
    rl.algorithm = caputo.algorithm = Algorithm::NaiveFractional;
    rl.definition = Definition::RiemannLiouville;
    caputo.definition = Definition::Caputo;
    e.grid = {point("classical", base), point("naive-rl", rl), point("naive-caputo", caputo)};
    e.band = Band{{5.0}, 1e-3};
    out.push_back(std::move(e));
  }
  OptimizerConfig fm;
  fm.algorithm = Algorithm::FixedMemory;
  fm.alpha = 0.7;
  fm.mu = {0.5};
  fm.memory_style = MemoryStyle::Abs;
  fm.max_iters = 50;
  {
    auto e = detail::make_spec("example1-ksweep", "fixed memory, K = 5, 3, 1; alpha=0.7 mu=0.5 x0=1", quad);
    for (int K : {5, 3, 1}) {
      OptimizerConfig c = fm;
      c.memory_steps = K;
      e.grid.push_back(point("K" + std::to_string(K), c));
    }
    e.band = Band{{5.0}, 0.05};
    out.push_back(std::move(e));
  }
  {
    auto e = detail::make_spec("example1-musweep", "fixed memory, K=1, mu = 0.1 .. 0.5; alpha=0.7 x0=1", quad);
    for (double mu : {0.1, 0.2, 0.3, 0.4, 0.5}) {
      OptimizerConfig c = fm;
      c.memory_steps = 1;
      c.mu = {mu};
      e.grid.push_back(point(detail::label_of("mu", mu), c));
    }
    e.band = Band{{5.0}, 0.05};
    out.push_back(std::move(e));
  }
  OptimizerConfig tr;
  tr.algorithm = Algorithm::Truncated;
  tr.mu = {0.2};
  tr.c = 0.0;
  tr.epsilon = 0.0;
  tr.alpha = 0.7;
  tr.max_iters = 200;
  {
    auto e = detail::make_spec("example2-alphasweep", "truncated, alpha = 0.1 .. 1.9; c=0 mu=0.2 eps=0 x0=1", quad);
    for (int i = 1; i <= 19; i += 2) {
      OptimizerConfig c = tr;
      c.alpha = i / 10.0;
      e.grid.push_back(point(detail::label_of("alpha", c.alpha), c));
    }
    e.band = Band{{5.0}, 1e-2};
    out.push_back(std::move(e));
  }
  {
    auto e = detail::make_spec("example2-x0sweep", "truncated, alpha=0.7, x0 = 1.0 .. 6.0", quad);
    for (int i = 2; i <= 12; ++i) {
      const double x0 = i / 2.0;
      e.grid.push_back({detail::label_of("x0_", x0), tr, std::vector<double>{x0}});
    }
    e.band = Band{{5.0}, 1e-2};
    out.push_back(std::move(e));
  }
  OptimizerConfig vo;
  vo.algorithm = Algorithm::VariableOrder;
  vo.mu = {0.2};
  vo.c = 0.0;
  vo.loss = LossKind::ObjectiveValue;
  vo.memory_style = MemoryStyle::Signed;
  vo.max_iters = 200;
  {
    auto e = detail::make_spec("example3-laws", "variable order, reciprocal/sigmoid/tanh laws, J=f; c=0 mu=0.2 x0=1", quad);
    OptimizerConfig rec = vo, sig = vo, th = vo;
    rec.order_law = OrderLaw::Reciprocal;
    rec.beta = 0.03;
    sig.order_law = OrderLaw::Sigmoid;
    sig.beta = 0.10;
    th.order_law = OrderLaw::Tanh;
    th.beta = 0.10;
    e.grid = {point("reciprocal", rec), point("sigmoid", sig), point("tanh", th)};
    e.band = Band{{5.0}, 1e-2};
    out.push_back(std::move(e));
  }
  {
    auto e = detail::make_spec("example3-csweep", "variable order, tanh law beta=0.1, c = 0.0 .. 0.9", quad);
    for (int i = 0; i <= 9; ++i) {
      OptimizerConfig c = vo;
      c.order_law = OrderLaw::Tanh;
      c.beta = 0.10;
      c.c = i / 10.0;
      e.grid.push_back(point(detail::label_of("c", c.c), c));
    }
    e.band = Band{{5.0}, 1e-2};
    out.push_back(std::move(e));
  }

  const FunctionSpec ex4 = SeparableQuadraticSpec{{2.0, 3.0}, {5.0, 6.0}, 10.0};
  OptimizerConfig ex4base;
  ex4base.mu = {0.05};
  ex4base.alpha = 0.7;
  ex4base.memory_steps = 3;
  ex4base.beta = 0.005;
  ex4base.epsilon = 0.0;
  ex4base.c = 0.0;
  ex4base.max_iters = 300;
  auto ex4_grid = [&](Coupling coupling) {
    OptimizerConfig a1 = ex4base, a2 = ex4base, a3 = ex4base, naive = ex4base;
    a1.algorithm = Algorithm::FixedMemory;
    a1.memory_style = MemoryStyle::Abs;
    a2.algorithm = Algorithm::Truncated;
    a3.algorithm = Algorithm::VariableOrder;
    a3.order_law = OrderLaw::Tanh;
    a3.loss = LossKind::GradSquared;
    a3.coupling = coupling;
    a3.gamma = 1.0;
    naive.algorithm = Algorithm::NaiveFractional;
    naive.definition = Definition::Caputo;
    return std::vector<GridPoint>{point("alg1-fixed-memory", a1), point("alg2-truncated", a2),
                                  point("alg3-variable-order", a3), point("naive-caputo", naive)};
  };
  {
    auto e = detail::make_spec("example4", "f=2(x-5)^2+3(y-6)^2+10 from (1,1); per-coordinate orders", ex4, {1.0, 1.0});
    e.grid = ex4_grid(Coupling::PerCoordinate);
    e.band = Band{{5.0, 6.0}, 0.05};
    e.contour = ContourSpec{0.0, 8.0, 0.0, 8.0, 81};
    out.push_back(std::move(e));
  }
  {
    auto e = detail::make_spec("example4-uniform", "example4 with one shared order, J = J_x + gamma J_y, gamma=1", ex4, {1.0, 1.0});
    e.grid = ex4_grid(Coupling::Uniform);
    e.band = Band{{5.0, 6.0}, 0.05};
    out.push_back(std::move(e));
  }
  {
    auto e = detail::make_spec("example5-rosenbrock", "Rosenbrock from (-0.2,-0.2); c=0 alpha=0.7 K=2 beta=0.01",
                     RosenbrockSpec{}, {-0.2, -0.2});
    OptimizerConfig a1, a2, a3;
    for (auto* c : {&a1, &a2, &a3}) {
      c->c = 0.0;
      c->alpha = 0.7;
      c->memory_steps = 2;
      c->beta = 0.01;
      c->epsilon = 0.0;
      c->max_iters = 10000;
      c->memory_style = MemoryStyle::Abs;
    }
    a1.algorithm = Algorithm::FixedMemory;
    a1.mu = {0.0182};
    // classical warm-up at 0.0182 diverges on this function
    a1.warmup_mu = 0.002;
    a2.algorithm = Algorithm::Truncated;
    a2.mu = {0.0018};
    a3.algorithm = Algorithm::VariableOrder;
    a3.mu = {0.002};
    a3.order_law = OrderLaw::Tanh;
    a3.loss = LossKind::ObjectiveValue;
    a3.coupling = Coupling::Uniform;
    e.grid = {point("alg1-fixed-memory", a1), point("alg2-truncated", a2), point("alg3-variable-order", a3)};
    e.band = Band{{1.0, 1.0}, 0.02};
    e.contour = ContourSpec{-1.5, 1.5, -1.5, 1.5, 61};
    out.push_back(std::move(e));
  }
  {
    auto e = detail::make_spec("example6-lms", "3-tap transverse filter, w=[2,-3,1], w(0)=[0.1,-0.1,0.1], mu=0.02");
    e.lms = LmsSetup{};
    OptimizerConfig a1, a2, a3;
    for (auto* c : {&a1, &a2, &a3}) {
      c->mu = {0.02};
      c->c = 0.0;
      c->epsilon = 0.0;
      c->alpha = 0.7;
      c->memory_steps = 3;
      c->beta = 0.005;
      c->memory_style = MemoryStyle::Abs;
    }
    a1.algorithm = Algorithm::FixedMemory;
    a2.algorithm = Algorithm::Truncated;
    a3.algorithm = Algorithm::VariableOrder;
    a3.order_law = OrderLaw::Tanh;
    e.grid = {point("alg1-fixed-memory", a1), point("alg2-truncated", a2), point("alg3-variable-order", a3)};
    e.band = Band{{2.0, -3.0, 1.0}, 0.15};
    out.push_back(std::move(e));
  }
  return out;
}

inline std::optional<ExperimentSpec> find_builtin(std::string_view id) {
  for (auto& e : builtin_experiments()) {
    if (e.id == id) return e;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Config files

inline FunctionSpec function_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "shifted_quadratic") {
    return ShiftedQuadraticSpec{j.value("a", 1.0), j.value("xstar", 5.0), j.value("fm", 0.0)};
  }
  if (kind == "polynomial") return PolynomialSpec{j.at("coeffs").get<std::vector<double>>()};
  if (kind == "separable_quadratic") {
    return SeparableQuadraticSpec{j.at("a").get<std::vector<double>>(), j.at("xstar").get<std::vector<double>>(),
                                  j.value("fm", 0.0)};
  }
  if (kind == "rosenbrock") return RosenbrockSpec{};
  throw ConfigError("unknown function kind '" + kind + "'");
}

/// Parses the declarative experiment format (see configs/ for samples):
///
///   { "id": ..., "function": {"kind": ...}, "x0": [...], "base": {config},
///     "grid": [{"label": ..., <config overrides>, "x0": [...]}, ...],
///     "band": {"target": [...], "tol": ...}, "lms": {...}, "contour": {...} }
inline ExperimentSpec spec_from_json(const json& j) {
  try {
    ExperimentSpec e;
    e.id = j.at("id").get<std::string>();
    e.description = j.value("description", std::string{});
    if (j.contains("function")) e.function = function_from_json(j.at("function"));
    if (j.contains("x0")) e.x0 = j.at("x0").get<std::vector<double>>();
    OptimizerConfig base;
    if (j.contains("base")) io::apply_config(base, j.at("base"));
    for (const auto& g : j.at("grid")) {
      GridPoint p{g.at("label").get<std::string>(), base, {}};
      io::apply_config(p.config, g, {"label", "x0"});
      if (g.contains("x0")) p.x0 = g.at("x0").get<std::vector<double>>();
      e.grid.push_back(std::move(p));
    }
    if (j.contains("band")) {
      e.band = Band{j.at("band").at("target").get<std::vector<double>>(), j.at("band").at("tol").get<double>()};
    }
    if (j.contains("lms")) {
      const auto& l = j.at("lms");
      LmsSetup s;
      s.true_weights = l.value("true_weights", s.true_weights);
      s.w0 = l.value("w0", s.w0);
      s.horizon = l.value("horizon", s.horizon);
      s.noise_variance = l.value("noise_variance", s.noise_variance);
      s.seed = l.value("seed", s.seed);
      e.lms = s;
    }
    if (j.contains("contour")) {
      const auto& c = j.at("contour");
      e.contour = ContourSpec{c.at("x").at(0).get<double>(), c.at("x").at(1).get<double>(),
                              c.at("y").at(0).get<double>(), c.at("y").at(1).get<double>(),
                              c.value("resolution", 51)};
    }
    return e;
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("bad experiment config: ") + ex.what());
  }
}

inline ExperimentSpec load_spec(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(is, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::exception& ex) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + ex.what());
  }
  return spec_from_json(j);
}

}  // namespace fgd::experiments
