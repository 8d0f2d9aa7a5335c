#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fgd/error.hpp"
#include "fgd/fraccalc.hpp"
#include "fgd/functions.hpp"
#include "fgd/special.hpp"

namespace fgd {

enum class Algorithm { Classical, NaiveFractional, FixedMemory, Truncated, VariableOrder };
enum class OrderLaw { Reciprocal, Sigmoid, Tanh };
enum class LossKind { ObjectiveValue, GradSquared };
enum class Coupling { PerCoordinate, Uniform };
/// Base of the power term: signed difference, its absolute value, or absolute value + epsilon.
enum class MemoryStyle { Signed, Abs, AbsEps };
enum class Termination { Converged, MaxIters, Diverged, DomainError };

namespace detail {

template <class E, std::size_t N>
using NameTable = std::array<std::pair<E, std::string_view>, N>;

inline constexpr NameTable<Algorithm, 5> kAlgorithmNames{{
    {Algorithm::Classical, "classical"},
    {Algorithm::NaiveFractional, "naive_fractional"},
    {Algorithm::FixedMemory, "fixed_memory"},
    {Algorithm::Truncated, "truncated"},
    {Algorithm::VariableOrder, "variable_order"},
}};
inline constexpr NameTable<OrderLaw, 3> kOrderLawNames{{
    {OrderLaw::Reciprocal, "reciprocal"}, {OrderLaw::Sigmoid, "sigmoid"}, {OrderLaw::Tanh, "tanh"}}};
inline constexpr NameTable<LossKind, 2> kLossKindNames{{
    {LossKind::ObjectiveValue, "objective_value"}, {LossKind::GradSquared, "grad_squared"}}};
inline constexpr NameTable<Coupling, 2> kCouplingNames{{
    {Coupling::PerCoordinate, "per_coordinate"}, {Coupling::Uniform, "uniform"}}};
inline constexpr NameTable<MemoryStyle, 3> kMemoryStyleNames{{
    {MemoryStyle::Signed, "signed"}, {MemoryStyle::Abs, "abs"}, {MemoryStyle::AbsEps, "abs_eps"}}};
inline constexpr NameTable<Termination, 4> kTerminationNames{{
    {Termination::Converged, "Converged"},
    {Termination::MaxIters, "MaxIters"},
    {Termination::Diverged, "Diverged"},
    {Termination::DomainError, "DomainError"},
}};
inline constexpr NameTable<Definition, 2> kDefinitionNames{{
    {Definition::Caputo, "caputo"}, {Definition::RiemannLiouville, "rl"}}};

template <class E, std::size_t N>
std::string_view name_in(const NameTable<E, N>& table, E e) {
  for (const auto& [v, n] : table) {
    if (v == e) return n;
  }
  return "?";
}

template <class E, std::size_t N>
E parse_in(const NameTable<E, N>& table, std::string_view s, const char* what) {
  for (const auto& [v, n] : table) {
    if (n == s) return v;
  }
  throw ConfigError(std::string("unknown ") + what + " '" + std::string(s) + "'");
}

}  // namespace detail

inline std::string_view name(Algorithm e) { return detail::name_in(detail::kAlgorithmNames, e); }
inline std::string_view name(OrderLaw e) { return detail::name_in(detail::kOrderLawNames, e); }
inline std::string_view name(LossKind e) { return detail::name_in(detail::kLossKindNames, e); }
inline std::string_view name(Coupling e) { return detail::name_in(detail::kCouplingNames, e); }
inline std::string_view name(MemoryStyle e) { return detail::name_in(detail::kMemoryStyleNames, e); }
inline std::string_view name(Termination e) { return detail::name_in(detail::kTerminationNames, e); }
inline std::string_view name(Definition e) { return detail::name_in(detail::kDefinitionNames, e); }

template <class E>
E parse_enum(std::string_view s);
template <>
inline Algorithm parse_enum<Algorithm>(std::string_view s) {
  return detail::parse_in(detail::kAlgorithmNames, s, "algorithm");
}
template <>
inline OrderLaw parse_enum<OrderLaw>(std::string_view s) {
  return detail::parse_in(detail::kOrderLawNames, s, "order law");
}
template <>
inline LossKind parse_enum<LossKind>(std::string_view s) {
  return detail::parse_in(detail::kLossKindNames, s, "loss kind");
}
template <>
inline Coupling parse_enum<Coupling>(std::string_view s) {
  return detail::parse_in(detail::kCouplingNames, s, "coupling");
}
template <>
inline MemoryStyle parse_enum<MemoryStyle>(std::string_view s) {
  return detail::parse_in(detail::kMemoryStyleNames, s, "memory style");
}
template <>
inline Termination parse_enum<Termination>(std::string_view s) {
  return detail::parse_in(detail::kTerminationNames, s, "termination");
}
template <>
inline Definition parse_enum<Definition>(std::string_view s) {
  return detail::parse_in(detail::kDefinitionNames, s, "definition");
}

/// Every knob of the five update laws. Fields an algorithm does not use are ignored.
struct OptimizerConfig {
  Algorithm algorithm = Algorithm::Classical;
  /// Learning rate; one entry applies to every coordinate, otherwise one per coordinate.
  std::vector<double> mu{0.1};
  /// Constant order (naive fractional, fixed memory, truncated).
  double alpha = 1.0;

  // Variable order
  OrderLaw order_law = OrderLaw::Tanh;
  double beta = 0.1;
  LossKind loss = LossKind::GradSquared;
  Coupling coupling = Coupling::PerCoordinate;
  double gamma = 1.0;

  /// Memory length K of the fixed memory method.
  int memory_steps = 1;
  /// Rate of the classical steps that build the first K iterates; defaults to mu.
  std::optional<double> warmup_mu;

  double c = 0.0;
  double epsilon = 0.0;
  MemoryStyle memory_style = MemoryStyle::Signed;
  /// Derivative used by the naive fractional method.
  Definition definition = Definition::Caputo;
  TruncationPolicy truncation{};

  int max_iters = 100;
  /// Stop once |x_{k+1} - x_k| <= stop_tol; 0 runs exactly max_iters steps.
  double stop_tol = 0.0;

  double mu_for(std::size_t coord) const { return mu.size() == 1 ? mu.front() : mu.at(coord); }

  double warmup_rate(std::size_t coord) const { return warmup_mu.value_or(mu_for(coord)); }

  void validate(std::size_t dimension = 1) const {
    if (mu.empty() || (mu.size() != 1 && mu.size() != dimension)) {
      throw ConfigError("mu needs one entry or one per coordinate");
    }
    for (double m : mu) {
      if (!(m > 0.0) || !std::isfinite(m)) throw ConfigError("mu must be positive");
    }
    if (max_iters < 1) throw ConfigError("max_iters must be >= 1");
    if (!(stop_tol >= 0.0)) throw ConfigError("stop_tol must be >= 0");
    if (!(epsilon >= 0.0)) throw ConfigError("epsilon must be >= 0");
    if (warmup_mu && !(*warmup_mu >= 0.0)) throw ConfigError("warmup_mu must be >= 0");
    truncation.validate();
    auto in_open = [&](double lo, double hi) { return alpha > lo && alpha < hi; };
    switch (algorithm) {
      case Algorithm::Classical:
        break;
      case Algorithm::NaiveFractional:
        if (!in_open(0.0, 2.0)) throw ConfigError("naive fractional requires 0 < alpha < 2");
        break;
      case Algorithm::FixedMemory:
        if (memory_steps < 1) throw ConfigError("fixed memory requires K >= 1");
        if (memory_style == MemoryStyle::Signed ? !in_open(0.5, 1.5) : !in_open(0.0, 2.0)) {
          throw ConfigError(memory_style == MemoryStyle::Signed
                                ? "fixed memory with signed memory term requires 0.5 < alpha < 1.5"
                                : "fixed memory requires 0 < alpha < 2");
        }
        break;
      case Algorithm::Truncated:
        if (!in_open(0.0, 2.0)) throw ConfigError("truncated requires 0 < alpha < 2");
        break;
      case Algorithm::VariableOrder:
        if (!(beta > 0.0)) throw ConfigError("variable order requires beta > 0");
        if (!(gamma > 0.0)) throw ConfigError("uniform coupling requires gamma > 0");
        break;
    }
  }
};

/// Iterates of one run plus per-step metadata.
///
/// iterates and values have one entry per iterate; orders and steps one entry per
/// step, so iterates.size() == steps.size() + 1.
struct Trajectory {
  std::vector<std::vector<double>> iterates;
  /// Order used along each coordinate for step k (1 for classical steps).
  std::vector<std::vector<double>> orders;
  /// max_j |x_{k+1,j} - x_{k,j}|
  std::vector<double> steps;
  std::vector<double> values;
  Termination termination = Termination::MaxIters;
  std::vector<std::string> warnings;

  std::size_t dimension() const { return iterates.empty() ? 0 : iterates.front().size(); }
  std::size_t num_steps() const { return steps.size(); }
  const std::vector<double>& final_iterate() const { return iterates.back(); }
};

// ---------------------------------------------------------------------------
// Scalar building blocks

/// x - mu f'(x)
inline double step_classical(const DifferentiableFunction& f, double x, const OptimizerConfig& cfg) {
  return x - cfg.mu_for(0) * f.deriv(1, x);
}

/// x - mu D^alpha f(x), with the derivative taken from the at-x series with terminal cfg.c.
inline double step_naive_fractional(const DifferentiableFunction& f, double x, const OptimizerConfig& cfg) {
  const FracDerivParams p{cfg.alpha, cfg.c, cfg.definition, cfg.truncation};
  return x - cfg.mu_for(0) * series_at_x(f, x, p).value;
}

/// Order as a function of a nonnegative loss; 1 at J = 0, in (0, 1] otherwise.
inline double order_law(double J, OrderLaw law, double beta) {
  if (!(J >= 0.0)) throw DomainError("order law needs J >= 0");
  const double u = beta * J;
  double a = 1.0;
  switch (law) {
    case OrderLaw::Reciprocal: a = 1.0 / (1.0 + u); break;
    // 2 / (1 + e^u) and 1 - tanh(u) written with e^-u so they stay positive for large u
    case OrderLaw::Sigmoid: a = 2.0 * std::exp(-u) / (1.0 + std::exp(-u)); break;
    case OrderLaw::Tanh: a = 2.0 * std::exp(-2.0 * u) / (1.0 + std::exp(-2.0 * u)); break;
  }
  // Past exp underflow the order would round to 0, outside the series range.
  return std::max(a, std::numeric_limits<double>::min());
}

inline double loss_for_order(const DifferentiableFunction& f, double x, LossKind kind) {
  if (kind == LossKind::ObjectiveValue) return f.value(x);
  const double g = f.deriv(1, x);
  return g * g;
}

/// Warning text when J = f is used on a function whose recorded minimum is nonzero.
inline std::optional<std::string> loss_kind_warning(std::optional<double> minimum, LossKind kind) {
  if (kind == LossKind::ObjectiveValue && minimum && *minimum != 0.0) {
    return "order law driven by J = f on a function with nonzero minimum " + std::to_string(*minimum) +
           "; use grad_squared";
  }
  return std::nullopt;
}

/// Supremal learning rate 2 Gamma(2 - alpha) / (rho d^(1 - alpha)) of the truncated method,
/// for a rho-Lipschitz gradient and d = sup |x_k - c| + eps.
inline double mu_bound_truncated(double rho, double d, double alpha) {
  if (!(rho > 0.0) || !(d > 0.0)) throw DomainError("mu_bound_truncated: rho and d must be positive");
  return 2.0 * gamma(2.0 - alpha) / (rho * std::pow(d, 1.0 - alpha));
}

/// x_0 followed by K - 1 classical steps at the warm-up rate.
inline std::vector<double> seed_warmup(const DifferentiableFunction& f, double x0, int K,
                                       const OptimizerConfig& cfg) {
  if (K < 1) throw ConfigError("seed_warmup requires K >= 1");
  std::vector<double> seeds{x0};
  const double rate = cfg.warmup_rate(0);
  while (static_cast<int>(seeds.size()) < K) {
    const double x = seeds.back();
    seeds.push_back(x - rate * f.deriv(1, x));
  }
  return seeds;
}

// ---------------------------------------------------------------------------
// Engine

namespace detail {

inline constexpr double kDivergenceBound = 1e12;

inline double memory_base(double diff, MemoryStyle style, double eps, const char* what) {
  switch (style) {
    case MemoryStyle::Signed:
      if (!(diff > 0.0)) {
        throw DomainError(std::string(what) + ": signed memory term is not positive (" +
                          std::to_string(diff) + ")");
      }
      return diff;
    case MemoryStyle::Abs: return std::abs(diff);
    case MemoryStyle::AbsEps: return std::abs(diff) + eps;
  }
  return diff;
}

class Engine {
 public:
  Engine(const MultivariateFunction& f, const OptimizerConfig& cfg) : f_(f), cfg_(cfg), d_(f.dimension()) {}

  Trajectory run(std::vector<std::vector<double>> seeds, bool warmup) {
    cfg_.validate(d_);
    if (seeds.empty() || seeds.front().size() != d_) {
      throw ConfigError("start point dimension does not match the function");
    }
    if (auto w = loss_kind_warning(f_.minimum_value(), cfg_.loss);
        w && cfg_.algorithm == Algorithm::VariableOrder) {
      traj_.warnings.push_back(*w);
    }
    traj_.iterates.push_back(seeds.front());
    traj_.values.push_back(f_.value(seeds.front()));
    try {
      for (std::size_t s = 1; s < seeds.size(); ++s) {
        if (seeds[s].size() != d_) throw ConfigError("seed dimension does not match the function");
        if (!push(seeds[s], std::vector<double>(d_, 1.0))) return finish();
      }
      if (cfg_.algorithm == Algorithm::FixedMemory && warmup) {
        while (static_cast<int>(traj_.iterates.size()) < cfg_.memory_steps && !done()) {
          if (!push(classical_point(true), std::vector<double>(d_, 1.0))) return finish();
        }
      }
      while (!done()) {
        std::vector<double> orders = step_orders();
        std::vector<double> next = next_point(orders);
        if (!push(std::move(next), std::move(orders))) return finish();
        if (cfg_.stop_tol > 0.0 && traj_.steps.back() <= cfg_.stop_tol) {
          traj_.termination = Termination::Converged;
          return finish();
        }
      }
    } catch (const DomainError& e) {
      traj_.termination = Termination::DomainError;
      traj_.warnings.emplace_back(e.what());
    }
    return finish();
  }

 private:
  bool done() const { return static_cast<int>(traj_.iterates.size()) > cfg_.max_iters; }

  Trajectory finish() { return std::move(traj_); }

  const std::vector<double>& current() const { return traj_.iterates.back(); }

  // Appends x unless it left the finite region; returns false on divergence.
  bool push(std::vector<double> x, std::vector<double> orders) {
    double step = 0.0;
    for (std::size_t j = 0; j < d_; ++j) {
      if (!std::isfinite(x[j]) || std::abs(x[j]) > kDivergenceBound) {
        traj_.termination = Termination::Diverged;
        return false;
      }
      step = std::max(step, std::abs(x[j] - current()[j]));
    }
    const double fx = f_.value(x);
    if (!std::isfinite(fx)) {
      traj_.termination = Termination::Diverged;
      return false;
    }
    traj_.steps.push_back(step);
    traj_.orders.push_back(std::move(orders));
    traj_.values.push_back(fx);
    traj_.iterates.push_back(std::move(x));
    return true;
  }

  std::vector<double> classical_point(bool warmup) const {
    const auto& v = current();
    std::vector<double> next(v);
    for (std::size_t j = 0; j < d_; ++j) {
      const double rate = warmup ? cfg_.warmup_rate(j) : cfg_.mu_for(j);
      next[j] = v[j] - rate * f_.partial(j, 1, v);
    }
    return next;
  }

  std::vector<double> step_orders() const {
    switch (cfg_.algorithm) {
      case Algorithm::Classical: return std::vector<double>(d_, 1.0);
      case Algorithm::VariableOrder: return variable_orders();
      default: return std::vector<double>(d_, cfg_.alpha);
    }
  }

  std::vector<double> variable_orders() const {
    const auto& v = current();
    std::vector<double> J(d_);
    if (cfg_.loss == LossKind::ObjectiveValue) {
      std::fill(J.begin(), J.end(), f_.value(v));
    } else if (cfg_.coupling == Coupling::PerCoordinate) {
      for (std::size_t j = 0; j < d_; ++j) {
        const double g = f_.partial(j, 1, v);
        J[j] = g * g;
      }
    } else {
      double total = 0.0;
      for (std::size_t j = 0; j < d_; ++j) {
        const double g = f_.partial(j, 1, v);
        total += (j == 0 ? 1.0 : cfg_.gamma) * g * g;
      }
      std::fill(J.begin(), J.end(), total);
    }
    std::vector<double> orders(d_);
    for (std::size_t j = 0; j < d_; ++j) orders[j] = order_law(J[j], cfg_.order_law, cfg_.beta);
    return orders;
  }

  std::vector<double> next_point(const std::vector<double>& orders) const {
    if (cfg_.algorithm == Algorithm::Classical) return classical_point(false);
    const auto& v = current();
    const std::size_t k = traj_.iterates.size() - 1;
    std::vector<double> next(v);
    for (std::size_t j = 0; j < d_; ++j) {
      const CoordinateSection section(f_, v, j);
      const double alpha = orders[j];
      double h = 0.0;
      switch (cfg_.algorithm) {
        case Algorithm::NaiveFractional: {
          const FracDerivParams p{alpha, cfg_.c, cfg_.definition, cfg_.truncation};
          h = series_at_x(section, v[j], p).value;
          break;
        }
        case Algorithm::FixedMemory: {
          const std::size_t K = static_cast<std::size_t>(cfg_.memory_steps);
          // Before K iterates exist the memory window starts at the lower terminal.
          const double terminal = k >= K ? traj_.iterates[k - K][j] : cfg_.c;
          const double base = memory_base(v[j] - terminal, cfg_.memory_style, cfg_.epsilon, "fixed memory");
          h = caputo_sum(section, v[j], alpha, base, cfg_.truncation).value;
          break;
        }
        case Algorithm::Truncated: {
          const double g = f_.partial(j, 1, v);
          h = g == 0.0 ? 0.0
                       : g * reciprocal_gamma(2.0 - alpha) *
                             std::pow(std::abs(v[j] - cfg_.c) + cfg_.epsilon, 1.0 - alpha);
          break;
        }
        case Algorithm::VariableOrder: {
          const double base = memory_base(v[j] - cfg_.c, cfg_.memory_style, cfg_.epsilon, "variable order");
          h = caputo_sum(section, v[j], alpha, base, cfg_.truncation).value;
          break;
        }
        case Algorithm::Classical:
          break;
      }
      next[j] = v[j] - cfg_.mu_for(j) * h;
    }
    return next;
  }

  const MultivariateFunction& f_;
  const OptimizerConfig& cfg_;
  std::size_t d_;
  Trajectory traj_;
};

inline OptimizerConfig with_algorithm(OptimizerConfig cfg, Algorithm a) {
  cfg.algorithm = a;
  return cfg;
}

}  // namespace detail

/// Runs cfg.algorithm on a multivariate objective with simultaneous (Jacobi) coordinate
/// updates. Each coordinate takes the scalar rule on its coordinate section.
inline Trajectory run_multivariate(const MultivariateFunction& f, std::vector<double> x0,
                                   const OptimizerConfig& cfg) {
  return detail::Engine(f, cfg).run({std::move(x0)}, true);
}

/// Scalar run of cfg.algorithm from x0. Fixed memory seeds are built by classical warm-up.
inline Trajectory run(const DifferentiableFunction& f, double x0, const OptimizerConfig& cfg) {
  const ScalarAsMultivariate g(f);
  return detail::Engine(g, cfg).run({{x0}}, true);
}

inline Trajectory run_classical(const DifferentiableFunction& f, double x0, OptimizerConfig cfg) {
  return run(f, x0, detail::with_algorithm(std::move(cfg), Algorithm::Classical));
}

inline Trajectory run_naive_fractional(const DifferentiableFunction& f, double x0, OptimizerConfig cfg) {
  return run(f, x0, detail::with_algorithm(std::move(cfg), Algorithm::NaiveFractional));
}

/// Fixed memory method from an explicit seed window x_0 .. x_{K-1}.
inline Trajectory run_fixed_memory(const DifferentiableFunction& f, std::span<const double> seeds,
                                   const OptimizerConfig& cfg) {
  if (cfg.algorithm != Algorithm::FixedMemory) throw ConfigError("run_fixed_memory needs algorithm fixed_memory");
  if (static_cast<int>(seeds.size()) != cfg.memory_steps) {
    throw ConfigError("run_fixed_memory needs exactly K seeds");
  }
  const ScalarAsMultivariate g(f);
  std::vector<std::vector<double>> window;
  for (double s : seeds) window.push_back({s});
  return detail::Engine(g, cfg).run(std::move(window), false);
}

inline Trajectory run_truncated(const DifferentiableFunction& f, double x0, const OptimizerConfig& cfg) {
  if (cfg.algorithm != Algorithm::Truncated) throw ConfigError("run_truncated needs algorithm truncated");
  return run(f, x0, cfg);
}

inline Trajectory run_variable_order(const DifferentiableFunction& f, double x0, const OptimizerConfig& cfg) {
  if (cfg.algorithm != Algorithm::VariableOrder) {
    throw ConfigError("run_variable_order needs algorithm variable_order");
  }
  return run(f, x0, cfg);
}

/// First iteration from which every later iterate stays within tol of target (max-abs
/// per coordinate). Empty when the final iterate is outside the band.
inline std::optional<std::size_t> band_entry(const Trajectory& t, std::span<const double> target, double tol) {
  std::optional<std::size_t> entry;
  for (std::size_t k = t.iterates.size(); k-- > 0;) {
    const auto& x = t.iterates[k];
    bool inside = true;
    for (std::size_t j = 0; j < x.size() && j < target.size(); ++j) {
      if (!(std::abs(x[j] - target[j]) <= tol)) inside = false;
    }
    if (!inside) break;
    entry = k;
  }
  return entry;
}

}  // namespace fgd
