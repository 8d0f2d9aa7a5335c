#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "fgd/error.hpp"
#include "fgd/fraccalc.hpp"
#include "fgd/functions.hpp"
#include "fgd/optim.hpp"

namespace fgd::lms {

struct Signals {
  std::vector<double> input;
  std::vector<double> noise;
};

/// White zero-mean input of unit variance and white noise of the given variance.
///
/// Gaussian samples come from a Box-Muller transform over std::mt19937_64, whose
/// output sequence is fixed by the standard, so a seed reproduces the same bits on
/// every conforming toolchain.
inline Signals generate_signals(std::uint64_t seed, int horizon, double noise_variance = 0.01) {
  if (horizon < 1) throw ConfigError("signal horizon must be >= 1");
  if (!(noise_variance >= 0.0)) throw ConfigError("noise variance must be >= 0");
  std::mt19937_64 rng(seed);
  auto uniform = [&rng] {
    // 53 random bits -> (0, 1]
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
  };
  auto normals = [&](std::vector<double>& out, double stddev) {
    out.resize(static_cast<std::size_t>(horizon));
    for (std::size_t i = 0; i < out.size(); i += 2) {
      const double r = std::sqrt(-2.0 * std::log(uniform()));
      const double theta = 2.0 * std::numbers::pi * uniform();
      out[i] = stddev * r * std::cos(theta);
      if (i + 1 < out.size()) out[i + 1] = stddev * r * std::sin(theta);
    }
  };
  Signals s;
  normals(s.input, 1.0);
  normals(s.noise, std::sqrt(noise_variance));
  return s;
}

/// Transverse filter identification problem: d_k = sum_i w_i u_{k-i} + v_k.
struct FilterScenario {
  std::vector<double> true_weights{2.0, -3.0, 1.0};
  std::vector<double> input;
  std::vector<double> noise;
  int horizon = 0;
  std::uint64_t seed = 0;

  std::size_t taps() const { return true_weights.size(); }

  /// Regressor [u_k, u_{k-1}, ...] with u_j = 0 for j < 0.
  std::vector<double> regressor(int k) const {
    std::vector<double> x(taps(), 0.0);
    for (std::size_t i = 0; i < taps(); ++i) {
      const int idx = k - static_cast<int>(i);
      if (idx >= 0) x[i] = input[static_cast<std::size_t>(idx)];
    }
    return x;
  }

  double desired(int k) const {
    const auto x = regressor(k);
    double d = noise[static_cast<std::size_t>(k)];
    for (std::size_t i = 0; i < taps(); ++i) d += true_weights[i] * x[i];
    return d;
  }
};

inline FilterScenario make_scenario(std::uint64_t seed, int horizon, std::vector<double> true_weights = {2.0, -3.0, 1.0},
                                    double noise_variance = 0.01) {
  if (true_weights.empty()) throw ConfigError("filter needs at least one tap");
  auto sig = generate_signals(seed, horizon, noise_variance);
  return FilterScenario{std::move(true_weights), std::move(sig.input), std::move(sig.noise), horizon, seed};
}

struct TapTrajectory {
  std::vector<double> initial;
  /// weights[k] is the estimate after sample k.
  std::vector<std::vector<double>> weights;
  /// a-priori error e_k = d_k - w(k-1)^T x_k
  std::vector<double> errors;
  std::vector<std::vector<double>> orders;
  Termination termination = Termination::MaxIters;

  const std::vector<double>& final_weights() const { return weights.empty() ? initial : weights.back(); }
};

/// Adapts the tap weights sample by sample with the configured update law.
///
/// Each tap sees the instantaneous loss J(w_i) = e_k^2 as a quadratic in w_i with the
/// other taps frozen, so the fractional series is exact. The variable order law is
/// driven by e_k^2 for every tap. Fixed memory starts with K - 1 classical samples.
inline TapTrajectory run_lms(const FilterScenario& sc, const OptimizerConfig& cfg, std::vector<double> w0) {
  const std::size_t n = sc.taps();
  if (w0.size() != n) throw ConfigError("initial weights must have one entry per tap");
  if (static_cast<int>(sc.input.size()) < sc.horizon || static_cast<int>(sc.noise.size()) < sc.horizon) {
    throw ConfigError("scenario signals shorter than its horizon");
  }
  cfg.validate(n);

  TapTrajectory out;
  out.initial = w0;
  out.weights.reserve(static_cast<std::size_t>(sc.horizon));
  std::vector<std::vector<double>> history{w0};  // w(0), w(1), ...
  std::vector<double> w = std::move(w0);
  const auto K = static_cast<std::size_t>(std::max(cfg.memory_steps, 1));

  try {
    for (int k = 0; k < sc.horizon; ++k) {
      const auto x = sc.regressor(k);
      double y = 0.0;
      for (std::size_t i = 0; i < n; ++i) y += w[i] * x[i];
      const double e = sc.desired(k) - y;
      out.errors.push_back(e);

      const std::size_t idx = history.size() - 1;
      const bool warmup = cfg.algorithm == Algorithm::FixedMemory && idx + 1 < K;
      std::vector<double> orders(n, 1.0);
      if (cfg.algorithm == Algorithm::VariableOrder) {
        std::fill(orders.begin(), orders.end(), order_law(e * e, cfg.order_law, cfg.beta));
      } else if (cfg.algorithm != Algorithm::Classical && !warmup) {
        std::fill(orders.begin(), orders.end(), cfg.alpha);
      }

      std::vector<double> next(w);
      for (std::size_t i = 0; i < n; ++i) {
        // e as a function of w_i: r - x_i w_i
        const double r = e + w[i] * x[i];
        const Polynomial loss({r * r, -2.0 * r * x[i], x[i] * x[i]});
        const double g = loss.deriv(1, w[i]);
        double h = 0.0;
        if (cfg.algorithm == Algorithm::Classical || warmup) {
          h = g;
        } else if (cfg.algorithm == Algorithm::Truncated) {
          h = g == 0.0 ? 0.0
                       : g * reciprocal_gamma(2.0 - orders[i]) *
                             std::pow(std::abs(w[i] - cfg.c) + cfg.epsilon, 1.0 - orders[i]);
        } else if (cfg.algorithm == Algorithm::NaiveFractional) {
          const FracDerivParams p{orders[i], cfg.c, cfg.definition, cfg.truncation};
          h = series_at_x(loss, w[i], p).value;
        } else {
          double diff = w[i] - cfg.c;
          if (cfg.algorithm == Algorithm::FixedMemory) {
            diff = w[i] - (idx >= K ? history[idx - K][i] : cfg.c);
          }
          const double base = detail::memory_base(diff, cfg.memory_style, cfg.epsilon, "lms");
          h = caputo_sum(loss, w[i], orders[i], base, cfg.truncation).value;
        }
        const double rate = warmup ? cfg.warmup_rate(i) : cfg.mu_for(i);
        next[i] = w[i] - rate * h;
        if (!std::isfinite(next[i]) || std::abs(next[i]) > detail::kDivergenceBound) {
          out.termination = Termination::Diverged;
          return out;
        }
      }
      w = next;
      history.push_back(next);
      out.weights.push_back(std::move(next));
      out.orders.push_back(std::move(orders));
    }
  } catch (const DomainError&) {
    out.termination = Termination::DomainError;
  }
  return out;
}

}  // namespace fgd::lms
