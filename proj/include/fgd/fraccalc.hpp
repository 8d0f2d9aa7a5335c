#pragma once

#include <cmath>
#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fgd/error.hpp"
#include "fgd/functions.hpp"
#include "fgd/special.hpp"

namespace fgd {

enum class Definition { Caputo, RiemannLiouville };

/// How an infinite derivative series is cut off.
struct TruncationPolicy {
  int max_terms = 30;
  double term_tol = 1e-12;
  bool exact_if_polynomial = true;

  void validate() const {
    if (max_terms < 1) throw ConfigError("truncation.max_terms must be >= 1");
    if (!(term_tol >= 0.0)) throw ConfigError("truncation.term_tol must be >= 0");
  }
};

struct FracDerivParams {
  double alpha = 0.5;
  double c = 0.0;
  Definition definition = Definition::Caputo;
  TruncationPolicy truncation{};
};

/// Value of a truncated series plus how it was cut.
struct SeriesValue {
  double value = 0.0;
  int terms = 0;
  /// max_terms was reached while the last term was still above term_tol.
  bool truncation_warning = false;
};

namespace detail {

inline void check_series_order(double alpha) {
  if (!std::isfinite(alpha) || !(alpha > 0.0) || !(alpha < 2.0)) {
    throw DomainError("series paths need 0 < alpha < 2, got " + std::to_string(alpha));
  }
}

// Classical order n with n - 1 < alpha <= n.
inline int integer_ceiling(double alpha) { return static_cast<int>(std::ceil(alpha)); }

/// Shared summation loop. term(i) must return the i-th series term.
template <class TermFn>
SeriesValue sum_series(int first, std::optional<unsigned> degree, const TruncationPolicy& tp,
                       TermFn&& term) {
  tp.validate();
  const bool exact = tp.exact_if_polynomial && degree.has_value();
  SeriesValue out;
  double last = 0.0;
  for (int i = first; out.terms < tp.max_terms; ++i) {
    if (exact && i > static_cast<int>(*degree)) return out;
    last = term(i);
    out.value += last;
    ++out.terms;
    if (!exact && i > first && std::abs(last) < tp.term_tol) return out;
  }
  if (exact) {
    // Cut short of the polynomial degree.
    out.truncation_warning = first + out.terms - 1 < static_cast<int>(*degree);
  } else {
    out.truncation_warning = !(std::abs(last) < tp.term_tol);
  }
  return out;
}

}  // namespace detail

/// Caputo-type sum around x with an explicit power base:
///
///   sum_{i=n} binom(alpha - n, i - n) f^(i)(x) / Gamma(i + 1 - alpha) * base^(i - alpha),
///
/// n = ceil(alpha). With base = x - c this is the Caputo derivative with lower
/// terminal c; the optimizers pass |x_k - x_{k-K}|, |x_k - c| + eps and so on.
inline SeriesValue caputo_sum(const DifferentiableFunction& f, double x, double alpha, double base,
                              const TruncationPolicy& tp = {}) {
  detail::check_series_order(alpha);
  if (!(base >= 0.0)) throw DomainError("caputo_sum: negative power base " + std::to_string(base));
  const int n = detail::integer_ceiling(alpha);
  return detail::sum_series(n, f.degree_bound(), tp, [&](int i) {
    const double d = f.deriv(static_cast<unsigned>(i), x);
    if (d == 0.0) return 0.0;
    return gen_binomial(alpha - n, static_cast<unsigned>(i - n)) * d * reciprocal_gamma(i + 1 - alpha) *
           std::pow(base, i - alpha);
  });
}

/// Riemann-Liouville sum around x: sum_{i=0} binom(alpha, i) f^(i)(x) / Gamma(i+1-alpha) base^(i-alpha).
inline SeriesValue rl_sum(const DifferentiableFunction& f, double x, double alpha, double base,
                          const TruncationPolicy& tp = {}) {
  detail::check_series_order(alpha);
  if (!(base > 0.0)) throw DomainError("rl_sum: power base must be positive");
  return detail::sum_series(0, f.degree_bound(), tp, [&](int i) {
    const double d = f.deriv(static_cast<unsigned>(i), x);
    if (d == 0.0) return 0.0;
    return gen_binomial(alpha, static_cast<unsigned>(i)) * d * reciprocal_gamma(i + 1 - alpha) *
           std::pow(base, i - alpha);
  });
}

/// Caputo derivative of f with lower terminal p.c, expanded around x.
/// At x == c the value is 0 for alpha < 1 (empty integration interval).
inline SeriesValue caputo_series_at_x(const DifferentiableFunction& f, double x, const FracDerivParams& p) {
  if (x < p.c) throw DomainError("caputo_series_at_x: x must not be below the lower terminal");
  return caputo_sum(f, x, p.alpha, x - p.c, p.truncation);
}

/// Riemann-Liouville derivative of f with lower terminal p.c, expanded around x.
inline SeriesValue rl_series_at_x(const DifferentiableFunction& f, double x, const FracDerivParams& p) {
  if (!(x > p.c)) throw DomainError("rl_series_at_x: x must exceed the lower terminal");
  return rl_sum(f, x, p.alpha, x - p.c, p.truncation);
}

/// Either definition around x, chosen by p.definition.
inline SeriesValue series_at_x(const DifferentiableFunction& f, double x, const FracDerivParams& p) {
  return p.definition == Definition::Caputo ? caputo_series_at_x(f, x, p) : rl_series_at_x(f, x, p);
}

/// Taylor expansion around the lower terminal:
///   RL:     sum_{i=0} f^(i)(c) / Gamma(i+1-alpha) (x-c)^(i-alpha)
///   Caputo: same sum from i = n = ceil(alpha).
inline SeriesValue series_at_c(const DifferentiableFunction& f, double x, const FracDerivParams& p) {
  detail::check_series_order(p.alpha);
  const bool caputo = p.definition == Definition::Caputo;
  if (x < p.c || (!caputo && x == p.c)) {
    throw DomainError("series_at_c: x must exceed the lower terminal");
  }
  const double t = x - p.c;
  const int first = caputo ? detail::integer_ceiling(p.alpha) : 0;
  return detail::sum_series(first, f.degree_bound(), p.truncation, [&](int i) {
    const double d = f.deriv(static_cast<unsigned>(i), p.c);
    if (d == 0.0) return 0.0;
    return d * reciprocal_gamma(i + 1 - p.alpha) * std::pow(t, i - p.alpha);
  });
}

/// Closed-form fractional derivative of f(x) = a (x - x*)^2 + f_m for 0 < alpha <= 1.
inline double quadratic_closed_form(double a, double xstar, double fm, double x, const FracDerivParams& p) {
  const double alpha = p.alpha;
  if (!(alpha > 0.0) || !(alpha <= 1.0)) {
    throw DomainError("quadratic_closed_form: needs 0 < alpha <= 1");
  }
  if (!(x > p.c)) throw DomainError("quadratic_closed_form: x must exceed the lower terminal");
  const double t = x - p.c;
  double v = 2.0 * a * reciprocal_gamma(3.0 - alpha) * std::pow(t, 2.0 - alpha) +
             2.0 * a * (p.c - xstar) * reciprocal_gamma(2.0 - alpha) * std::pow(t, 1.0 - alpha);
  if (p.definition == Definition::RiemannLiouville) {
    const double fc = a * (p.c - xstar) * (p.c - xstar) + fm;
    v += fc * reciprocal_gamma(1.0 - alpha) * std::pow(t, -alpha);
  }
  return v;
}

namespace detail {

// (1 / Gamma(2 - alpha)) * integral_0^{(x-c)^(1-alpha)} g(x - s^(1/(1-alpha))) ds, which equals
// (1 / Gamma(1 - alpha)) * integral_c^x g(tau) (x - tau)^(-alpha) dtau.
template <class G>
double abel_integral(G&& g, double x, double c, double alpha, double tol) {
  const double upper = std::pow(x - c, 1.0 - alpha);
  const double power = 1.0 / (1.0 - alpha);
  auto integrand = [&](double s) { return g(x - std::pow(s, power)); };
  double err = 0.0;
  double l1 = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, 0.0, upper, 25, tol, &err, &l1);
  if (!std::isfinite(v) || err > 1e-9 * std::max(1.0, l1)) {
    throw ConvergenceError("quadrature oracle: adaptive refinement exceeded its budget");
  }
  return v * reciprocal_gamma(2.0 - alpha);
}

}  // namespace detail

/// Fractional derivative from the integral definitions, for 0 < alpha < 1.
///
/// Caputo integrates f' against the weakly singular kernel after the substitution
/// tau = x - s^(1/(1-alpha)), which removes the endpoint singularity. Riemann-Liouville
/// differentiates the fractional integral of f with a Richardson-extrapolated central
/// difference. Intended as an independent check on the series paths.
inline double quadrature_oracle(const DifferentiableFunction& f, double x, const FracDerivParams& p) {
  const double alpha = p.alpha;
  if (!(alpha > 0.0) || !(alpha < 1.0)) throw DomainError("quadrature_oracle: needs 0 < alpha < 1");
  if (!(x > p.c)) throw DomainError("quadrature_oracle: x must exceed the lower terminal");
  // Relative tolerance; tighter values only chase roundoff in the error estimate.
  constexpr double tol = 1e-10;

  if (p.definition == Definition::Caputo) {
    return detail::abel_integral([&](double tau) { return f.deriv(1, tau); }, x, p.c, alpha, tol);
  }

  auto integral = [&](double y) {
    return detail::abel_integral([&](double tau) { return f.value(tau); }, y, p.c, alpha, tol);
  };
  auto central = [&](double h) { return (integral(x + h) - integral(x - h)) / (2.0 * h); };
  const double h = (x - p.c) / 32.0;
  // Two rounds of Richardson extrapolation on h, h/2, h/4.
  const double d1 = central(h), d2 = central(h / 2), d3 = central(h / 4);
  const double r1 = (4.0 * d2 - d1) / 3.0, r2 = (4.0 * d3 - d2) / 3.0;
  return (16.0 * r2 - r1) / 15.0;
}

/// Stationary points of the naive fractional iteration on a (x - x*)^2 (f_m = 0).
struct FractionalFixedPoints {
  /// Roots of the RL derivative other than x = c (larger root first).
  std::vector<double> riemann_liouville;
  double caputo = 0.0;
};

inline FractionalFixedPoints frac_fixed_points_quadratic(double xstar, double c, double alpha) {
  if (!(alpha > 0.0) || !(alpha <= 1.0)) {
    throw DomainError("frac_fixed_points_quadratic: needs 0 < alpha <= 1");
  }
  // At alpha = 1 the derivative is classical and the root x = c of the RL form disappears.
  if (c == xstar || alpha == 1.0) return {{xstar}, xstar};
  const double two_minus = 2.0 - alpha;
  const double disc = std::sqrt(two_minus * two_minus - 2.0 * two_minus * (1.0 - alpha));
  FractionalFixedPoints out;
  out.riemann_liouville = {c - (c - xstar) * (two_minus + disc) / 2.0,
                           c - (c - xstar) * (two_minus - disc) / 2.0};
  out.caputo = c - (c - xstar) * two_minus;
  return out;
}

}  // namespace fgd
