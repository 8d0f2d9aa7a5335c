#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "fgd/error.hpp"

namespace fgd {

namespace detail {

inline bool is_nonpositive_integer(double x) {
  return x <= 0.0 && std::nearbyint(x) == x;
}

}  // namespace detail

/// Gamma function. Throws PoleError at 0, -1, -2, ...
///
/// Negative non-integer arguments go through the reflection formula
/// Gamma(x) Gamma(1 - x) = pi / sin(pi x); the series paths never need them.
inline double gamma(double x) {
  if (std::isnan(x)) return x;
  if (detail::is_nonpositive_integer(x)) {
    throw PoleError("gamma: pole at x = " + std::to_string(x));
  }
  if (x < 0.5) {
    return std::numbers::pi / (std::sin(std::numbers::pi * x) * std::tgamma(1.0 - x));
  }
  return std::tgamma(x);
}

/// 1 / Gamma(x), which is entire: zero at the poles of Gamma.
inline double reciprocal_gamma(double x) {
  if (detail::is_nonpositive_integer(x)) return 0.0;
  return 1.0 / gamma(x);
}

/// Generalized binomial coefficient Gamma(p+1) / (Gamma(q+1) Gamma(p-q+1)).
///
/// Evaluated by the product recurrence binom(p, q) = binom(p, q-1) (p-q+1) / q,
/// which is finite for every real p, including where Gamma(p-q+1) has a pole.
inline double gen_binomial(double p, unsigned q) {
  double r = 1.0;
  for (unsigned j = 1; j <= q; ++j) {
    r *= (p - static_cast<double>(j) + 1.0) / static_cast<double>(j);
  }
  return r;
}

}  // namespace fgd
