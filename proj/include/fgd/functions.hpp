#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fgd/error.hpp"

namespace fgd {

/// Scalar objective with analytic derivatives of any order.
///
/// The fractional series evaluate f^(i)(x) for i up to the truncation order,
/// so implementations supply exact higher derivatives instead of a gradient.
class DifferentiableFunction {
 public:
  virtual ~DifferentiableFunction() = default;

  /// i-th derivative at x; deriv(0, x) is the value.
  virtual double deriv(unsigned order, double x) const = 0;

  double value(double x) const { return deriv(0, x); }

  /// Polynomial degree p when the function is a polynomial (deriv(i, .) == 0 for i > p).
  virtual std::optional<unsigned> degree_bound() const { return std::nullopt; }

  /// Known minimum value, if recorded. Used to warn when J = f drives an order law.
  virtual std::optional<double> minimum_value() const { return std::nullopt; }
};

/// Polynomial in ascending-power coefficient order: c0 + c1 x + c2 x^2 + ...
class Polynomial : public DifferentiableFunction {
 public:
  explicit Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw ConfigError("polynomial needs at least one coefficient");
    while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
  }

  double deriv(unsigned order, double x) const override {
    const std::size_t n = coeffs_.size();
    if (order >= n) return 0.0;
    // Horner over the coefficients of the order-th derivative: c_k k!/(k-order)!
    double acc = 0.0;
    for (std::size_t k = n; k-- > order;) {
      double falling = 1.0;
      for (std::size_t j = 0; j < order; ++j) falling *= static_cast<double>(k - j);
      acc = acc * x + coeffs_[k] * falling;
    }
    return acc;
  }

  std::optional<unsigned> degree_bound() const override {
    return static_cast<unsigned>(coeffs_.size() - 1);
  }

  std::optional<double> minimum_value() const override { return minimum_; }

  const std::vector<double>& coefficients() const { return coeffs_; }

  Polynomial& with_minimum(double fm) {
    minimum_ = fm;
    return *this;
  }

 private:
  std::vector<double> coeffs_;
  std::optional<double> minimum_;
};

inline Polynomial make_polynomial(std::vector<double> coeffs) {
  return Polynomial(std::move(coeffs));
}

/// f(x) = a (x - x*)^2 + f_m, a > 0.
inline Polynomial make_shifted_quadratic(double a, double xstar, double fm) {
  if (!(a > 0.0)) throw ConfigError("shifted quadratic requires a > 0");
  Polynomial p({a * xstar * xstar + fm, -2.0 * a * xstar, a});
  p.with_minimum(fm);
  return p;
}

/// f(x) = s e^{lambda x}; a smooth non-polynomial test function.
class Exponential : public DifferentiableFunction {
 public:
  explicit Exponential(double lambda = 1.0, double scale = 1.0) : lambda_(lambda), scale_(scale) {}

  double deriv(unsigned order, double x) const override {
    return scale_ * std::pow(lambda_, static_cast<double>(order)) * std::exp(lambda_ * x);
  }

 private:
  double lambda_;
  double scale_;
};

/// Objective of several variables with per-coordinate derivatives of any order.
class MultivariateFunction {
 public:
  virtual ~MultivariateFunction() = default;

  virtual std::size_t dimension() const = 0;
  virtual double value(std::span<const double> v) const = 0;

  /// d^order f / d v_coord^order with the other coordinates frozen.
  virtual double partial(std::size_t coord, unsigned order, std::span<const double> v) const = 0;

  /// Degree of the coordinate section along coord, when polynomial.
  virtual std::optional<unsigned> section_degree(std::size_t /*coord*/) const {
    return std::nullopt;
  }

  virtual std::optional<double> minimum_value() const { return std::nullopt; }
};

/// f restricted to one coordinate line through a base point.
class CoordinateSection : public DifferentiableFunction {
 public:
  CoordinateSection(const MultivariateFunction& f, std::span<const double> point, std::size_t coord)
      : f_(&f), point_(point.begin(), point.end()), coord_(coord) {
    if (coord >= f.dimension() || point.size() != f.dimension()) {
      throw std::out_of_range("coordinate section outside function dimension");
    }
  }

  double deriv(unsigned order, double t) const override {
    if (order == 0) {
      point_[coord_] = t;
      return f_->value(point_);
    }
    point_[coord_] = t;
    return f_->partial(coord_, order, point_);
  }

  std::optional<unsigned> degree_bound() const override { return f_->section_degree(coord_); }

 private:
  const MultivariateFunction* f_;
  mutable std::vector<double> point_;
  std::size_t coord_;
};

/// A scalar function viewed as a one-dimensional multivariate function.
class ScalarAsMultivariate : public MultivariateFunction {
 public:
  explicit ScalarAsMultivariate(const DifferentiableFunction& f) : f_(&f) {}

  std::size_t dimension() const override { return 1; }
  double value(std::span<const double> v) const override { return f_->value(v[0]); }
  double partial(std::size_t, unsigned order, std::span<const double> v) const override {
    return f_->deriv(order, v[0]);
  }
  std::optional<unsigned> section_degree(std::size_t) const override { return f_->degree_bound(); }
  std::optional<double> minimum_value() const override { return f_->minimum_value(); }

 private:
  const DifferentiableFunction* f_;
};

/// f(v) = sum_j a_j (v_j - x*_j)^2 + f_m. Example 4 is a = (2, 3), x* = (5, 6), f_m = 10.
class SeparableQuadratic : public MultivariateFunction {
 public:
  SeparableQuadratic(std::vector<double> a, std::vector<double> xstar, double fm)
      : a_(std::move(a)), xstar_(std::move(xstar)), fm_(fm) {
    if (a_.empty() || a_.size() != xstar_.size()) {
      throw ConfigError("separable quadratic: a and x* must be nonempty and the same length");
    }
    for (double ai : a_) {
      if (!(ai > 0.0)) throw ConfigError("separable quadratic requires every a_j > 0");
    }
  }

  std::size_t dimension() const override { return a_.size(); }

  double value(std::span<const double> v) const override {
    double s = fm_;
    for (std::size_t j = 0; j < a_.size(); ++j) s += a_[j] * (v[j] - xstar_[j]) * (v[j] - xstar_[j]);
    return s;
  }

  double partial(std::size_t coord, unsigned order, std::span<const double> v) const override {
    switch (order) {
      case 0: return value(v);
      case 1: return 2.0 * a_[coord] * (v[coord] - xstar_[coord]);
      case 2: return 2.0 * a_[coord];
      default: return 0.0;
    }
  }

  std::optional<unsigned> section_degree(std::size_t) const override { return 2U; }
  std::optional<double> minimum_value() const override { return fm_; }

  const std::vector<double>& minimizer() const { return xstar_; }

 private:
  std::vector<double> a_;
  std::vector<double> xstar_;
  double fm_;
};

/// f(x, y) = (1 - x)^2 + 100 (y - x^2)^2, minimum 0 at (1, 1).
class Rosenbrock : public MultivariateFunction {
 public:
  std::size_t dimension() const override { return 2; }

  double value(std::span<const double> v) const override {
    const double x = v[0], y = v[1];
    return (1.0 - x) * (1.0 - x) + 100.0 * (y - x * x) * (y - x * x);
  }

  double partial(std::size_t coord, unsigned order, std::span<const double> v) const override {
    const double x = v[0], y = v[1];
    if (order == 0) return value(v);
    if (coord == 0) {
      // section in x: 100 x^4 + (1 - 200 y) x^2 - 2 x + 1 + 100 y^2
      switch (order) {
        case 1: return -2.0 * (1.0 - x) - 400.0 * x * (y - x * x);
        case 2: return 2.0 - 400.0 * y + 1200.0 * x * x;
        case 3: return 2400.0 * x;
        case 4: return 2400.0;
        default: return 0.0;
      }
    }
    switch (order) {
      case 1: return 200.0 * (y - x * x);
      case 2: return 200.0;
      default: return 0.0;
    }
  }

  std::optional<unsigned> section_degree(std::size_t coord) const override {
    return coord == 0 ? 4U : 2U;
  }
  std::optional<double> minimum_value() const override { return 0.0; }
};

inline Rosenbrock make_rosenbrock() { return {}; }

}  // namespace fgd
