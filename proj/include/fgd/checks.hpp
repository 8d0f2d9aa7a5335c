#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fgd/fraccalc.hpp"
#include "fgd/functions.hpp"

namespace fgd::checks {

/// One evaluation point of the oracle-agreement suite.
struct AgreementRow {
  Definition definition = Definition::Caputo;
  double x = 0.0;
  double alpha = 0.0;
  double series_x = 0.0;
  double series_c = 0.0;
  double closed_form = 0.0;
  double quadrature = 0.0;
  /// Largest pairwise |a - b| / max(1, |a|, |b|) over the four values.
  double max_rel_error = 0.0;
};

struct AgreementGrid {
  std::vector<double> xs{0.5, 1.0, 2.0, 5.5, 8.0};
  std::vector<double> alphas{0.3, 0.5, 0.7, 0.9};
  double c = 0.0;
  std::vector<Definition> definitions{Definition::Caputo, Definition::RiemannLiouville};
};

/// Evaluates f = (x - 5)^2 by the two series, the closed form and adaptive quadrature.
///
/// The denominator is floored at 1 because the Caputo derivative has a root inside the
/// grid (x = 5.5, alpha = 0.9), where a pure relative error is undefined.
inline std::vector<AgreementRow> oracle_agreement(const AgreementGrid& grid = {}) {
  const auto f = make_shifted_quadratic(1.0, 5.0, 0.0);
  std::vector<AgreementRow> rows;
  for (Definition def : grid.definitions) {
    for (double alpha : grid.alphas) {
      for (double x : grid.xs) {
        const FracDerivParams p{alpha, grid.c, def, {}};
        AgreementRow r{def, x, alpha};
        r.series_x = series_at_x(f, x, p).value;
        r.series_c = series_at_c(f, x, p).value;
        r.closed_form = quadratic_closed_form(1.0, 5.0, 0.0, x, p);
        r.quadrature = quadrature_oracle(f, x, p);
        const double v[4] = {r.series_x, r.series_c, r.closed_form, r.quadrature};
        for (int i = 0; i < 4; ++i) {
          for (int j = i + 1; j < 4; ++j) {
            const double scale = std::max({1.0, std::abs(v[i]), std::abs(v[j])});
            r.max_rel_error = std::max(r.max_rel_error, std::abs(v[i] - v[j]) / scale);
          }
        }
        rows.push_back(r);
      }
    }
  }
  return rows;
}

}  // namespace fgd::checks
