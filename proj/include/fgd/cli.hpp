#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fgd/checks.hpp"
#include "fgd/error.hpp"
#include "fgd/experiments.hpp"
#include "fgd/fraccalc.hpp"
#include "fgd/functions.hpp"

namespace fgd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 1;
inline constexpr int kExitFatal = 2;

namespace detail {

inline std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline experiments::ExperimentSpec resolve(const std::string& target) {
  if (auto spec = experiments::find_builtin(target)) return *spec;
  if (std::filesystem::exists(target)) return experiments::load_spec(target);
  throw ConfigError("'" + target + "' is neither a built-in experiment nor a config file");
}

inline void print_report(std::ostream& out, const experiments::RunReport& r) {
  for (const auto& s : r.runs) {
    out << r.id << '/' << s.label << ": ";
    if (!s.error.empty()) {
      out << "error: " << s.error << '\n';
      continue;
    }
    out << name(s.termination) << " after " << s.iterations << " steps, final [";
    for (std::size_t j = 0; j < s.final_point.size(); ++j) out << (j ? ", " : "") << fmt6(s.final_point[j]);
    out << "]";
    if (s.band_entry) out << ", band entry " << *s.band_entry;
    out << '\n';
  }
}

}  // namespace detail

/// Entry point of the fgd tool. Returns 0 on success, 1 when some runs failed, 2 on fatal errors.
inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Fractional-order gradient descent experiments"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "List built-in experiments");

  std::string run_target;
  std::string out_dir = "results";
  std::optional<std::uint64_t> seed;
  std::string format = "csv";
  auto* run = app.add_subcommand("run", "Run a built-in experiment or a JSON config");
  run->add_option("target", run_target, "Experiment id or config path")->required();
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--seed", seed, "Signal seed for filter experiments");
  run->add_option("--format", format, "Trajectory format")->check(CLI::IsMember({"csv"}));

  std::string def = "caputo";
  double alpha = 0.5;
  double c = 0.0;
  double at = 1.0;
  std::vector<double> poly{25.0, -10.0, 1.0};
  std::string path = "series_x";
  auto* deriv = app.add_subcommand("deriv", "Fractional derivative of a polynomial");
  deriv->add_option("--def", def)->check(CLI::IsMember({"caputo", "rl"}));
  deriv->add_option("--alpha", alpha)->required();
  deriv->add_option("--c", c);
  deriv->add_option("--at", at)->required();
  deriv->add_option("--poly", poly, "Ascending coefficients, default (x-5)^2");
  deriv->add_option("--path", path)->check(CLI::IsMember({"series_x", "series_c", "quadrature"}));

  std::string check_target;
  double check_tol = 1e-5;
  auto* check = app.add_subcommand("check", "Run the oracle-agreement suite, or validate an experiment");
  check->add_option("target", check_target, "Experiment id or config path to validate instead");
  check->add_option("--tol", check_tol, "Largest accepted relative disagreement");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitFatal;
  }

  try {
    if (*list) {
      for (const auto& e : experiments::builtin_experiments()) out << e.id << "  " << e.description << '\n';
      return kExitOk;
    }
    if (*check && check_target.empty()) {
      std::size_t bad = 0;
      const auto rows = checks::oracle_agreement();
      for (const auto& r : rows) {
        const bool ok = r.max_rel_error <= check_tol;
        bad += ok ? 0 : 1;
        out << (ok ? "ok   " : "FAIL ") << name(r.definition) << " alpha=" << detail::fmt6(r.alpha)
            << " x=" << detail::fmt6(r.x) << " value=" << detail::fmt6(r.closed_form)
            << " max_rel_err=" << detail::fmt6(r.max_rel_error) << '\n';
      }
      out << rows.size() - bad << '/' << rows.size() << " points agree\n";
      return bad == 0 ? kExitOk : kExitPartial;
    }
    if (*check) {
      const auto spec = detail::resolve(check_target);
      spec.validate();
      for (const auto& g : spec.grid) {
        g.config.validate(spec.lms ? spec.lms->true_weights.size() : experiments::instantiate(spec.function)->dimension());
      }
      out << spec.id << ": ok (" << spec.grid.size() << " runs)\n";
      return kExitOk;
    }
    if (*run) {
      const auto spec = detail::resolve(run_target);
      experiments::RunOptions opts;
      opts.out_dir = std::filesystem::path(out_dir);
      opts.seed = seed;
      const auto result = experiments::run_experiment(spec, opts);
      detail::print_report(out, result.report);
      return result.report.failures() == 0 ? kExitOk : kExitPartial;
    }
    if (*deriv) {
      const auto f = make_polynomial(poly);
      const FracDerivParams p{alpha, c, parse_enum<Definition>(def), {}};
      double v = 0.0;
      if (path == "series_x") v = series_at_x(f, at, p).value;
      else if (path == "series_c") v = series_at_c(f, at, p).value;
      else v = quadrature_oracle(f, at, p);
      out << detail::fmt6(v) << '\n';
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitFatal;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFatal;
  }
  return kExitFatal;
}

}  // namespace fgd::cli
