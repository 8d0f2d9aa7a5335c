#pragma once

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <initializer_list>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "fgd/error.hpp"
#include "fgd/lms.hpp"
#include "fgd/optim.hpp"

namespace fgd::io {

using json = nlohmann::ordered_json;

/// Shortest text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
  // from_chars for double is missing from older libstdc++; strtod is exact for round-trip text.
  std::string tmp(s);
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (tmp.empty() || end != tmp.c_str() + tmp.size()) {
    throw ConfigError("not a number: '" + tmp + "'");
  }
  return v;
}

// ---------------------------------------------------------------------------
// Trajectory CSV: k,x_1..x_d,f,alpha_1..alpha_d,step
// The final row has empty alpha and step fields (no step leaves the last iterate).

inline void write_trajectory_csv(std::ostream& os, const Trajectory& t) {
  const std::size_t d = t.dimension();
  os << "k";
  for (std::size_t j = 1; j <= d; ++j) os << ",x_" << j;
  os << ",f";
  for (std::size_t j = 1; j <= d; ++j) os << ",alpha_" << j;
  os << ",step\n";
  for (std::size_t k = 0; k < t.iterates.size(); ++k) {
    os << k;
    for (double x : t.iterates[k]) os << ',' << format_double(x);
    os << ',' << format_double(t.values[k]);
    if (k < t.steps.size()) {
      for (double a : t.orders[k]) os << ',' << format_double(a);
      os << ',' << format_double(t.steps[k]);
    } else {
      for (std::size_t j = 0; j <= d; ++j) os << ',';
    }
    os << '\n';
  }
}

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace detail

/// Parses the output of write_trajectory_csv. Termination is not stored in the file.
inline Trajectory read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("empty trajectory file");
  const auto header = detail::split_csv(line);
  if (header.size() < 4 || header.front() != "k" || header.back() != "step" || (header.size() - 3) % 2 != 0) {
    throw ConfigError("unexpected trajectory header: " + line);
  }
  const std::size_t d = (header.size() - 3) / 2;
  Trajectory t;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = detail::split_csv(line);
    if (f.size() != header.size()) throw ConfigError("ragged trajectory row: " + line);
    std::vector<double> x(d);
    for (std::size_t j = 0; j < d; ++j) x[j] = parse_double(f[1 + j]);
    t.iterates.push_back(std::move(x));
    t.values.push_back(parse_double(f[1 + d]));
    if (!f.back().empty()) {
      std::vector<double> a(d);
      for (std::size_t j = 0; j < d; ++j) a[j] = parse_double(f[2 + d + j]);
      t.orders.push_back(std::move(a));
      t.steps.push_back(parse_double(f.back()));
    }
  }
  if (t.iterates.empty() || t.steps.size() + 1 != t.iterates.size()) {
    throw ConfigError("trajectory file has inconsistent step rows");
  }
  return t;
}

/// Tap trajectory CSV: k,w_1..w_n,e,alpha_1..alpha_n; row 0 holds the initial weights.
inline void write_tap_csv(std::ostream& os, const lms::TapTrajectory& t) {
  const std::size_t n = t.initial.size();
  os << "k";
  for (std::size_t i = 1; i <= n; ++i) os << ",w_" << i;
  os << ",e";
  for (std::size_t i = 1; i <= n; ++i) os << ",alpha_" << i;
  os << '\n';
  os << 0;
  for (double w : t.initial) os << ',' << format_double(w);
  for (std::size_t i = 0; i <= n; ++i) os << ',';
  os << '\n';
  for (std::size_t k = 0; k < t.weights.size(); ++k) {
    os << k + 1;
    for (double w : t.weights[k]) os << ',' << format_double(w);
    os << ',' << format_double(t.errors[k]);
    for (double a : t.orders[k]) os << ',' << format_double(a);
    os << '\n';
  }
}

// ---------------------------------------------------------------------------
// OptimizerConfig <-> JSON

inline json config_to_json(const OptimizerConfig& c) {
  json j;
  j["algorithm"] = name(c.algorithm);
  j["mu"] = c.mu;
  j["alpha"] = c.alpha;
  j["order_law"] = name(c.order_law);
  j["beta"] = c.beta;
  j["loss"] = name(c.loss);
  j["coupling"] = name(c.coupling);
  j["gamma"] = c.gamma;
  j["K"] = c.memory_steps;
  if (c.warmup_mu) j["warmup_mu"] = *c.warmup_mu;
  j["c"] = c.c;
  j["epsilon"] = c.epsilon;
  j["memory_style"] = name(c.memory_style);
  j["definition"] = name(c.definition);
  j["max_terms"] = c.truncation.max_terms;
  j["term_tol"] = c.truncation.term_tol;
  j["exact_if_polynomial"] = c.truncation.exact_if_polynomial;
  j["max_iters"] = c.max_iters;
  j["stop_tol"] = c.stop_tol;
  return j;
}

namespace detail {

template <class T>
T get_as(const json& v, std::string_view key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + std::string(key) + "' has the wrong type");
  }
}

}  // namespace detail

/// Overwrites the fields named in j. Keys listed in ignore are skipped; any other
/// unknown key is an error.
inline void apply_config(OptimizerConfig& c, const json& j, std::initializer_list<std::string_view> ignore = {}) {
  if (!j.is_object()) throw ConfigError("optimizer config must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (std::find(ignore.begin(), ignore.end(), key) != ignore.end()) continue;
    using detail::get_as;
    if (key == "algorithm") c.algorithm = parse_enum<Algorithm>(get_as<std::string>(v, key));
    else if (key == "mu") c.mu = v.is_array() ? get_as<std::vector<double>>(v, key) : std::vector<double>{get_as<double>(v, key)};
    else if (key == "alpha") c.alpha = get_as<double>(v, key);
    else if (key == "order_law") c.order_law = parse_enum<OrderLaw>(get_as<std::string>(v, key));
    else if (key == "beta") c.beta = get_as<double>(v, key);
    else if (key == "loss") c.loss = parse_enum<LossKind>(get_as<std::string>(v, key));
    else if (key == "coupling") c.coupling = parse_enum<Coupling>(get_as<std::string>(v, key));
    else if (key == "gamma") c.gamma = get_as<double>(v, key);
    else if (key == "K") c.memory_steps = get_as<int>(v, key);
    else if (key == "warmup_mu") c.warmup_mu = get_as<double>(v, key);
    else if (key == "c") c.c = get_as<double>(v, key);
    else if (key == "epsilon") c.epsilon = get_as<double>(v, key);
    else if (key == "memory_style") c.memory_style = parse_enum<MemoryStyle>(get_as<std::string>(v, key));
    else if (key == "definition") c.definition = parse_enum<Definition>(get_as<std::string>(v, key));
    else if (key == "max_terms") c.truncation.max_terms = get_as<int>(v, key);
    else if (key == "term_tol") c.truncation.term_tol = get_as<double>(v, key);
    else if (key == "exact_if_polynomial") c.truncation.exact_if_polynomial = get_as<bool>(v, key);
    else if (key == "max_iters") c.max_iters = get_as<int>(v, key);
    else if (key == "stop_tol") c.stop_tol = get_as<double>(v, key);
    else throw ConfigError("unknown config key '" + key + "'");
  }
}

inline OptimizerConfig config_from_json(const json& j) {
  OptimizerConfig c;
  apply_config(c, j);
  return c;
}

}  // namespace fgd::io
