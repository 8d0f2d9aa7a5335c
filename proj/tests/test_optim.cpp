#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "fgd/optim.hpp"

namespace {

using namespace fgd;

const auto kQuad = make_shifted_quadratic(1.0, 5.0, 0.0);

OptimizerConfig base(Algorithm a, double mu, double alpha = 0.7) {
  OptimizerConfig c;
  c.algorithm = a;
  c.mu = {mu};
  c.alpha = alpha;
  return c;
}

double dist(const std::vector<double>& x, double t) { return std::abs(x[0] - t); }

void expect_consistent(const Trajectory& t) {
  ASSERT_FALSE(t.iterates.empty());
  EXPECT_EQ(t.values.size(), t.iterates.size());
  EXPECT_EQ(t.steps.size() + 1, t.iterates.size());
  EXPECT_EQ(t.orders.size(), t.steps.size());
  for (std::size_t k = 0; k < t.steps.size(); ++k) {
    double step = 0.0;
    for (std::size_t j = 0; j < t.dimension(); ++j) {
      step = std::max(step, std::abs(t.iterates[k + 1][j] - t.iterates[k][j]));
    }
    EXPECT_DOUBLE_EQ(t.steps[k], step);
    EXPECT_EQ(t.orders[k].size(), t.dimension());
  }
}

TEST(StepClassical, Examples) {
  EXPECT_DOUBLE_EQ(step_classical(kQuad, 1.0, base(Algorithm::Classical, 0.5)), 5.0);
  EXPECT_DOUBLE_EQ(step_classical(kQuad, 5.0, base(Algorithm::Classical, 0.5)), 5.0);
  EXPECT_DOUBLE_EQ(step_classical(kQuad, 1.0, base(Algorithm::Classical, 0.1)), 1.8);
}

TEST(StepNaiveFractional, Examples) {
  auto cfg = base(Algorithm::NaiveFractional, 0.5);
  EXPECT_NEAR(step_naive_fractional(kQuad, 1.0, cfg), 5.714102920777046, 1e-10);
  cfg.definition = Definition::RiemannLiouville;
  EXPECT_NEAR(step_naive_fractional(kQuad, 1.0, cfg), 1.5356935137246643, 1e-10);
  cfg.alpha = 1.0;
  EXPECT_NEAR(step_naive_fractional(kQuad, 1.0, cfg), 5.0, 1e-12);
}

TEST(NaiveFractional, ConvergesToFractionalExtremePoints) {
  auto cfg = base(Algorithm::NaiveFractional, 0.5);
  cfg.max_iters = 50;
  const auto cap = run_naive_fractional(kQuad, 1.0, cfg);
  EXPECT_NEAR(cap.final_iterate()[0], 6.5, 1e-3);
  cfg.definition = Definition::RiemannLiouville;
  const auto rl = run_naive_fractional(kQuad, 1.0, cfg);
  const double x = rl.final_iterate()[0];
  EXPECT_TRUE(std::abs(x - 5.634848003542364) < 1e-3 || std::abs(x - 0.8651519964576359) < 1e-3) << x;
  expect_consistent(cap);
  expect_consistent(rl);
}

TEST(SeedWarmup, Examples) {
  auto cfg = base(Algorithm::FixedMemory, 0.5);
  EXPECT_EQ(seed_warmup(kQuad, 1.0, 1, cfg), std::vector<double>{1.0});
  EXPECT_EQ(seed_warmup(kQuad, 1.0, 3, cfg), (std::vector<double>{1.0, 5.0, 5.0}));
  cfg.warmup_mu = 0.0;
  EXPECT_EQ(seed_warmup(kQuad, 2.5, 2, cfg), (std::vector<double>{2.5, 2.5}));
  EXPECT_THROW(seed_warmup(kQuad, 1.0, 0, cfg), ConfigError);
}

TEST(FixedMemory, OneStepMemoryConvergesWithinTwentySteps) {
  auto cfg = base(Algorithm::FixedMemory, 0.5);
  cfg.memory_style = MemoryStyle::Abs;
  cfg.memory_steps = 1;
  cfg.max_iters = 20;
  const auto t = run(kQuad, 1.0, cfg);
  EXPECT_EQ(t.termination, Termination::MaxIters);
  EXPECT_LE(dist(t.final_iterate(), 5.0), 0.01);
  expect_consistent(t);
}

TEST(FixedMemory, SignedStyleReportsDomainErrorOnOvershoot) {
  auto cfg = base(Algorithm::FixedMemory, 0.5);
  cfg.memory_steps = 1;
  cfg.max_iters = 20;
  const auto t = run(kQuad, 1.0, cfg);
  EXPECT_EQ(t.termination, Termination::DomainError);
  EXPECT_FALSE(t.warnings.empty());
  expect_consistent(t);
}

TEST(FixedMemory, CollapsedWindowHalts) {
  auto cfg = base(Algorithm::FixedMemory, 0.5);
  cfg.memory_style = MemoryStyle::Abs;
  cfg.memory_steps = 2;
  cfg.max_iters = 3;
  // the first window reaches back to c
  cfg.c = 3.0;
  const std::vector<double> seeds{3.0, 3.0};
  const auto t = run_fixed_memory(kQuad, seeds, cfg);
  EXPECT_EQ(t.iterates[2][0], 3.0);
  cfg.memory_style = MemoryStyle::AbsEps;
  cfg.epsilon = 0.1;
  const auto e = run_fixed_memory(kQuad, seeds, cfg);
  EXPECT_GT(e.iterates[2][0], 3.0);
  EXPECT_TRUE(std::isfinite(e.iterates[2][0]));
}

TEST(FixedMemory, NeedsExactlyKSeeds) {
  auto cfg = base(Algorithm::FixedMemory, 0.5);
  cfg.memory_steps = 3;
  const std::vector<double> seeds{1.0, 2.0};
  EXPECT_THROW(run_fixed_memory(kQuad, seeds, cfg), ConfigError);
}

TEST(Truncated, FirstStep) {
  auto cfg = base(Algorithm::Truncated, 0.2);
  cfg.max_iters = 1;
  EXPECT_NEAR(run_truncated(kQuad, 1.0, cfg).iterates[1][0], 2.782788013675683, 1e-12);
}

TEST(Truncated, MonotoneDescentBelowBound) {
  auto cfg = base(Algorithm::Truncated, 0.0);
  cfg.alpha = 0.7;
  // f' is 2-Lipschitz and |x - c| stays below 6 from x0 = 1.
  cfg.mu = {0.9 * mu_bound_truncated(2.0, 6.0, 0.7)};
  cfg.max_iters = 200;
  const auto t = run_truncated(kQuad, 1.0, cfg);
  for (std::size_t k = 0; k + 1 < t.values.size(); ++k) EXPECT_LE(t.values[k + 1], t.values[k]) << k;
}

TEST(MuBound, Examples) {
  EXPECT_NEAR(mu_bound_truncated(2.0, 6.0, 1.0), 1.0, 1e-15);
  EXPECT_NEAR(mu_bound_truncated(2.0, 6.0, 0.7), 0.5242940173136156, 1e-12);
  EXPECT_NEAR(mu_bound_truncated(2.0, 1.0, 0.4), std::tgamma(1.6), 1e-14);
  EXPECT_THROW(mu_bound_truncated(0.0, 1.0, 0.5), DomainError);
}

TEST(OrderLaw, Examples) {
  for (auto law : {OrderLaw::Reciprocal, OrderLaw::Sigmoid, OrderLaw::Tanh}) EXPECT_EQ(order_law(0.0, law, 0.1), 1.0);
  EXPECT_DOUBLE_EQ(order_law(10.0, OrderLaw::Reciprocal, 0.1), 0.5);
  EXPECT_NEAR(order_law(10.0, OrderLaw::Tanh, 0.1), 0.2384058440442351, 1e-15);
  EXPECT_THROW(order_law(-1.0, OrderLaw::Tanh, 0.1), DomainError);
}

TEST(OrderLaw, RangeIsHalfOpenUnitInterval) {
  for (auto law : {OrderLaw::Reciprocal, OrderLaw::Sigmoid, OrderLaw::Tanh}) {
    for (double J : {1e-6, 0.3, 5.0, 100.0, 1e4, 1e12}) {
      const double a = order_law(J, law, 0.1);
      EXPECT_GT(a, 0.0);
      EXPECT_LE(a, 1.0);
    }
  }
}

TEST(LossForOrder, Examples) {
  EXPECT_DOUBLE_EQ(loss_for_order(kQuad, 1.0, LossKind::ObjectiveValue), 16.0);
  EXPECT_DOUBLE_EQ(loss_for_order(kQuad, 1.0, LossKind::GradSquared), 64.0);
  EXPECT_TRUE(loss_kind_warning(10.0, LossKind::ObjectiveValue).has_value());
  EXPECT_FALSE(loss_kind_warning(10.0, LossKind::GradSquared).has_value());
  EXPECT_FALSE(loss_kind_warning(0.0, LossKind::ObjectiveValue).has_value());
}

TEST(VariableOrder, LawsConvergeAndStayInRange) {
  auto cfg = base(Algorithm::VariableOrder, 0.2);
  cfg.loss = LossKind::ObjectiveValue;
  cfg.max_iters = 200;
  const std::pair<OrderLaw, double> laws[] = {
      {OrderLaw::Reciprocal, 0.03}, {OrderLaw::Sigmoid, 0.10}, {OrderLaw::Tanh, 0.10}};
  for (auto [law, beta] : laws) {
    cfg.order_law = law;
    cfg.beta = beta;
    const auto t = run_variable_order(kQuad, 1.0, cfg);
    EXPECT_LE(dist(t.final_iterate(), 5.0), 1e-2) << name(law);
    for (const auto& o : t.orders) {
      EXPECT_GT(o[0], 0.0);
      EXPECT_LE(o[0], 1.0);
    }
    expect_consistent(t);
  }
}

TEST(VariableOrder, WarnsOnNonzeroMinimumWithObjectiveLoss) {
  auto cfg = base(Algorithm::VariableOrder, 0.05);
  cfg.loss = LossKind::ObjectiveValue;
  cfg.max_iters = 2;
  const auto f = make_shifted_quadratic(2.0, 5.0, 10.0);
  EXPECT_FALSE(run_variable_order(f, 1.0, cfg).warnings.empty());
}

TEST(VariableOrder, TinyBetaMatchesClassical) {
  auto cfg = base(Algorithm::VariableOrder, 0.1);
  cfg.beta = 1e-14;
  cfg.max_iters = 40;
  const auto v = run_variable_order(kQuad, 1.0, cfg);
  const auto c = run_classical(kQuad, 1.0, cfg);
  for (std::size_t k = 0; k < c.iterates.size(); ++k) EXPECT_NEAR(v.iterates[k][0], c.iterates[k][0], 1e-8);
}

TEST(OrderOne, EveryAlgorithmMatchesClassical) {
  const auto f = make_polynomial({3, -1, 0.5, 0.02});
  auto ref = base(Algorithm::Classical, 0.1, 1.0);
  ref.max_iters = 30;
  const auto c = run(f, 2.0, ref);
  for (auto a : {Algorithm::NaiveFractional, Algorithm::FixedMemory, Algorithm::Truncated}) {
    auto cfg = base(a, 0.1, 1.0);
    cfg.max_iters = 30;
    cfg.memory_steps = 3;
    cfg.memory_style = MemoryStyle::Abs;
    cfg.c = 0.0;
    const auto t = run(f, 2.0, cfg);
    ASSERT_EQ(t.iterates.size(), c.iterates.size());
    for (std::size_t k = 0; k < c.iterates.size(); ++k) {
      EXPECT_NEAR(t.iterates[k][0], c.iterates[k][0], 1e-10) << name(a) << " k=" << k;
    }
  }
}

TEST(FixedPointPreservation, StartAtMinimizer) {
  const std::pair<Algorithm, MemoryStyle> cases[] = {
      {Algorithm::FixedMemory, MemoryStyle::Abs},     {Algorithm::Truncated, MemoryStyle::Abs},
      {Algorithm::Truncated, MemoryStyle::AbsEps},    {Algorithm::VariableOrder, MemoryStyle::Abs},
      {Algorithm::VariableOrder, MemoryStyle::AbsEps}};
  for (auto [a, style] : cases) {
    auto cfg = base(a, 0.3);
    cfg.memory_steps = 2;
    cfg.memory_style = style;
    cfg.epsilon = 0.05;
    cfg.c = 5.0;
    cfg.max_iters = 5;
    const auto t = run(kQuad, 5.0, cfg);
    for (const auto& x : t.iterates) EXPECT_EQ(x[0], 5.0) << name(a) << ' ' << name(style);
  }
}

TEST(FixedPointPreservation, FixedMemoryWithEpsilonLeavesMinimizer) {
  // Every term uses the base |x_k - x_{k-K}| + eps, so f'' eps^(2-alpha) survives at x*.
  auto cfg = base(Algorithm::FixedMemory, 0.3);
  cfg.memory_steps = 2;
  cfg.memory_style = MemoryStyle::AbsEps;
  cfg.epsilon = 0.05;
  cfg.c = 5.0;
  cfg.max_iters = 3;
  const double want = 5.0 - 0.3 * gen_binomial(-0.3, 1) * 2.0 * std::pow(0.05, 1.3) / std::tgamma(2.3);
  const auto t = run(kQuad, 5.0, cfg);
  ASSERT_GE(t.iterates.size(), 3U);
  EXPECT_EQ(t.iterates[1][0], 5.0);
  EXPECT_NEAR(t.iterates[2][0], want, 1e-15);
}

TEST(Divergence, LargeStepDiverges) {
  auto cfg = base(Algorithm::Classical, 1.5);
  cfg.max_iters = 500;
  const auto t = run_classical(kQuad, 1.0, cfg);
  EXPECT_EQ(t.termination, Termination::Diverged);
  EXPECT_LT(t.num_steps(), 500U);
  expect_consistent(t);
}

TEST(StopTol, ConvergedWhenStepSmall) {
  auto cfg = base(Algorithm::Classical, 0.1);
  cfg.stop_tol = 1e-9;
  cfg.max_iters = 10000;
  const auto t = run_classical(kQuad, 1.0, cfg);
  EXPECT_EQ(t.termination, Termination::Converged);
  EXPECT_LE(t.steps.back(), 1e-9);
}

TEST(Multivariate, Example4AllAlgorithmsReachMinimizer) {
  const SeparableQuadratic f({2.0, 3.0}, {5.0, 6.0}, 10.0);
  for (auto a : {Algorithm::FixedMemory, Algorithm::Truncated, Algorithm::VariableOrder}) {
    auto cfg = base(a, 0.05);
    cfg.memory_steps = 3;
    cfg.memory_style = MemoryStyle::Abs;
    cfg.beta = 0.005;
    cfg.max_iters = 300;
    const auto t = run_multivariate(f, {1.0, 1.0}, cfg);
    EXPECT_NEAR(t.final_iterate()[0], 5.0, 0.05) << name(a);
    EXPECT_NEAR(t.final_iterate()[1], 6.0, 0.05) << name(a);
    expect_consistent(t);
  }
}

TEST(Multivariate, PerCoordinateOrdersFollowGradSquared) {
  const SeparableQuadratic f({2.0, 3.0}, {5.0, 6.0}, 10.0);
  auto cfg = base(Algorithm::VariableOrder, 0.05);
  cfg.beta = 0.005;
  cfg.max_iters = 1;
  const auto t = run_multivariate(f, {1.0, 1.0}, cfg);
  EXPECT_NEAR(t.orders[0][0], 1.0 - std::tanh(0.005 * 256.0), 1e-15);
  EXPECT_NEAR(t.orders[0][1], 1.0 - std::tanh(0.005 * 900.0), 1e-15);
  cfg.coupling = Coupling::Uniform;
  const auto u = run_multivariate(f, {1.0, 1.0}, cfg);
  EXPECT_EQ(u.orders[0][0], u.orders[0][1]);
  EXPECT_NEAR(u.orders[0][0], 1.0 - std::tanh(0.005 * 1156.0), 1e-15);
}

TEST(Multivariate, UniformCouplingKeepsSymmetry) {
  const SeparableQuadratic f({2.0, 2.0}, {3.0, 3.0}, 0.0);
  auto cfg = base(Algorithm::VariableOrder, 0.05);
  cfg.coupling = Coupling::Uniform;
  cfg.beta = 0.01;
  cfg.max_iters = 100;
  const auto t = run_multivariate(f, {0.5, 0.5}, cfg);
  for (const auto& x : t.iterates) EXPECT_EQ(x[0], x[1]);
}

TEST(Multivariate, JacobiUpdateUsesPreviousIterate) {
  // f = (x - y)^2 has coupled partials; one Jacobi step from (0, 1) with mu = 0.25 gives (0.5, 0.5).
  class Coupled : public MultivariateFunction {
   public:
    std::size_t dimension() const override { return 2; }
    double value(std::span<const double> v) const override { return (v[0] - v[1]) * (v[0] - v[1]); }
    double partial(std::size_t j, unsigned order, std::span<const double> v) const override {
      const double s = j == 0 ? 1.0 : -1.0;
      if (order == 0) return value(v);
      if (order == 1) return 2.0 * s * (v[0] - v[1]);
      return order == 2 ? 2.0 : 0.0;
    }
  } f;
  auto cfg = base(Algorithm::Classical, 0.25);
  cfg.max_iters = 1;
  const auto t = run_multivariate(f, {0.0, 1.0}, cfg);
  EXPECT_DOUBLE_EQ(t.iterates[1][0], 0.5);
  EXPECT_DOUBLE_EQ(t.iterates[1][1], 0.5);
}

TEST(Config, Validation) {
  auto cfg = base(Algorithm::FixedMemory, 0.1, 0.4);
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.memory_style = MemoryStyle::Abs;
  EXPECT_NO_THROW(cfg.validate());
  cfg.memory_steps = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  EXPECT_THROW(base(Algorithm::Truncated, 0.1, 2.0).validate(), ConfigError);
  EXPECT_THROW(base(Algorithm::Classical, 0.0).validate(), ConfigError);
  auto vo = base(Algorithm::VariableOrder, 0.1);
  vo.beta = 0.0;
  EXPECT_THROW(vo.validate(), ConfigError);
  auto two = base(Algorithm::Classical, 0.1);
  two.mu = {0.1, 0.2, 0.3};
  EXPECT_THROW(two.validate(2), ConfigError);
}

TEST(Names, RoundTrip) {
  for (auto a : {Algorithm::Classical, Algorithm::NaiveFractional, Algorithm::FixedMemory, Algorithm::Truncated,
                 Algorithm::VariableOrder}) {
    EXPECT_EQ(parse_enum<Algorithm>(name(a)), a);
  }
  EXPECT_THROW(parse_enum<OrderLaw>("cosine"), ConfigError);
}

TEST(BandEntry, FirstIndexOfFinalStay) {
  Trajectory t;
  for (double x : {0.0, 4.99, 6.0, 5.01, 4.995, 5.0}) t.iterates.push_back({x});
  const std::vector<double> target{5.0};
  EXPECT_EQ(band_entry(t, target, 0.02), 3U);
  t.iterates.push_back({7.0});
  EXPECT_FALSE(band_entry(t, target, 0.02).has_value());
}

}  // namespace
