#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fwdtd/approximator.hpp"
#include "fwdtd/error.hpp"
#include "fwdtd/random.hpp"

namespace {

using fwdtd::ActionValueFunction;
using fwdtd::Activation;
using fwdtd::ValueFunction;

// Independent forward pass over the documented weight layout.
double reference_mlp(const std::vector<double>& w, std::size_t d, std::size_t h,
                     const std::vector<double>& x, bool use_tanh) {
  const double* w1 = w.data();
  const double* b1 = w1 + h * d;
  const double* w2 = b1 + h;
  const double b2 = w2[h];
  double out = b2;
  for (std::size_t j = 0; j < h; ++j) {
    double z = b1[j];
    for (std::size_t i = 0; i < d; ++i) z += w1[j * d + i] * x[i];
    out += w2[j] * (use_tanh ? std::tanh(z) : z);
  }
  return out;
}

TEST(Approximator, TabularZeroWeightsEvaluateToZero) {
  const auto vf = ValueFunction::tabular(4);
  for (std::size_t k = 0; k < 4; ++k) {
    std::vector<double> s(4, 0.0);
    s[k] = 1.0;
    EXPECT_EQ(vf.evaluate(s), 0.0);
  }
}

TEST(Approximator, LinearDotProduct) {
  auto vf = ValueFunction::linear(2);
  const double w[] = {2.0, -1.0};
  vf.set_weights(w);
  const std::vector<double> s{1.0, 3.0};
  EXPECT_DOUBLE_EQ(vf.evaluate(s), -1.0);
  EXPECT_EQ(vf.gradient(s), s);
}

TEST(Approximator, MlpMatchesReferenceForwardPass) {
  auto vf = ValueFunction::mlp(2, 50);
  auto rng = fwdtd::make_rng(11, 1);
  vf.initialize_uniform(0.1, rng);
  const std::vector<double> w(vf.weights().begin(), vf.weights().end());
  ASSERT_EQ(w.size(), 2u * 50 + 50 + 50 + 1);
  const std::vector<double> s{0.5, -0.5};
  EXPECT_NEAR(vf.evaluate(s), reference_mlp(w, 2, 50, s, true), 1e-12);

  vf.initialize_uniform(1.5, rng);
  const std::vector<double> w2(vf.weights().begin(), vf.weights().end());
  const std::vector<double> s2{-0.3, 0.9};
  EXPECT_NEAR(vf.evaluate(s2), reference_mlp(w2, 2, 50, s2, true), 1e-12);
}

TEST(Approximator, InitializationStaysInRange) {
  auto vf = ValueFunction::mlp(4, 50);
  auto rng = fwdtd::make_rng(3, 1);
  vf.initialize_uniform(0.1, rng);
  for (double x : vf.weights()) {
    EXPECT_LE(std::abs(x), 0.1);
  }
  vf.initialize_uniform(0.0, rng);
  for (double x : vf.weights()) EXPECT_EQ(x, 0.0);
}

TEST(Approximator, TabularGradientIsOneHot) {
  const auto vf = ValueFunction::tabular(5);
  std::vector<double> s(5, 0.0);
  s[3] = 1.0;
  EXPECT_EQ(vf.gradient(s), s);
}

TEST(Approximator, TabularRejectsNonOneHotFeatures) {
  const auto vf = ValueFunction::tabular(3);
  EXPECT_THROW(vf.evaluate(std::vector<double>{0.5, 0.5, 0.0}), fwdtd::DimensionError);
  EXPECT_THROW(vf.evaluate(std::vector<double>{0.0, 0.0, 0.0}), fwdtd::DimensionError);
}

TEST(Approximator, DimensionMismatchThrows) {
  const auto lin = ValueFunction::linear(3);
  EXPECT_THROW(lin.evaluate(std::vector<double>{1.0, 2.0}), fwdtd::DimensionError);
  EXPECT_THROW(lin.gradient(std::vector<double>{1.0}), fwdtd::DimensionError);
  const auto mlp = ValueFunction::mlp(2, 4);
  EXPECT_THROW(mlp.evaluate(std::vector<double>{1.0, 2.0, 3.0}), fwdtd::DimensionError);
}

TEST(Approximator, FiniteDifferenceOfLinearAndTabularIsExact) {
  auto lin = ValueFunction::linear(2);
  const double w[] = {0.3, -0.7};
  lin.set_weights(w);
  const auto fd = fwdtd::finite_difference_gradient(lin, std::vector<double>{1.0, 3.0}, 1e-6);
  EXPECT_NEAR(fd[0], 1.0, 1e-8);
  EXPECT_NEAR(fd[1], 3.0, 1e-8);

  const auto tab = ValueFunction::tabular(3);
  const auto fdt = fwdtd::finite_difference_gradient(tab, std::vector<double>{0.0, 1.0, 0.0}, 1e-6);
  EXPECT_NEAR(fdt[0], 0.0, 1e-8);
  EXPECT_NEAR(fdt[1], 1.0, 1e-8);
  EXPECT_NEAR(fdt[2], 0.0, 1e-8);
}

TEST(Approximator, MlpGradientMatchesFiniteDifferences) {
  auto rng = fwdtd::make_rng(5, 1);
  for (Activation act : {Activation::tanh, Activation::identity}) {
    auto vf = ValueFunction::mlp(2, 50, act);
    for (int trial = 0; trial < 100; ++trial) {
      vf.initialize_uniform(1.0, rng);
      const std::vector<double> s{0.2, 0.8};
      const auto g = vf.gradient(s);
      const auto fd = fwdtd::finite_difference_gradient(vf, s, 1e-6);
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double scale = std::max({std::abs(g[i]), std::abs(fd[i]), 1e-3});
        ASSERT_LT(std::abs(g[i] - fd[i]) / scale, 1e-5) << "weight " << i;
      }
    }
  }
}

TEST(Approximator, IdentityMlpWithPassThroughReproducesLinear) {
  constexpr std::size_t d = 3;
  auto mlp = ValueFunction::mlp(d, d, Activation::identity);
  auto lin = ValueFunction::linear(d);
  const std::vector<double> theta{0.4, -1.3, 2.2};
  lin.set_weights(theta);
  std::vector<double> w(mlp.num_weights(), 0.0);
  for (std::size_t j = 0; j < d; ++j) w[j * d + j] = 1.0;  // W1 = I, b1 = 0
  for (std::size_t j = 0; j < d; ++j) w[d * d + d + j] = theta[j];
  mlp.set_weights(w);
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    const std::vector<double> s{u(gen), u(gen), u(gen)};
    EXPECT_NEAR(mlp.evaluate(s), lin.evaluate(s), 1e-12);
  }
}

TEST(Approximator, TdUpdateScalarCase) {
  auto vf = ValueFunction::tabular(2);
  const double w[] = {0.4, 0.0};
  vf.set_weights(w);
  const std::vector<double> s{1.0, 0.0};
  const auto result = vf.apply_td_update(s, 1.0, 0.5);
  EXPECT_DOUBLE_EQ(vf.evaluate(s), 0.7);
  EXPECT_DOUBLE_EQ(result.td_error, 0.6);
  EXPECT_FALSE(result.diverged);
}

TEST(Approximator, ZeroTdErrorLeavesWeightsUnchanged) {
  auto vf = ValueFunction::mlp(2, 8);
  auto rng = fwdtd::make_rng(1, 1);
  vf.initialize_uniform(0.5, rng);
  const std::vector<double> before(vf.weights().begin(), vf.weights().end());
  const std::vector<double> s{0.1, -0.4};
  vf.apply_td_update(s, vf.evaluate(s), 0.3);
  EXPECT_EQ(std::vector<double>(vf.weights().begin(), vf.weights().end()), before);
}

TEST(Approximator, RepeatedUnitTargetsFollowClosedForm) {
  for (double alpha : {0.05, 0.3, 0.9}) {
    for (int t : {1, 5, 10}) {
      auto vf = ValueFunction::tabular(1);
      const double v0[] = {0.2};
      vf.set_weights(v0);
      for (int k = 0; k < t; ++k) vf.apply_td_update(std::vector<double>{1.0}, 1.0, alpha);
      EXPECT_NEAR(vf.weights()[0], 0.2 + (1.0 - std::pow(1.0 - alpha, t)) * 0.8, 1e-12);
    }
  }
}

TEST(Approximator, UpdateUsesPreUpdateGradient) {
  auto vf = ValueFunction::mlp(1, 2, Activation::tanh);
  const std::vector<double> w{0.5, -0.3, 0.1, 0.2, 0.7, -0.4, 0.05};
  vf.set_weights(w);
  const std::vector<double> s{0.8};
  const double v = vf.evaluate(s);
  const auto g = vf.gradient(s);
  vf.apply_td_update(s, 2.0, 0.1);
  for (std::size_t i = 0; i < w.size(); ++i) {
    EXPECT_NEAR(vf.weights()[i], w[i] + 0.1 * (2.0 - v) * g[i], 1e-15);
  }
}

TEST(Approximator, DivergenceFlagIsSticky) {
  auto vf = ValueFunction::tabular(1);
  const std::vector<double> s{1.0};
  vf.apply_td_update(s, 1e12, 1.0);
  EXPECT_TRUE(vf.diverged());
  const std::vector<double> frozen(vf.weights().begin(), vf.weights().end());
  vf.apply_td_update(s, 0.0, 0.5);
  EXPECT_TRUE(vf.diverged());
  EXPECT_EQ(std::vector<double>(vf.weights().begin(), vf.weights().end()), frozen);
}

TEST(Approximator, NonFiniteTargetMarksDivergence) {
  auto vf = ValueFunction::linear(2);
  vf.apply_td_update(std::vector<double>{1.0, 0.0}, std::nan(""), 0.1);
  EXPECT_TRUE(vf.diverged());
}

TEST(Approximator, EvaluationIsDeterministic) {
  auto vf = ValueFunction::mlp(4, 50);
  auto rng = fwdtd::make_rng(2, 1);
  vf.initialize_uniform(0.3, rng);
  const std::vector<double> s{0.1, 0.2, -0.3, 0.4};
  const double a = vf.evaluate(s);
  const auto ga = vf.gradient(s);
  const auto copy = vf;
  EXPECT_EQ(copy.evaluate(s), a);
  EXPECT_EQ(copy.gradient(s), ga);
}

TEST(Approximator, CountersTrackCalls) {
  auto vf = ValueFunction::linear(2);
  const std::vector<double> s{1.0, 2.0};
  vf.reset_counters();
  vf.evaluate(s);
  vf.evaluate(s);
  vf.gradient(s);
  vf.apply_td_update(s, 1.0, 0.1);
  EXPECT_EQ(vf.counters().evaluations, 2u);
  EXPECT_EQ(vf.counters().gradients, 1u);
  EXPECT_EQ(vf.counters().updates, 1u);
}

TEST(Approximator, ActionValuesUpdateOnlyTheSelectedNetwork) {
  ActionValueFunction q({ValueFunction::linear(2), ValueFunction::linear(2)});
  const std::vector<double> s{1.0, 1.0};
  q.apply_td_update(s, 1, 1.0, 0.5);
  EXPECT_EQ(q.evaluate(s, 0), 0.0);
  EXPECT_GT(q.evaluate(s, 1), 0.0);
  const auto all = q.evaluate_all(s);
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[1], q.evaluate(s, 1));
  EXPECT_THROW(q.net(2), fwdtd::DimensionError);
}

}  // namespace
