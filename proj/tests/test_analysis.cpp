#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "fwdtd/analysis.hpp"
#include "fwdtd/error.hpp"

namespace {

using namespace fwdtd;

TEST(TrueValues, RandomWalkSolvesBellmanEquations) {
  const auto table = true_values_random_walk();
  ASSERT_EQ(table.rows.size(), 10u);
  std::vector<double> v(11, 0.0);
  double weight = 0.0;
  for (const auto& row : table.rows) {
    v[static_cast<std::size_t>(row.state[0])] = row.value;
    weight += row.weight;
  }
  EXPECT_NEAR(weight, 1.0, 1e-15);
  for (int s = 1; s <= 10; ++s) {
    const double rhs = 1.0 + 0.7 * v[s - 1] + 0.3 * v[std::min(s + 1, 10)];
    EXPECT_LT(std::abs(v[s] - rhs), 1e-10) << "state " << s;
    if (s > 1) EXPECT_LT(v[s - 1], v[s]);
  }
}

TEST(TrueValues, MountainCarMonteCarlo) {
  MountainCarTruthOptions opts;
  opts.visit_rollouts = 5;
  opts.rollouts = 50;
  auto rng = make_rng(1, 4);
  const auto table = true_values_mountain_car(near_optimal_mountain_car_action, opts, rng);
  ASSERT_EQ(table.rows.size(), 168u);
  double weight = 0.0;
  for (const auto& row : table.rows) {
    EXPECT_LT(row.value, 0.0);
    EXPECT_GT(row.std_error, 0.0);
    weight += row.weight;
  }
  EXPECT_NEAR(weight, 1.0, 1e-12);
  // The last state on the trajectory is one step from the goal.
  const auto& last = table.rows.back();
  EXPECT_NEAR(last.value, -1.0, 3 * 2.0 / std::sqrt(50.0));
  // Values follow the remaining number of steps.
  EXPECT_NEAR(table.rows.front().value, -168.0, 3 * table.rows.front().std_error + 1e-9);
  EXPECT_THROW(true_values_mountain_car(near_optimal_mountain_car_action, {1, 1, 100}, rng),
               ConfigError);
}

TEST(TrueValues, DoublingRolloutsShrinksStandardErrorBySqrtTwo) {
  MountainCarTruthOptions small;
  small.visit_rollouts = 1;
  small.rollouts = 100;
  MountainCarTruthOptions large = small;
  large.rollouts = 200;
  auto rng_a = make_rng(2, 4);
  auto rng_b = make_rng(3, 4);
  const auto a = true_values_mountain_car(near_optimal_mountain_car_action, small, rng_a);
  const auto b = true_values_mountain_car(near_optimal_mountain_car_action, large, rng_b);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  double ratio = 0.0;
  for (std::size_t k = 0; k < a.rows.size(); ++k) ratio += b.rows[k].std_error / a.rows[k].std_error;
  ratio /= static_cast<double>(a.rows.size());
  EXPECT_NEAR(ratio, 1.0 / std::sqrt(2.0), 0.03);
}

TEST(RmsError, HandExamples) {
  auto vf = ValueFunction::tabular(2);
  TrueValueTable table{TaskId::random_walk,
                       {{{1}, {1.0, 0.0}, 0.0, 0.5, 0.0}, {{2}, {0.0, 1.0}, 2.0, 0.5, 0.0}}};
  EXPECT_DOUBLE_EQ(rms_error(vf, table), std::sqrt(2.0));
  const double exact[] = {0.0, 2.0};
  vf.set_weights(exact);
  EXPECT_EQ(rms_error(vf, table), 0.0);
  const double offset[] = {1.0, 3.0};
  vf.set_weights(offset);
  EXPECT_DOUBLE_EQ(rms_error(vf, table), 1.0);
  EXPECT_THROW(rms_error(vf, TrueValueTable{}), DimensionError);
}

TEST(TrueValues, CsvRoundTrip) {
  const auto table = true_values_random_walk();
  std::stringstream buffer;
  write_true_values_csv(table, buffer);
  const auto back = read_true_values_csv(TaskId::random_walk, buffer);
  ASSERT_EQ(back.rows.size(), table.rows.size());
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    EXPECT_EQ(back.rows[k].state, table.rows[k].state);
    EXPECT_EQ(back.rows[k].features, table.rows[k].features);
    EXPECT_EQ(back.rows[k].value, table.rows[k].value);
    EXPECT_EQ(back.rows[k].weight, table.rows[k].weight);
  }
  std::stringstream empty;
  EXPECT_THROW(read_true_values_csv(TaskId::random_walk, empty), ConfigError);
}

TEST(OneStateClosedForm, Examples) {
  EXPECT_NEAR(one_state_closed_form(0.0, 0.1, 5, OneStateVariant::lambda_return), 0.40951, 1e-12);
  EXPECT_NEAR(one_state_closed_form(0.0, 0.1, 5, OneStateVariant::td_lambda), 0.5, 1e-12);
  for (double alpha = 0.05; alpha <= 1.0; alpha += 0.05) {
    for (std::size_t t : {1u, 5u, 10u, 50u}) {
      const double beta = one_state_closed_form(0.0, alpha, t, OneStateVariant::lambda_return);
      EXPECT_GE(beta, 0.0);
      EXPECT_LE(beta, 1.0);
    }
  }
  EXPECT_THROW(one_state_closed_form(0.0, 0.1, 0, OneStateVariant::td_lambda), ConfigError);
}

TEST(StepSizeLimit, ZeroLambdaSingleStepRatioIsZero) {
  Theorem1Options opts;
  opts.lambda = 0.0;
  opts.alpha = 0.3;
  opts.steps = 1;
  const auto r = theorem1_ratio(opts);
  EXPECT_EQ(r.ratio, 0.0);
  EXPECT_EQ(r.steps, 1u);
}

TEST(StepSizeLimit, RatioShrinksWithStepSize) {
  double previous = INFINITY;
  for (double alpha : {0.1, 0.01, 0.001}) {
    double mean = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Theorem1Options opts;
      opts.alpha = alpha;
      opts.seed = seed;
      mean += theorem1_ratio(opts).ratio / 20.0;
    }
    EXPECT_LT(mean, previous);
    previous = mean;
  }
  EXPECT_LT(previous, 0.05);
}

TEST(StepSizeLimit, ScaleConsistentForSmallSteps) {
  Theorem1Options opts;
  opts.alpha = 1e-4;
  opts.seed = 5;
  const double base = theorem1_ratio(opts).ratio;
  opts.reward_scale = 7.0;
  EXPECT_NEAR(theorem1_ratio(opts).ratio, base, 1e-3);
}

TEST(StepSizeLimit, DegenerateTrajectoryThrows) {
  Theorem1Options opts;
  opts.reward_scale = 0.0;
  EXPECT_THROW(theorem1_ratio(opts), DegenerateTrajectoryError);
  opts.steps = 0;
  EXPECT_THROW(theorem1_ratio(opts), ConfigError);
}

TEST(Norms, Euclidean) {
  EXPECT_DOUBLE_EQ(euclidean_norm(std::vector<double>{3.0, 4.0}), 5.0);
  EXPECT_DOUBLE_EQ(euclidean_distance(std::vector<double>{1.0, 1.0}, std::vector<double>{4.0, 5.0}), 5.0);
  EXPECT_THROW(euclidean_distance(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}),
               DimensionError);
}

}  // namespace
