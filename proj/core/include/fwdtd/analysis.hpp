#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fwdtd/approximator.hpp"
#include "fwdtd/envs.hpp"
#include "fwdtd/random.hpp"

namespace fwdtd {

struct TrueValueRow {
  std::vector<double> state;  // raw coordinates
  FeatureVector features;
  double value = 0.0;
  double weight = 0.0;
  double std_error = 0.0;
};

/// Ground-truth state values with the state weighting used by the RMS metric.
/// Weights are non-negative and sum to 1.
struct TrueValueTable {
  TaskId task = TaskId::random_walk;
  std::vector<TrueValueRow> rows;
};

/// Direct linear solve of v(s) = 1 + 0.7 v(s-1) + 0.3 v(min(s+1, 10)), v(0) = 0.
/// Uniform weights over the 10 states.
TrueValueTable true_values_random_walk();

struct MountainCarTruthOptions {
  std::size_t visit_rollouts = 1000;  // rollouts used to estimate the visit distribution
  std::size_t rollouts = 200;         // Monte Carlo returns per sampled state
  std::size_t max_steps = 100000;
};

using MountainCarPolicy = std::function<std::size_t(const MountainCarState&)>;

/// Monte Carlo values of the on-policy states under noisy evaluation rewards.
/// Visited states are pooled by exact equality; their weight is the visit frequency.
TrueValueTable true_values_mountain_car(const MountainCarPolicy& policy,
                                        const MountainCarTruthOptions& options, Rng& rng);

/// sqrt(sum_s w(s) (V(s) - v(s))^2).
double rms_error(const ValueFunction& vf, const TrueValueTable& table);

/// CSV with columns s0..s{d-1},value,weight,std_error. Features are rebuilt from
/// the raw coordinates on load.
void write_true_values_csv(const TrueValueTable& table, std::ostream& out);
TrueValueTable read_true_values_csv(TaskId task, std::istream& in);

enum class OneStateVariant { lambda_return, td_lambda };

/// End-of-episode value V_T = V_0 + beta (1 - V_0), beta = 1 - (1-alpha)^T for the
/// lambda-return algorithm and beta = alpha T for TD(lambda=1).
double one_state_closed_form(double v0, double alpha, std::size_t episode_length,
                             OneStateVariant variant);

struct Theorem1Options {
  double lambda = 1.0;
  double alpha = 0.01;
  std::size_t steps = 10;
  std::uint64_t seed = 0;
  double reward_scale = 1.0;
  double init_range = 0.0;  // tabular theta_0 ~ U[-r, r]
};

struct Theorem1Result {
  double ratio = 0.0;
  double numerator = 0.0;        // ||theta_td - theta_lambda||
  double denominator = 0.0;      // ||theta_td - theta_0||
  double sum_delta_norm = 0.0;   // ||sum_i Delta_i^t||, step-size independent
  std::size_t steps = 0;         // transitions actually used (episode may end earlier)
};

/// Runs TD(lambda) and the online lambda-return algorithm on one seeded random-walk
/// trajectory (tabular) and compares their weights after `steps` transitions.
/// Throws DegenerateTrajectoryError if the denominator or ||sum Delta|| is below 1e-12.
Theorem1Result theorem1_ratio(const Theorem1Options& options);

double euclidean_norm(std::span<const double> x);
double euclidean_distance(std::span<const double> a, std::span<const double> b);

}  // namespace fwdtd
