#include <cmath>
#include <string>

#include "fwdtd/algorithms.hpp"
#include "fwdtd/error.hpp"

namespace fwdtd {

AlgorithmId parse_algorithm(std::string_view name) {
  if (name == "td0" || name == "sarsa") return AlgorithmId::td0;
  if (name == "td_lambda" || name == "sarsa_lambda") return AlgorithmId::td_lambda;
  if (name == "forward_td" || name == "forward_sarsa") return AlgorithmId::forward_td;
  if (name == "online_lambda_return") return AlgorithmId::online_lambda_return;
  if (name == "offline_lambda_return") return AlgorithmId::offline_lambda_return;
  throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

std::string_view to_string(AlgorithmId id) {
  switch (id) {
    case AlgorithmId::td0: return "td0";
    case AlgorithmId::td_lambda: return "td_lambda";
    case AlgorithmId::forward_td: return "forward_td";
    case AlgorithmId::online_lambda_return: return "online_lambda_return";
    case AlgorithmId::offline_lambda_return: return "offline_lambda_return";
  }
  return "unknown";
}

std::unique_ptr<Learner> make_learner(AlgorithmId id, ActionValueFunction values,
                                      LearningParams params, Horizon horizon) {
  switch (id) {
    case AlgorithmId::td0: return std::make_unique<TdZero>(std::move(values), params);
    case AlgorithmId::td_lambda: return std::make_unique<TdLambda>(std::move(values), params);
    case AlgorithmId::forward_td:
      return std::make_unique<ForwardTd>(std::move(values), params, horizon);
    case AlgorithmId::online_lambda_return:
      return std::make_unique<OnlineLambdaReturn>(std::move(values), params);
    case AlgorithmId::offline_lambda_return:
      return std::make_unique<OfflineLambdaReturn>(std::move(values), params);
  }
  throw ConfigError("unknown algorithm");
}

std::size_t epsilon_greedy(std::span<const double> q_values, double epsilon, Rng& rng) {
  if (q_values.empty()) throw DimensionError("epsilon_greedy needs at least one action");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("epsilon must lie in [0, 1]");
  const std::size_t n = q_values.size();
  if (epsilon > 0.0) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < epsilon) return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  }
  double best = -INFINITY;
  std::size_t count = 0;
  std::size_t first = 0;
  for (std::size_t a = 0; a < n; ++a) {
    const double q = std::isnan(q_values[a]) ? -INFINITY : q_values[a];
    if (q > best || count == 0) {
      best = q;
      first = a;
      count = 1;
    } else if (q == best) {
      ++count;
    }
  }
  if (count == 1) return first;
  std::size_t pick = std::uniform_int_distribution<std::size_t>(0, count - 1)(rng);
  for (std::size_t a = 0; a < n; ++a) {
    const double q = std::isnan(q_values[a]) ? -INFINITY : q_values[a];
    if (q == best && pick-- == 0) return a;
  }
  return first;
}

}  // namespace fwdtd
