#include "fwdtd/analysis.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "fwdtd/algorithms.hpp"
#include "fwdtd/error.hpp"

namespace fwdtd {

TrueValueTable true_values_random_walk() {
  constexpr int n = random_walk::kStates;
  const double p_left = random_walk::kLeftProbability;
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Ones(n);
  for (int s = 1; s <= n; ++s) {
    const int row = s - 1;
    if (s > 1) a(row, s - 2) -= p_left;
    a(row, std::min(s + 1, n) - 1) -= 1.0 - p_left;
  }
  const Eigen::VectorXd v = a.fullPivLu().solve(b);

  TrueValueTable table{TaskId::random_walk, {}};
  for (int s = 1; s <= n; ++s) {
    table.rows.push_back({{static_cast<double>(s)}, random_walk_features(s), v(s - 1),
                          1.0 / n, 0.0});
  }
  return table;
}

TrueValueTable true_values_mountain_car(const MountainCarPolicy& policy,
                                        const MountainCarTruthOptions& options, Rng& rng) {
  if (options.visit_rollouts == 0 || options.rollouts < 2) {
    throw ConfigError("mountain car truth needs >= 1 visit rollout and >= 2 value rollouts");
  }
  std::map<std::pair<double, double>, std::size_t> index;
  std::vector<MountainCarState> states;
  std::vector<double> visits;
  double total = 0.0;
  for (std::size_t r = 0; r < options.visit_rollouts; ++r) {
    MountainCarState s;
    for (std::size_t step = 0; step < options.max_steps; ++step) {
      const auto key = std::make_pair(s.position, s.velocity);
      auto [it, inserted] = index.try_emplace(key, states.size());
      if (inserted) {
        states.push_back(s);
        visits.push_back(0.0);
      }
      visits[it->second] += 1.0;
      total += 1.0;
      const auto out = mountain_car_step(s, policy(s), rng, RewardMode::noisy_eval);
      if (out.terminal) break;
      s = out.next;
    }
  }

  TrueValueTable table{TaskId::mountain_car, {}};
  const double n = static_cast<double>(options.rollouts);
  for (std::size_t k = 0; k < states.size(); ++k) {
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t r = 0; r < options.rollouts; ++r) {
      MountainCarState s = states[k];
      double ret = 0.0;
      for (std::size_t step = 0; step < options.max_steps; ++step) {
        const auto out = mountain_car_step(s, policy(s), rng, RewardMode::noisy_eval);
        ret += out.reward;
        if (out.terminal) break;
        s = out.next;
      }
      sum += ret;
      sum_sq += ret * ret;
    }
    const double mean = sum / n;
    const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    table.rows.push_back({{states[k].position, states[k].velocity},
                          mountain_car_features(states[k]), mean, visits[k] / total,
                          std::sqrt(var / n)});
  }
  return table;
}

double rms_error(const ValueFunction& vf, const TrueValueTable& table) {
  if (table.rows.empty()) throw DimensionError("empty true-value table");
  double acc = 0.0;
  for (const auto& row : table.rows) {
    const double err = vf.evaluate(row.features) - row.value;
    acc += row.weight * err * err;
  }
  return std::sqrt(acc);
}

void write_true_values_csv(const TrueValueTable& table, std::ostream& out) {
  const std::size_t dims = table.rows.empty() ? 0 : table.rows.front().state.size();
  for (std::size_t i = 0; i < dims; ++i) out << 's' << i << ',';
  out << "value,weight,std_error\n";
  char buf[32];
  auto put = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out << buf;
  };
  for (const auto& row : table.rows) {
    for (double s : row.state) {
      put(s);
      out << ',';
    }
    put(row.value);
    out << ',';
    put(row.weight);
    out << ',';
    put(row.std_error);
    out << '\n';
  }
}

TrueValueTable read_true_values_csv(TaskId task, std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("true-value CSV is empty");
  std::size_t columns = 1;
  for (char ch : line) columns += ch == ',';
  if (columns < 4) throw ConfigError("true-value CSV header has too few columns");
  const std::size_t dims = columns - 3;
  TrueValueTable table{task, {}};
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(std::stod(cell));
    if (cells.size() != columns) throw ConfigError("true-value CSV row has wrong column count");
    TrueValueRow row;
    row.state.assign(cells.begin(), cells.begin() + static_cast<std::ptrdiff_t>(dims));
    row.features = features_from_raw(task, row.state);
    row.value = cells[dims];
    row.weight = cells[dims + 1];
    row.std_error = cells[dims + 2];
    table.rows.push_back(std::move(row));
  }
  return table;
}

double one_state_closed_form(double v0, double alpha, std::size_t episode_length,
                             OneStateVariant variant) {
  if (episode_length == 0) throw ConfigError("episode length must be positive");
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  const double t = static_cast<double>(episode_length);
  const double beta =
      variant == OneStateVariant::lambda_return ? 1.0 - std::pow(1.0 - alpha, t) : alpha * t;
  return v0 + beta * (1.0 - v0);
}

double euclidean_norm(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return std::sqrt(acc);
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("vectors differ in length");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(acc);
}

Theorem1Result theorem1_ratio(const Theorem1Options& options) {
  if (options.steps == 0) throw ConfigError("ratio check needs at least one step");
  Rng init_rng = make_rng(options.seed, 1);
  Rng env_rng = make_rng(options.seed, 2);

  ValueFunction theta0 = ValueFunction::tabular(random_walk::kStates);
  theta0.initialize_uniform(options.init_range, init_rng);

  std::vector<Transition> trajectory;
  int state = random_walk::kStart;
  for (std::size_t t = 0; t < options.steps; ++t) {
    const auto out = random_walk_step(state, env_rng);
    Transition tr;
    tr.state = random_walk_features(state);
    tr.reward = out.reward * options.reward_scale;
    if (!out.terminal) tr.next_state = random_walk_features(out.next);
    trajectory.push_back(std::move(tr));
    if (out.terminal) break;
    state = out.next;
  }

  const LearningParams params{options.alpha, 1.0, options.lambda};
  TdLambda td(ActionValueFunction(theta0), params);
  OnlineLambdaReturn online(ActionValueFunction(theta0), params);
  td.begin_episode();
  online.begin_episode();
  for (const auto& tr : trajectory) {
    td.observe(tr);
    online.observe(tr);
  }

  // Sum of Delta_i^t: interim lambda-returns with every value taken under theta_0.
  ValueTape frozen(1.0, options.lambda);
  std::vector<StateAction> states;
  for (const auto& tr : trajectory) {
    states.push_back({tr.state, 0});
    if (tr.terminal()) {
      frozen.terminate(tr.reward);
    } else {
      frozen.push(tr.reward, theta0.evaluate(*tr.next_state));
    }
  }
  const std::vector<double> targets = lambda_returns_to_horizon(frozen, frozen.length());
  WeightVector sum_delta(theta0.num_weights(), 0.0);
  for (std::size_t i = 0; i < states.size(); ++i) {
    const WeightVector g = theta0.gradient(states[i].features);
    const double err = targets[i] - theta0.evaluate(states[i].features);
    for (std::size_t k = 0; k < g.size(); ++k) sum_delta[k] += err * g[k];
  }

  Theorem1Result result;
  result.steps = trajectory.size();
  result.sum_delta_norm = euclidean_norm(sum_delta);
  const auto w_td = td.values().net(0).weights();
  result.numerator = euclidean_distance(w_td, online.values().net(0).weights());
  result.denominator = euclidean_distance(w_td, theta0.weights());
  if (result.sum_delta_norm < 1e-12 || result.denominator < 1e-12) {
    throw DegenerateTrajectoryError("TD(lambda) weights did not move from theta_0");
  }
  result.ratio = result.numerator / result.denominator;
  return result;
}

}  // namespace fwdtd
