#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "fwdtd/error.hpp"
#include "fwdtd/harness.hpp"

namespace fwdtd {

namespace {

constexpr std::uint64_t kTruthStream = 4;

bool is_forward(const std::string& algorithm) {
  return parse_algorithm(algorithm) == AlgorithmId::forward_td;
}

ValueFunction make_network(const ExperimentConfig& cfg, std::size_t inputs) {
  switch (cfg.approximator) {
    case ApproximatorKind::tabular: return ValueFunction::tabular(inputs);
    case ApproximatorKind::linear: return ValueFunction::linear(inputs);
    case ApproximatorKind::mlp: return ValueFunction::mlp(inputs, cfg.hidden);
  }
  throw ConfigError("unknown approximator");
}

std::string fmt_k_max(const HorizonSetting& h) {
  return h.k_max ? std::to_string(*h.k_max) : std::string();
}

}  // namespace

std::vector<SweepPoint> sweep_points(const ExperimentConfig& cfg) {
  std::vector<SweepPoint> points;
  for (const auto& algorithm : cfg.algorithms) {
    const bool forward = is_forward(algorithm);
    const std::vector<HorizonSetting> horizons =
        forward ? cfg.horizons : std::vector<HorizonSetting>{HorizonSetting{0.0, std::nullopt}};
    for (double lambda : cfg.lambdas) {
      for (const auto& h : horizons) {
        for (double alpha : cfg.alphas) points.push_back({algorithm, lambda, alpha, h});
      }
    }
  }
  return points;
}

TrueValueTable truth_for(const ExperimentConfig& cfg) {
  switch (cfg.task) {
    case TaskId::random_walk: return true_values_random_walk();
    case TaskId::one_state: return {TaskId::one_state, {{{0.0}, {1.0}, 1.0, 1.0, 0.0}}};
    case TaskId::mountain_car: {
      if (cfg.reward_mode != RewardMode::noisy_eval) break;
      MountainCarTruthOptions opts;
      opts.visit_rollouts = cfg.truth_visit_rollouts;
      opts.rollouts = cfg.truth_rollouts;
      opts.max_steps = cfg.max_steps;
      Rng rng = make_rng(cfg.seed, kTruthStream);
      return true_values_mountain_car(near_optimal_mountain_car_action, opts, rng);
    }
    case TaskId::cart_pole: break;
  }
  throw ConfigError("task '" + std::string(to_string(cfg.task)) + "' has no value ground truth");
}

ResultRow run_single(const ExperimentConfig& cfg, const SweepPoint& point, std::size_t run,
                     const TrueValueTable* truth) {
  const bool rms = cfg.metric != Metric::episode_return;
  if (rms && truth == nullptr) throw ConfigError("RMS metric needs a true-value table");

  EnvOptions env_options;
  env_options.one_state_length = cfg.episode_length;
  env_options.reward_mode = cfg.reward_mode;
  auto env = make_environment(cfg.task, env_options);
  const EnvSpec& spec = env->spec();

  ResultRow row;
  row.task = std::string(to_string(cfg.task));
  row.algorithm = point.algorithm;
  row.lambda = point.lambda;
  row.alpha = point.alpha;
  row.eta = point.horizon.eta;
  row.k_max = fmt_k_max(point.horizon);
  row.epsilon = spec.control ? cfg.epsilon : 0.0;
  row.episodes = cfg.episodes;
  row.approximator = std::string(to_string(cfg.approximator));
  row.hidden = cfg.approximator == ApproximatorKind::mlp ? cfg.hidden : 0;
  row.init_range = cfg.init_range;
  row.run = run;
  row.run_seed = derive_seed(cfg.seed, run);

  Rng init_rng = make_rng(row.run_seed, 1);
  Rng env_rng = make_rng(row.run_seed, 2);
  Rng policy_rng = make_rng(row.run_seed, 3);

  std::vector<ValueFunction> nets;
  const std::size_t actions = spec.control ? spec.num_actions : 1;
  for (std::size_t a = 0; a < actions; ++a) {
    nets.push_back(make_network(cfg, spec.feature_dim));
    nets.back().initialize_uniform(cfg.init_range, init_rng);
  }

  const AlgorithmId id = parse_algorithm(point.algorithm);
  Horizon horizon = Horizon::episodic();
  if (id == AlgorithmId::forward_td) {
    horizon = compute_horizon(spec.gamma, point.lambda, point.horizon.eta, point.horizon.k_max);
    row.k = horizon.to_string();
  }
  auto learner = make_learner(id, ActionValueFunction(std::move(nets)),
                              {point.alpha, spec.gamma, point.lambda}, horizon);

  double baseline = 1.0;
  if (rms && cfg.normalize) {
    const double e0 = rms_error(learner->values().net(0), *truth);
    if (e0 > 0.0 && std::isfinite(e0)) baseline = e0;
  }
  bool capped = false;
  // Once the error reaches the cap the run counts as diverged and stays at the cap.
  auto current_error = [&] {
    if (!capped && !learner->diverged()) {
      const double e = rms_error(learner->values().net(0), *truth) / baseline;
      if (std::isfinite(e) && e < cfg.error_cap) return e;
    }
    capped = true;
    return cfg.error_cap;
  };
  auto choose = [&](const FeatureVector& x) {
    if (!spec.control) return env->evaluation_action();
    return epsilon_greedy(learner->values().evaluate_all(x), cfg.epsilon, policy_rng);
  };

  if (cfg.metric == Metric::rms_per_step) row.curve.push_back(current_error());
  for (std::size_t episode = 0; episode < cfg.episodes; ++episode) {
    if (rms && capped) {
      // Nothing can change any more: weights are frozen and the error is pinned.
      if (cfg.metric == Metric::rms_end_of_episode) row.curve.push_back(cfg.error_cap);
      continue;
    }
    env->reset(env_rng);
    learner->begin_episode();
    FeatureVector x = env->features();
    std::size_t a = choose(x);
    double episode_return = 0.0;
    for (std::size_t step = 0; step < cfg.max_steps; ++step) {
      const StepResult out = env->step(a, env_rng);
      episode_return += out.reward;
      Transition tr;
      tr.state = std::move(x);
      tr.action = spec.control ? a : 0;
      tr.reward = out.reward;
      const bool done = out.terminal || step + 1 == cfg.max_steps;
      if (!done) {
        x = env->features();
        a = choose(x);
        tr.next_state = x;
        tr.next_action = spec.control ? a : 0;
      }
      learner->observe(tr);
      if (cfg.metric == Metric::rms_per_step) row.curve.push_back(current_error());
      if (done) break;
    }
    if (cfg.metric == Metric::rms_end_of_episode) row.curve.push_back(current_error());
    if (cfg.metric == Metric::episode_return) row.curve.push_back(episode_return);
  }

  row.diverged = capped || learner->diverged();
  row.aggregate = row.curve.empty()
                      ? 0.0
                      : std::accumulate(row.curve.begin(), row.curve.end(), 0.0) /
                            static_cast<double>(row.curve.size());
  return row;
}

ResultTable run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto points = sweep_points(cfg);
  std::optional<TrueValueTable> truth;
  if (cfg.metric != Metric::episode_return) truth = truth_for(cfg);
  const TrueValueTable* truth_ptr = truth ? &*truth : nullptr;

  const std::size_t jobs = points.size() * cfg.runs;
  ResultTable table;
  table.rows.resize(jobs);
  auto work = [&](std::size_t job) {
    table.rows[job] = run_single(cfg, points[job / cfg.runs], job % cfg.runs, truth_ptr);
  };

  const std::size_t threads = std::min(cfg.threads, jobs);
  if (threads <= 1) {
    for (std::size_t job = 0; job < jobs; ++job) work(job);
    return table;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t job = next++; job < jobs; job = next++) {
        try {
          work(job);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  return table;
}

}  // namespace fwdtd
