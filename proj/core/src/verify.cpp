#include "fwdtd/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <random>

#include "fwdtd/algorithms.hpp"
#include "fwdtd/analysis.hpp"
#include "fwdtd/envs.hpp"
#include "fwdtd/error.hpp"
#include "fwdtd/random.hpp"
#include "fwdtd/returns.hpp"

namespace fwdtd {

namespace {

std::string fmt(const char* format, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double max_weight_diff(const ActionValueFunction& a, const ActionValueFunction& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.num_actions(); ++k) {
    const auto wa = a.net(k).weights();
    const auto wb = b.net(k).weights();
    for (std::size_t i = 0; i < wa.size(); ++i) worst = std::max(worst, std::abs(wa[i] - wb[i]));
  }
  return worst;
}

ActionValueFunction random_values(ApproximatorKind kind, const EnvSpec& spec, double range,
                                  Rng& rng) {
  std::vector<ValueFunction> nets;
  const std::size_t actions = spec.control ? spec.num_actions : 1;
  for (std::size_t a = 0; a < actions; ++a) {
    nets.push_back(kind == ApproximatorKind::tabular ? ValueFunction::tabular(spec.feature_dim)
                                                     : ValueFunction::mlp(spec.feature_dim, 10));
    nets.back().initialize_uniform(range, rng);
  }
  return ActionValueFunction(std::move(nets));
}

/// Feeds identical transitions to every learner. Actions come from the first
/// learner (epsilon-greedy) on control tasks, else from the evaluation policy.
/// Returns the largest weight difference to the first learner seen after any episode.
double drive(Environment& env, const std::vector<Learner*>& learners, std::size_t episodes,
             std::size_t max_steps, double epsilon, std::uint64_t seed) {
  Rng env_rng = make_rng(seed, 2);
  Rng policy_rng = make_rng(seed, 3);
  const bool control = env.spec().control;
  auto choose = [&](const FeatureVector& x) {
    if (!control) return env.evaluation_action();
    return epsilon_greedy(learners.front()->values().evaluate_all(x), epsilon, policy_rng);
  };
  double worst = 0.0;
  for (std::size_t e = 0; e < episodes; ++e) {
    env.reset(env_rng);
    for (auto* l : learners) l->begin_episode();
    FeatureVector x = env.features();
    std::size_t a = choose(x);
    for (std::size_t step = 0; step < max_steps; ++step) {
      const auto out = env.step(a, env_rng);
      Transition tr{x, control ? a : 0, out.reward, std::nullopt, 0};
      const bool done = out.terminal || step + 1 == max_steps;
      if (!done) {
        x = env.features();
        a = choose(x);
        tr.next_state = x;
        tr.next_action = control ? a : 0;
      }
      for (auto* l : learners) l->observe(tr);
      if (done) break;
    }
    for (std::size_t i = 1; i < learners.size(); ++i) {
      worst = std::max(worst, max_weight_diff(learners.front()->values(), learners[i]->values()));
    }
  }
  return worst;
}

double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-3});
}

}  // namespace

void VerifyReport::check(bool ok, const std::string& what) {
  ++checks;
  if (!ok) ++failures;
  lines.push_back(std::string(ok ? "  ok    " : "  FAIL  ") + what);
}

VerifyReport verify_gradcheck(std::uint64_t seed, std::size_t samples) {
  VerifyReport report{"gradcheck", {}};
  struct Case {
    const char* label;
    ValueFunction vf;
  };
  std::vector<Case> cases{{"tabular", ValueFunction::tabular(8)},
                          {"linear", ValueFunction::linear(5)},
                          {"mlp-tanh", ValueFunction::mlp(3, 7, Activation::tanh)},
                          {"mlp-identity", ValueFunction::mlp(3, 7, Activation::identity)}};
  Rng rng = make_rng(seed, 0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (auto& c : cases) {
    double worst = 0.0;
    double worst_fused = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
      c.vf.initialize_uniform(1.0, rng);
      FeatureVector x(c.vf.input_dim(), 0.0);
      if (c.vf.kind() == ApproximatorKind::tabular) {
        x[std::uniform_int_distribution<std::size_t>(0, x.size() - 1)(rng)] = 1.0;
      } else {
        for (auto& xi : x) xi = unit(rng);
      }
      const WeightVector g = c.vf.gradient(x);
      const WeightVector fd = finite_difference_gradient(c.vf, x, 1e-6);
      WeightVector fused(c.vf.num_weights());
      const double v = c.vf.value_and_gradient(x, fused);
      worst_fused = std::max(worst_fused, relative_error(v, c.vf.evaluate(x)));
      for (std::size_t i = 0; i < g.size(); ++i) {
        worst = std::max(worst, relative_error(g[i], fd[i]));
        worst_fused = std::max(worst_fused, relative_error(g[i], fused[i]));
      }
    }
    report.check(worst < 1e-5, fmt("%-13s analytic vs central difference, %zu samples: max rel err %.3g",
                                   c.label, samples, worst));
    report.check(worst_fused == 0.0,
                 fmt("%-13s fused value+gradient matches separate calls", c.label));
  }
  return report;
}

VerifyReport verify_return_oracle(std::uint64_t seed, std::size_t tapes) {
  VerifyReport report{"return-oracle", {}};
  constexpr std::array<double, 4> grid{0.0, 0.5, 0.9, 1.0};
  Rng rng = make_rng(seed, 0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);
  std::uniform_int_distribution<std::size_t> length(1, 50);
  std::bernoulli_distribution coin(0.5);

  double chain_err = 0.0;
  double shift_err = 0.0;
  double recursion_err = 0.0;
  double nstep_err = 0.0;
  std::size_t shifts = 0;
  for (std::size_t n = 0; n < tapes; ++n) {
    const double gamma = grid[pick(rng)];
    const double lambda = grid[pick(rng)];
    const std::size_t len = length(rng);
    std::vector<double> rewards(len);
    std::vector<double> values(len + 1);
    for (auto& r : rewards) r = unit(rng);
    for (auto& v : values) v = unit(rng);
    const ValueTape tape(gamma, lambda, rewards, values, coin(rng));

    for (std::size_t t = 0; t < len; ++t) {
      BoundedLambdaReturn g = one_step_lambda_return(tape, t);
      for (std::size_t h = t + 1; h <= len; ++h) {
        if (h > t + 1) g = extend_horizon(g, tape);
        const double direct = lambda_return_direct(tape, t, h).value;
        chain_err = std::max(chain_err, std::abs(g.value - direct));
        if (gamma * lambda > 0.0 && h >= t + 2) {
          const auto shifted = shift_start(lambda_return_direct(tape, t, h), tape);
          shift_err = std::max(shift_err,
                               std::abs(shifted.value - lambda_return_direct(tape, t + 1, h).value));
          ++shifts;
        }
      }
      for (std::size_t k = 2; t + k <= len; ++k) {
        const double lhs = n_step_return(tape, t, k);
        const double rhs = tape.reward(t) + gamma * n_step_return(tape, t + 1, k - 1);
        nstep_err = std::max(nstep_err, std::abs(lhs - rhs));
      }
    }
    const auto all = lambda_returns_to_horizon(tape, len);
    for (std::size_t t = 0; t < len; ++t) {
      recursion_err =
          std::max(recursion_err, std::abs(all[t] - lambda_return_direct(tape, t, len).value));
    }
  }
  report.check(chain_err <= 1e-9,
               fmt("horizon extension chains vs direct, %zu tapes: max abs err %.3g", tapes, chain_err));
  report.check(shift_err <= 1e-9 && shifts > 0,
               fmt("start shifts vs direct, %zu shifts: max abs err %.3g", shifts, shift_err));
  report.check(recursion_err <= 1e-9,
               fmt("backward recursion vs direct: max abs err %.3g", recursion_err));
  report.check(nstep_err <= 1e-12, fmt("n-step recursion: max abs err %.3g", nstep_err));

  double weight_err = 0.0;
  for (int li = 0; li <= 20; ++li) {
    const double lambda = li / 20.0;
    for (int n = 1; n <= 100; ++n) {
      double sum = 0.0;
      for (int i = 1; i <= n - 1; ++i) sum += std::pow(lambda, i - 1);
      weight_err = std::max(weight_err, std::abs((1.0 - lambda) * sum + std::pow(lambda, n - 1) - 1.0));
    }
  }
  report.check(weight_err <= 1e-12, fmt("weight-sum identity, n <= 100: max err %.3g", weight_err));

  double flat_err = 0.0;
  const ValueTape flat(1.0, 0.7, std::vector<double>(30, 0.0), std::vector<double>(31, 2.5));
  for (std::size_t t = 0; t < 30; ++t) {
    for (std::size_t h = t + 1; h <= 30; ++h) {
      flat_err = std::max(flat_err, std::abs(lambda_return_direct(flat, t, h).value - 2.5));
    }
  }
  report.check(flat_err <= 1e-12, fmt("coinciding n-step returns give that value: max err %.3g", flat_err));
  return report;
}

VerifyReport verify_equivalence(std::uint64_t seed) {
  VerifyReport report{"equivalence", {}};
  constexpr double tol = 1e-9;
  auto rw = make_environment(TaskId::random_walk);
  auto mc = make_environment(TaskId::mountain_car);
  auto mc_control = make_environment(TaskId::mountain_car, {10, RewardMode::unit_control});
  auto cp = make_environment(TaskId::cart_pole);

  struct Setup {
    const char* label;
    Environment* env;
    ApproximatorKind kind;
    double alpha;
    std::size_t episodes;
    std::size_t max_steps;
  };
  const std::vector<Setup> prediction{
      {"random walk, tabular", rw.get(), ApproximatorKind::tabular, 0.1, 20, 100000},
      {"mountain car, mlp", mc.get(), ApproximatorKind::mlp, 0.002, 3, 5000}};
  const std::vector<Setup> control{
      {"cart-pole, mlp", cp.get(), ApproximatorKind::mlp, 0.01, 5, 1000},
      {"mountain car, mlp", mc_control.get(), ApproximatorKind::mlp, 0.01, 2, 1000}};

  std::uint64_t case_index = 0;
  auto compare = [&](const char* what, const Setup& s, double lambda, Horizon horizon,
                     auto&& make_reference) {
    const std::uint64_t run_seed = derive_seed(seed, case_index++);
    Rng init = make_rng(run_seed, 1);
    Environment& env = *s.env;
    const ActionValueFunction q0 = random_values(s.kind, env.spec(), 0.5, init);
    const LearningParams params{s.alpha, env.spec().gamma, lambda};
    auto reference = make_reference(q0, params);
    ForwardTd forward(q0, params, horizon);
    std::vector<Learner*> ls{reference.get(), &forward};
    const double diff = drive(env, ls, s.episodes, s.max_steps, 0.05, run_seed);
    report.check(diff <= tol, fmt("%-34s %-22s lambda=%.2g K=%s: max weight diff %.3g", what,
                                  s.label, lambda, horizon.to_string().c_str(), diff));
  };
  auto td0 = [](const ActionValueFunction& q, LearningParams p) {
    return std::make_unique<TdZero>(q, p);
  };
  auto offline = [](const ActionValueFunction& q, LearningParams p) {
    return std::make_unique<OfflineLambdaReturn>(q, p);
  };

  for (const auto& s : prediction) {
    compare("forward TD, K=1 vs TD(0)", s, 0.0, compute_horizon(1.0, 0.0, 0.01), td0);
    compare("forward TD, K=1 vs TD(0)", s, 0.9, Horizon::bounded(1), td0);
    compare("forward TD, episodic vs offline", s, 1.0, compute_horizon(1.0, 1.0, 0.01), offline);
    compare("forward TD, episodic vs offline", s, 0.9, Horizon::episodic(), offline);
  }
  for (const auto& s : control) {
    compare("forward Sarsa, K=1 vs Sarsa", s, 0.0, compute_horizon(1.0, 0.0, 0.01), td0);
    compare("forward Sarsa, K=1 vs Sarsa", s, 0.8, Horizon::bounded(1), td0);
  }

  std::vector<Setup> all = prediction;
  all.insert(all.end(), control.begin(), control.end());
  for (const auto& s : all) {
    const std::uint64_t run_seed = derive_seed(seed, case_index++);
    Rng init = make_rng(run_seed, 1);
    const ActionValueFunction q0 = random_values(s.kind, s.env->spec(), 0.5, init);
    const LearningParams params{s.alpha, s.env->spec().gamma, 0.0};
    TdZero a(q0, params);
    TdLambda b(q0, params);
    const double diff = drive(*s.env, {&a, &b}, s.episodes, s.max_steps, 0.05, run_seed);
    report.check(diff <= tol, fmt("%-34s %-22s max weight diff %.3g", "TD(lambda=0) vs TD(0)", s.label,
                                  diff));
  }
  return report;
}

VerifyReport verify_theorem1(std::uint64_t seed, std::size_t seeds) {
  VerifyReport report{"theorem1", {}};
  const std::array<double, 3> alphas{0.1, 0.01, 0.001};
  std::array<double, 3> mean{};
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    for (std::size_t i = 0; i < seeds; ++i) {
      Theorem1Options opts;
      opts.alpha = alphas[k];
      opts.seed = derive_seed(seed, i);
      mean[k] += theorem1_ratio(opts).ratio;
    }
    mean[k] /= static_cast<double>(seeds);
    report.note(fmt("alpha=%-6g mean ratio over %zu seeds: %.6g", alphas[k], seeds, mean[k]));
  }
  report.check(mean[0] > mean[1] && mean[1] > mean[2], "mean ratio strictly decreasing as alpha shrinks");
  report.check(mean[2] < 0.05, fmt("mean ratio at alpha=0.001 below 0.05 (%.4g)", mean[2]));

  Theorem1Options one;
  one.lambda = 0.0;
  one.steps = 1;
  one.alpha = 0.3;
  one.seed = seed;
  const double r0 = theorem1_ratio(one).ratio;
  report.check(r0 == 0.0, fmt("lambda=0, one step: ratio %.3g is exactly 0", r0));

  Theorem1Options small;
  small.alpha = 1e-4;
  small.seed = seed;
  const double base = theorem1_ratio(small).ratio;
  small.reward_scale = 3.0;
  const double scaled = theorem1_ratio(small).ratio;
  report.check(std::abs(base - scaled) < 1e-3,
               fmt("reward scale x3 at alpha=1e-4: ratio %.6g vs %.6g", base, scaled));
  return report;
}

VerifyReport verify_one_state() {
  VerifyReport report{"one-state", {}};
  constexpr double v0 = 0.25;
  auto simulate = [](Learner& learner, std::size_t length, std::size_t episodes) {
    auto env = make_environment(TaskId::one_state, {length, RewardMode::noisy_eval});
    Rng rng = make_rng(0, 2);
    for (std::size_t e = 0; e < episodes && !learner.diverged(); ++e) {
      env->reset(rng);
      learner.begin_episode();
      while (true) {
        const auto out = env->step(0, rng);
        Transition tr{{1.0}, 0, out.reward, std::nullopt, 0};
        if (!out.terminal) tr.next_state = FeatureVector{1.0};
        learner.observe(tr);
        if (out.terminal) break;
      }
    }
    return learner.values().net(0).weights()[0];
  };
  auto initial = [] {
    ValueFunction vf = ValueFunction::tabular(1);
    const double w[] = {v0};
    vf.set_weights(w);
    return ActionValueFunction(vf);
  };

  double td_err = 0.0;
  double lr_err = 0.0;
  for (double alpha : {0.05, 0.1, 0.3}) {
    for (std::size_t t : {1, 5, 10, 50}) {
      const LearningParams p{alpha, 1.0, 1.0};
      const double td_form = one_state_closed_form(v0, alpha, t, OneStateVariant::td_lambda);
      const double lr_form = one_state_closed_form(v0, alpha, t, OneStateVariant::lambda_return);
      TdLambda td(initial(), p);
      OnlineLambdaReturn online(initial(), p);
      OfflineLambdaReturn offline(initial(), p);
      ForwardTd forward(initial(), p, compute_horizon(1.0, 1.0, 0.01));
      const double v_td = simulate(td, t, 1);
      const double v_on = simulate(online, t, 1);
      const double v_off = simulate(offline, t, 1);
      const double v_fwd = simulate(forward, t, 1);
      report.note(fmt("alpha=%-4g T=%-2zu TD(1) %.15f (closed %.15f)  lambda-return %.15f (closed %.15f)",
                      alpha, t, v_td, td_form, v_on, lr_form));
      td_err = std::max(td_err, std::abs(v_td - td_form));
      for (double v : {v_on, v_off, v_fwd}) lr_err = std::max(lr_err, std::abs(v - lr_form));
    }
  }
  report.check(td_err <= 1e-12, fmt("TD(lambda=1) matches V0 + alpha T (1 - V0): max err %.3g", td_err));
  report.check(lr_err <= 1e-12,
               fmt("online/offline/forward match V0 + (1-(1-alpha)^T)(1 - V0): max err %.3g", lr_err));

  constexpr std::size_t length = 10;
  constexpr std::size_t episodes = 2000;
  for (double alpha_t : {0.5, 1.0, 1.9, 2.1, 3.0}) {
    const double alpha = alpha_t / static_cast<double>(length);
    TdLambda td(initial(), {alpha, 1.0, 1.0});
    simulate(td, length, episodes);
    const bool diverges = std::abs(1.0 - alpha_t) > 1.0;
    report.check(td.diverged() == diverges,
                 fmt("TD(lambda=1), alpha T = %.2g: diverged=%d, repeated recursion %s", alpha_t,
                     td.diverged() ? 1 : 0, diverges ? "diverges" : "converges"));
  }
  OnlineLambdaReturn lr(initial(), {1.0, 1.0, 1.0});
  simulate(lr, length, 200);
  report.check(!lr.diverged(), "lambda-return at alpha = 1 never diverges");
  return report;
}

std::vector<std::string> verify_suite_names() {
  return {"gradcheck", "return-oracle", "equivalence", "theorem1", "one-state"};
}

VerifyReport run_verify(std::string_view suite, std::uint64_t seed) {
  if (suite == "gradcheck") return verify_gradcheck(seed);
  if (suite == "return-oracle") return verify_return_oracle(seed);
  if (suite == "equivalence") return verify_equivalence(seed);
  if (suite == "theorem1") return verify_theorem1(seed);
  if (suite == "one-state") return verify_one_state();
  throw ConfigError("unknown verify suite '" + std::string(suite) + "'");
}

}  // namespace fwdtd
