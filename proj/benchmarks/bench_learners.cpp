#include <benchmark/benchmark.h>

#include <vector>

#include "fwdtd/algorithms.hpp"
#include "fwdtd/envs.hpp"

namespace {

using namespace fwdtd;

// One mountain-car evaluation episode, recorded once and replayed per iteration.
const std::vector<Transition>& mountain_car_episode() {
  static const std::vector<Transition> episode = [] {
    std::vector<Transition> out;
    auto env = make_environment(TaskId::mountain_car);
    Rng rng = make_rng(0, 2);
    env->reset(rng);
    FeatureVector x = env->features();
    while (true) {
      const StepResult r = env->step(env->evaluation_action(), rng);
      Transition tr;
      tr.state = x;
      tr.reward = r.reward;
      if (!r.terminal) {
        x = env->features();
        tr.next_state = x;
      }
      out.push_back(std::move(tr));
      if (r.terminal) return out;
    }
  }();
  return episode;
}

std::unique_ptr<Learner> learner(AlgorithmId id, double lambda, Horizon horizon, std::size_t hidden) {
  auto net = ValueFunction::mlp(2, hidden);
  Rng rng = make_rng(1, 1);
  net.initialize_uniform(0.1, rng);
  return make_learner(id, ActionValueFunction(std::move(net)), {1e-3, 1.0, lambda}, horizon);
}

void run_episodes(benchmark::State& state, Learner& l) {
  const auto& episode = mountain_car_episode();
  for (auto _ : state) {
    l.begin_episode();
    for (const auto& tr : episode) l.observe(tr);
    benchmark::DoNotOptimize(l.values().net(0).weights().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(episode.size()));
}

void BM_TdZero(benchmark::State& state) {
  auto l = learner(AlgorithmId::td0, 0.0, Horizon::bounded(1), state.range(0));
  run_episodes(state, *l);
}

void BM_TdLambda(benchmark::State& state) {
  auto l = learner(AlgorithmId::td_lambda, 0.9, Horizon::bounded(1), state.range(0));
  run_episodes(state, *l);
}

void BM_ForwardTd(benchmark::State& state) {
  auto l = learner(AlgorithmId::forward_td, 0.9, compute_horizon(1.0, 0.9, 0.01), state.range(0));
  run_episodes(state, *l);
}

void BM_ForwardTdEpisodic(benchmark::State& state) {
  auto l = learner(AlgorithmId::forward_td, 0.9, Horizon::episodic(), state.range(0));
  run_episodes(state, *l);
}

void BM_OfflineLambdaReturn(benchmark::State& state) {
  auto l = learner(AlgorithmId::offline_lambda_return, 0.9, Horizon::episodic(), state.range(0));
  run_episodes(state, *l);
}

void BM_OnlineLambdaReturn(benchmark::State& state) {
  auto l = learner(AlgorithmId::online_lambda_return, 0.9, Horizon::episodic(), state.range(0));
  run_episodes(state, *l);
}

}  // namespace

BENCHMARK(BM_TdZero)->Arg(10)->Arg(50);
BENCHMARK(BM_TdLambda)->Arg(10)->Arg(50);
BENCHMARK(BM_ForwardTd)->Arg(10)->Arg(50);
BENCHMARK(BM_ForwardTdEpisodic)->Arg(10)->Arg(50);
BENCHMARK(BM_OfflineLambdaReturn)->Arg(10)->Arg(50);
BENCHMARK(BM_OnlineLambdaReturn)->Arg(50);
BENCHMARK_MAIN();
