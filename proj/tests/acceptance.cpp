// Acceptance checks. Prints one PASS/FAIL line per criterion; exit status 0
// only when every criterion passes. Pass --verbose for the underlying numbers.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fwdtd/harness.hpp"
#include "fwdtd/verify.hpp"

namespace {

using namespace fwdtd;

constexpr std::uint64_t kSeed = 1;
bool verbose = false;
int failures = 0;

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

void detail(const std::string& line) {
  if (verbose) std::printf("      %s\n", line.c_str());
}

void report(int id, const char* title, bool ok, const std::string& summary, double seconds) {
  std::printf("%s  %2d  %-28s %s (%.1f s)\n", ok ? "PASS" : "FAIL", id, title, summary.c_str(),
              seconds);
  std::fflush(stdout);
  if (!ok) ++failures;
}

void verify_criterion(int id, const char* title, std::string_view suite, double budget) {
  Stopwatch clock;
  const VerifyReport r = run_verify(suite, kSeed);
  const double t = clock.seconds();
  for (const auto& line : r.lines) detail(line);
  report(id, title, r.passed() && t < budget,
         fmt("%zu/%zu checks, budget %.0f s", r.checks - r.failures, r.checks, budget), t);
}

std::vector<SummaryRow> rows_of(const std::vector<SummaryRow>& all, const std::string& algorithm,
                                double lambda) {
  std::vector<SummaryRow> out;
  for (const auto& r : all) {
    if (r.algorithm == algorithm && r.lambda == lambda) out.push_back(r);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.alpha < b.alpha; });
  return out;
}

void dump(const std::vector<SummaryRow>& rows) {
  for (const auto& r : rows) {
    detail(fmt("%-22s lambda=%-5g alpha=%-10.4g mean=%-12.6g se=%-10.4g diverged=%zu/%zu%s",
               r.algorithm.c_str(), r.lambda, r.alpha, r.mean, r.std_error, r.diverged_runs,
               r.runs, r.best_alpha ? "  best" : ""));
  }
}

// a beats b at one standard error of the difference; `higher` selects the direction.
bool beats(const SummaryRow& a, const SummaryRow& b, bool higher) {
  const double se = std::hypot(a.std_error, b.std_error);
  return higher ? a.mean - b.mean > se : b.mean - a.mean > se;
}

void criterion_fig2() {
  Stopwatch clock;
  const auto cfg = preset("fig2");
  const auto rows = summarize(run_experiment(cfg), false);
  dump(rows);
  const auto lr = rows_of(rows, "online_lambda_return", 1.0);
  const auto td = rows_of(rows, "td_lambda", 1.0);

  bool monotone = true;
  for (std::size_t i = 1; i < lr.size(); ++i) monotone = monotone && lr[i].mean <= lr[i - 1].mean;
  std::size_t cross = td.size();
  while (cross > 0 && td[cross - 1].mean > lr[cross - 1].mean) --cross;
  const bool crossover = cross < td.size() && td[cross].alpha < 0.3;
  const bool diverges = td.back().diverged_runs > 0;
  const double t = clock.seconds();
  report(6, "one-state alpha sweep", monotone && crossover && diverges && t < 120,
         fmt("lambda-return non-increasing=%s, crossover alpha=%.3g, TD diverged %zu/%zu at alpha=%g",
             monotone ? "yes" : "no", cross < td.size() ? td[cross].alpha : NAN,
             td.back().diverged_runs, td.back().runs, td.back().alpha),
         t);
}

// Episode lengths of each run; the random walk trajectory does not depend on the learner.
std::vector<std::size_t> walk_episode_lengths(std::uint64_t run_seed, std::size_t episodes) {
  auto env = make_environment(TaskId::random_walk);
  Rng rng = make_rng(run_seed, 2);
  std::vector<std::size_t> lengths;
  for (std::size_t e = 0; e < episodes; ++e) {
    env->reset(rng);
    std::size_t n = 0;
    bool done = false;
    while (!done) {
      done = env->step(env->evaluation_action(), rng).terminal;
      ++n;
    }
    lengths.push_back(n);
  }
  return lengths;
}

void criterion_fig1() {
  Stopwatch clock;
  const auto cfg = preset("fig1");
  const auto table = run_experiment(cfg);

  std::map<std::string, double> final_error;
  bool offline_piecewise = true;
  std::vector<double> episode_start(cfg.episodes, 0.0);
  std::vector<double> episode_end(cfg.episodes, 0.0);
  double online_step_change = 0.0;
  std::size_t online_steps = 0;
  std::size_t consistent = 0;
  for (const auto& row : table.rows) {
    final_error[row.algorithm] += row.curve.back() / static_cast<double>(cfg.runs);
    const auto lengths = walk_episode_lengths(row.run_seed, cfg.episodes);
    std::size_t total = 0;
    for (auto n : lengths) total += n;
    if (row.curve.size() != total + 1) continue;
    ++consistent;
    std::size_t start = 0;
    for (std::size_t e = 0; e < lengths.size(); ++e) {
      const std::size_t n = lengths[e];
      const std::size_t end = start + n;  // curve[end] is the error right after termination
      if (row.algorithm == "offline_lambda_return") {
        for (std::size_t j = start + 1; j < end; ++j) {
          offline_piecewise = offline_piecewise && row.curve[j] == row.curve[start];
        }
        offline_piecewise = offline_piecewise && row.curve[end] != row.curve[start];
      } else if (row.algorithm == "online_lambda_return") {
        episode_start[e] += row.curve[start] / static_cast<double>(cfg.runs);
        episode_end[e] += row.curve[end] / static_cast<double>(cfg.runs);
        for (std::size_t j = start + 1; j <= end; ++j) {
          online_step_change += row.curve[j] - row.curve[j - 1];
          ++online_steps;
        }
      }
      start = end;
    }
  }
  // Single runs are noisy; the learning curve is the average over runs.
  bool online_episode_drop = true;
  for (std::size_t e = 0; e < cfg.episodes; ++e) {
    detail(fmt("online episode %zu: run-averaged error %.6g -> %.6g", e + 1, episode_start[e],
               episode_end[e]));
    online_episode_drop = online_episode_drop && episode_end[e] < episode_start[e];
  }
  const double online_mean_change = online_step_change / static_cast<double>(online_steps);
  const double online = final_error["online_lambda_return"];
  const double td = final_error["td_lambda"];
  detail(fmt("final mean error: online %.6g, offline %.6g, TD %.6g", online,
             final_error["offline_lambda_return"], td));
  detail(fmt("online mean per-step change within episodes: %.6g", online_mean_change));
  const bool ok = consistent == table.rows.size() && offline_piecewise && online_episode_drop &&
                  online_mean_change < 0.0 && online < td;
  const double t = clock.seconds();
  report(7, "random-walk learning curves", ok && t < 120,
         fmt("offline step-constant=%s, run-averaged online error drops each episode=%s, final online %.4f < TD %.4f",
             offline_piecewise ? "yes" : "no", online_episode_drop ? "yes" : "no", online, td),
         t);
}

void criterion_control_and_divergence() {
  Stopwatch clock;

  auto mc = preset("fig3-left");
  mc.algorithms = {"td_lambda", "forward_td"};
  mc.runs = 20;
  mc.seed = kSeed;
  const auto mc_rows = summarize(run_experiment(mc), false);
  dump(mc_rows);
  const auto td = rows_of(mc_rows, "td_lambda", 0.9);
  const auto fwd = rows_of(mc_rows, "forward_td", 0.9);
  double split_alpha = NAN;
  for (std::size_t i = 0; i < td.size(); ++i) {
    const bool td_diverges = 2 * td[i].diverged_runs > td[i].runs;
    const bool fwd_stable = 10 * fwd[i].diverged_runs < fwd[i].runs;
    if (td_diverges && fwd_stable) {
      split_alpha = td[i].alpha;
      break;
    }
  }
  const bool a = !std::isnan(split_alpha);
  const SummaryRow* td_best = best_alpha_row(mc_rows, "td_lambda", 0.9);
  const SummaryRow* fwd_best = best_alpha_row(mc_rows, "forward_td", 0.9);
  const bool b = td_best && fwd_best && beats(*fwd_best, *td_best, false);

  auto cp = preset("fig4-cartpole");
  cp.episodes = 200;
  cp.runs = 20;
  cp.seed = kSeed;
  cp.algorithms = {"forward_sarsa"};
  cp.lambdas = {0.0, 0.4, 0.6, 0.8};
  auto cp_rows = summarize(run_experiment(cp), true);
  cp.algorithms = {"sarsa_lambda"};
  cp.lambdas = {0.0, 0.9};
  for (auto& r : summarize(run_experiment(cp), true)) cp_rows.push_back(r);
  dump(cp_rows);

  const SummaryRow* fwd0 = best_alpha_row(cp_rows, "forward_sarsa", 0.0);
  const SummaryRow* fwd_top = nullptr;
  for (double lambda : {0.4, 0.6, 0.8}) {
    const SummaryRow* r = best_alpha_row(cp_rows, "forward_sarsa", lambda);
    if (r && (!fwd_top || r->mean > fwd_top->mean)) fwd_top = r;
  }
  const SummaryRow* sarsa0 = best_alpha_row(cp_rows, "sarsa_lambda", 0.0);
  const SummaryRow* sarsa9 = best_alpha_row(cp_rows, "sarsa_lambda", 0.9);
  const bool c1 = fwd0 && fwd_top && beats(*fwd_top, *fwd0, true);
  const bool c2 = sarsa0 && sarsa9 && beats(*sarsa0, *sarsa9, true);

  const double t = clock.seconds();
  std::string summary =
      fmt("(a) %s", a ? fmt("split at alpha=%.3g", split_alpha).c_str() : "no split alpha");
  if (td_best && fwd_best) {
    summary += fmt("; (b) best RMS forward %.4g+-%.2g vs TD %.4g+-%.2g", fwd_best->mean,
                   fwd_best->std_error, td_best->mean, td_best->std_error);
  }
  if (fwd0 && fwd_top && sarsa0 && sarsa9) {
    summary += fmt("; (c) forward lambda=%g %.1f+-%.1f vs lambda=0 %.1f+-%.1f, Sarsa(0.9) %.1f+-%.1f vs "
                   "Sarsa(0) %.1f+-%.1f",
                   fwd_top->lambda, fwd_top->mean, fwd_top->std_error, fwd0->mean, fwd0->std_error,
                   sarsa9->mean, sarsa9->std_error, sarsa0->mean, sarsa0->std_error);
  }
  detail(fmt("(a) %s  (b) %s  (c1) %s  (c2) %s", a ? "ok" : "fail", b ? "ok" : "fail",
             c1 ? "ok" : "fail", c2 ? "ok" : "fail"));
  report(8, "reduced-scale control", a && b && c1 && c2 && t < 1800, summary, t);
}

void criterion_counters() {
  Stopwatch clock;
  bool ok = true;
  std::size_t episodes_checked = 0;
  auto env = make_environment(TaskId::mountain_car);
  Rng init = make_rng(kSeed, 1);
  Rng env_rng = make_rng(kSeed, 2);
  for (double lambda : {0.5, 0.9, 0.98}) {
    const Horizon horizon = compute_horizon(1.0, lambda, 0.01);
    const std::size_t k = horizon.k();
    auto net = ValueFunction::mlp(2, 50);
    net.initialize_uniform(0.1, init);
    ForwardTd fwd(ActionValueFunction(std::move(net)), {1e-3, 1.0, lambda}, horizon);
    const ValueFunction& v = fwd.values().net(0);
    for (int e = 0; e < 3; ++e) {
      env->reset(env_rng);
      fwd.begin_episode();
      FeatureVector x = env->features();
      for (std::size_t t = 0;; ++t) {
        const StepResult out = env->step(env->evaluation_action(), env_rng);
        Transition tr;
        tr.state = x;
        tr.reward = out.reward;
        if (!out.terminal) {
          x = env->features();
          tr.next_state = x;
        }
        const OpCounters before = v.counters();
        fwd.step(tr);
        const OpCounters after = v.counters();
        const std::size_t evals = after.evaluations - before.evaluations;
        const std::size_t updates = after.updates - before.updates;
        ok = ok && evals == (out.terminal ? 0u : 1u);
        ok = ok && updates == (t + 1 >= k ? 1u : 0u);
        ok = ok && fwd.fifo_size() <= k;
        if (out.terminal) {
          const std::size_t remainder = fwd.fifo_size();
          const std::size_t steps = t + 1;
          const std::size_t before_flush = v.counters().updates;
          fwd.flush();
          const std::size_t flushed = v.counters().updates - before_flush;
          ok = ok && flushed == remainder && flushed == std::min(steps, k - 1) &&
               fwd.fifo_size() == 0;
          detail(fmt("lambda=%g K=%zu episode of %zu steps: %zu flush updates", lambda, k, steps,
                     flushed));
          break;
        }
      }
      ++episodes_checked;
    }
  }
  report(9, "forward TD per-step cost", ok,
         fmt("%zu mountain-car episodes, K in {7, 44, 228}", episodes_checked), clock.seconds());
}

void criterion_determinism() {
  Stopwatch clock;
  bool ok = true;
  std::vector<ExperimentConfig> configs{preset("fig1"), preset("fig2")};
  auto cp = preset("fig4-cartpole", 0.05);
  cp.episodes = 5;
  configs.push_back(cp);
  auto mc = preset("fig3-right", 0.05);
  mc.episodes = 2;
  configs.push_back(mc);
  for (auto cfg : configs) {
    std::ostringstream a;
    std::ostringstream b;
    std::ostringstream c;
    emit_csv(run_experiment(cfg), a);
    emit_csv(run_experiment(cfg), b);
    cfg.threads = 4;
    emit_csv(run_experiment(cfg), c);
    const bool same = a.str() == b.str() && a.str() == c.str();
    detail(fmt("%s: %zu bytes, identical=%s", cfg.name.c_str(), a.str().size(), same ? "yes" : "no"));
    ok = ok && same && !a.str().empty();
  }
  report(10, "bit-identical reruns", ok, "fig1, fig2, reduced fig4-cartpole and fig3-right",
         clock.seconds());
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) verbose = verbose || std::strcmp(argv[i], "--verbose") == 0;
  try {
    verify_criterion(1, "gradient correctness", "gradcheck", 10);
    verify_criterion(2, "return calculus oracle", "return-oracle", 30);
    verify_criterion(3, "equivalence matrix", "equivalence", 60);
    verify_criterion(4, "one-state closed forms", "one-state", 60);
    verify_criterion(5, "step-size limit ratio", "theorem1", 60);
    criterion_fig2();
    criterion_fig1();
    criterion_control_and_divergence();
    criterion_counters();
    criterion_determinism();
  } catch (const std::exception& e) {
    std::printf("FAIL  error: %s\n", e.what());
    return 1;
  }
  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
