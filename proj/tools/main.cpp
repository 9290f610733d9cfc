#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "fwdtd/analysis.hpp"
#include "fwdtd/error.hpp"
#include "fwdtd/harness.hpp"
#include "fwdtd/verify.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kUsage = 2;

struct Common {
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string summary;
  std::size_t threads = 0;
};

int execute(fwdtd::ExperimentConfig cfg, const Common& opts) {
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.threads) cfg.threads = opts.threads;
  cfg.validate();
  const auto table = fwdtd::run_experiment(cfg);
  const auto summary = fwdtd::summarize(table, cfg.metric == fwdtd::Metric::episode_return);
  if (opts.out.empty()) {
    fwdtd::emit_csv(table, std::cout);
  } else {
    fwdtd::emit_csv(table, std::filesystem::path(opts.out));
    fwdtd::emit_summary_csv(summary, std::cout);
  }
  if (!opts.summary.empty()) {
    std::ofstream s(opts.summary, std::ios::binary);
    fwdtd::emit_summary_csv(summary, s);
  }
  return kOk;
}

int true_values(const std::string& task_name, const Common& opts, std::size_t rollouts) {
  fwdtd::ExperimentConfig cfg;
  cfg.task = fwdtd::parse_task(task_name);
  if (cfg.task == fwdtd::TaskId::mountain_car) cfg.truth_rollouts = rollouts;
  if (opts.seed) cfg.seed = *opts.seed;
  const auto table = fwdtd::truth_for(cfg);
  if (opts.out.empty()) {
    fwdtd::write_true_values_csv(table, std::cout);
  } else {
    std::ofstream out(opts.out, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + opts.out + "' for writing");
    fwdtd::write_true_values_csv(table, out);
  }
  return kOk;
}

int verify(const std::string& suite, const Common& opts) {
  const auto report = fwdtd::run_verify(suite, opts.seed.value_or(0));
  std::cout << "verify " << report.suite << '\n';
  for (const auto& line : report.lines) std::cout << line << '\n';
  std::cout << (report.passed() ? "PASS" : "FAIL") << ' ' << report.checks - report.failures << '/'
            << report.checks << " checks\n";
  return report.passed() ? kOk : kVerifyFailed;
}

void add_common(CLI::App* cmd, Common& opts, bool outputs) {
  cmd->add_option("--seed", opts.seed, "Master seed");
  cmd->add_option("--out", opts.out, "Output CSV path (default: stdout)");
  if (outputs) {
    cmd->add_option("--summary", opts.summary, "Also write the per-sweep-point summary CSV here");
    cmd->add_option("--threads", opts.threads, "Worker threads for the runs");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Forward TD(lambda) experiments and verification suites"};
  app.require_subcommand(1);

  Common opts;
  std::string config_path;
  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("config", config_path, "key = value config file")->required();
  add_common(run, opts, true);

  std::string preset_name;
  double scale = 1.0;
  bool print_config = false;
  auto* preset = app.add_subcommand("preset", "Run a built-in experiment");
  preset->add_option("name", preset_name, "Preset name")
      ->required()
      ->check(CLI::IsMember(fwdtd::preset_names()));
  preset->add_option("--scale", scale, "Multiply the number of runs (at least 10 when < 1)")
      ->check(CLI::PositiveNumber);
  preset->add_flag("--print-config", print_config, "Print the preset as a config file and exit");
  add_common(preset, opts, true);

  std::string suite;
  auto* verify_cmd = app.add_subcommand("verify", "Run a verification suite");
  verify_cmd->add_option("suite", suite, "Suite name")
      ->required()
      ->check(CLI::IsMember(fwdtd::verify_suite_names()));
  verify_cmd->add_option("--seed", opts.seed, "Seed");

  std::string task;
  std::size_t rollouts = 200;
  auto* truth = app.add_subcommand("true-values", "Print the ground-truth value table of a task");
  truth->add_option("task", task, "random_walk, one_state or mountain_car")->required();
  truth->add_option("--rollouts", rollouts, "Monte Carlo returns per state (mountain_car)");
  add_common(truth, opts, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return execute(fwdtd::load_config(config_path), opts);
    if (*preset) {
      auto cfg = fwdtd::preset(preset_name, scale);
      if (print_config) {
        if (opts.seed) cfg.seed = *opts.seed;
        std::cout << fwdtd::format_config(cfg);
        return kOk;
      }
      return execute(cfg, opts);
    }
    if (*verify_cmd) return verify(suite, opts);
    if (*truth) return true_values(task, opts, rollouts);
  } catch (const fwdtd::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kVerifyFailed;
  }
  return kUsage;
}
