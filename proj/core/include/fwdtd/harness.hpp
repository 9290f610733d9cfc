#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fwdtd/algorithms.hpp"
#include "fwdtd/analysis.hpp"
#include "fwdtd/approximator.hpp"
#include "fwdtd/envs.hpp"

namespace fwdtd {

/// eta with an optional cap on K. Written "0.01" or "0.01/50" in config files.
struct HorizonSetting {
  double eta = 0.01;
  std::optional<std::size_t> k_max;

  std::string label() const;
  friend bool operator==(const HorizonSetting&, const HorizonSetting&) = default;
};

enum class Metric {
  rms_end_of_episode,  // RMS error after each episode
  rms_per_step,        // RMS error at t = 0 and after every transition
  episode_return,      // undiscounted return of each episode
};

std::string_view to_string(Metric metric);
Metric parse_metric(std::string_view name);
std::string_view to_string(RewardMode mode);
RewardMode parse_reward_mode(std::string_view name);

struct ExperimentConfig {
  std::string name = "custom";
  TaskId task = TaskId::random_walk;
  std::vector<std::string> algorithms{"td0"};
  std::vector<double> lambdas{0.0};
  std::vector<double> alphas{0.1};
  std::vector<HorizonSetting> horizons{HorizonSetting{}};
  double epsilon = 0.05;
  std::size_t episodes = 10;
  std::size_t runs = 10;
  std::uint64_t seed = 0;
  ApproximatorKind approximator = ApproximatorKind::tabular;
  std::size_t hidden = 50;
  double init_range = 0.1;
  RewardMode reward_mode = RewardMode::noisy_eval;
  std::size_t episode_length = 10;  // one-state task
  std::size_t max_steps = 100000;   // reaching the cap ends the episode as if terminal
  Metric metric = Metric::rms_end_of_episode;
  bool normalize = true;            // divide RMS errors by the error before learning
  double error_cap = 1e3;
  std::size_t truth_rollouts = 200;
  std::size_t truth_visit_rollouts = 1000;
  std::size_t threads = 1;

  /// Throws ConfigError on the first out-of-range value.
  void validate() const;
};

/// Parses `key = value` lines; `#` starts a comment. Lists are comma separated;
/// `alpha` also accepts logspace(lo, hi, n).
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string format_config(const ExperimentConfig& config);

std::vector<double> logspace(double lo, double hi, std::size_t n);

std::vector<std::string> preset_names();
/// Built-in configuration; `scale` multiplies the number of runs (never below 10
/// when scaling down).
ExperimentConfig preset(std::string_view name, double scale = 1.0);

struct SweepPoint {
  std::string algorithm;
  double lambda = 0.0;
  double alpha = 0.0;
  HorizonSetting horizon;
};

/// Cartesian product algorithm x lambda x horizon x alpha, in that nesting order.
/// Algorithms other than forward TD ignore the horizon and get a single entry.
std::vector<SweepPoint> sweep_points(const ExperimentConfig& config);

struct ResultRow {
  std::string task;
  std::string algorithm;
  double lambda = 0.0;
  double alpha = 0.0;
  double eta = 0.0;
  std::string k_max;  // empty when unbounded
  std::string k;      // forward TD only: "inf" or the integer delay
  double epsilon = 0.0;
  std::size_t episodes = 0;
  std::string approximator;
  std::size_t hidden = 0;
  double init_range = 0.0;
  std::size_t run = 0;
  std::uint64_t run_seed = 0;
  double aggregate = 0.0;
  bool diverged = false;
  std::vector<double> curve;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

struct ResultTable {
  std::vector<ResultRow> rows;
  friend bool operator==(const ResultTable&, const ResultTable&) = default;
};

/// Ground truth used by the RMS metric of a prediction task.
TrueValueTable truth_for(const ExperimentConfig& config);

/// One run of one sweep point. `truth` is required for RMS metrics.
ResultRow run_single(const ExperimentConfig& config, const SweepPoint& point, std::size_t run,
                     const TrueValueTable* truth);

/// Validates the config, then executes runs x sweep points. Rows are ordered by
/// sweep point, then run index, independent of the thread count.
ResultTable run_experiment(const ExperimentConfig& config);

inline constexpr std::string_view kResultCsvHeader =
    "task,algorithm,lambda,alpha,eta,k_max,K,epsilon,episodes,approximator,hidden,init_range,"
    "run,run_seed,aggregate,diverged,curve";

void emit_csv(const ResultTable& table, std::ostream& out);
void emit_csv(const ResultTable& table, const std::filesystem::path& path);
ResultTable parse_csv(std::istream& in);

struct SummaryRow {
  std::string task;
  std::string algorithm;
  double lambda = 0.0;
  double alpha = 0.0;
  double eta = 0.0;
  std::string k_max;
  std::string k;
  std::size_t runs = 0;
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t diverged_runs = 0;
  bool best_alpha = false;  // best mean over the alpha sweep of its (algorithm, lambda, eta, k_max) group
};

/// Mean and standard error of the run aggregates per sweep point. Lower is better
/// unless `higher_is_better`.
std::vector<SummaryRow> summarize(const ResultTable& table, bool higher_is_better);
void emit_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out);

/// Best-alpha summary row of a group, or nullptr.
const SummaryRow* best_alpha_row(const std::vector<SummaryRow>& rows, std::string_view algorithm,
                                 double lambda);

}  // namespace fwdtd
