#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fwdtd/error.hpp"
#include "fwdtd/harness.hpp"

namespace fwdtd {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double parse_double(std::string_view key, std::string_view text) {
  const std::string s(text);
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw ConfigError("'" + std::string(key) + "': not a number: '" + s + "'");
  }
  return value;
}

std::uint64_t parse_unsigned(std::string_view key, std::string_view text) {
  std::uint64_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ConfigError("'" + std::string(key) + "': not a non-negative integer: '" +
                      std::string(text) + "'");
  }
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("'" + std::string(key) + "': expected true or false");
}

std::vector<double> parse_double_list(std::string_view key, std::string_view text) {
  if (text.starts_with("logspace(") && text.ends_with(")")) {
    const auto args = split(text.substr(9, text.size() - 10), ',');
    if (args.size() != 3) throw ConfigError("logspace takes (lo, hi, n)");
    return logspace(parse_double(key, args[0]), parse_double(key, args[1]),
                    parse_unsigned(key, args[2]));
  }
  std::vector<double> out;
  for (auto part : split(text, ',')) out.push_back(parse_double(key, part));
  return out;
}

HorizonSetting parse_horizon(std::string_view text) {
  HorizonSetting h;
  const auto slash = text.find('/');
  h.eta = parse_double("eta", trim(text.substr(0, slash)));
  if (slash != std::string_view::npos) h.k_max = parse_unsigned("eta", trim(text.substr(slash + 1)));
  return h;
}

// Shortest text that parses back to the same double.
std::string fmt_double(double x) {
  char buf[32];
  const auto end = std::to_chars(buf, buf + sizeof buf, x).ptr;
  return std::string(buf, end);
}

template <typename T, typename F>
std::string join(const std::vector<T>& items, F&& to_text) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += to_text(items[i]);
  }
  return out;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

std::string HorizonSetting::label() const {
  return k_max ? fmt_double(eta) + "/" + std::to_string(*k_max) : fmt_double(eta);
}

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::rms_end_of_episode: return "rms_end_of_episode";
    case Metric::rms_per_step: return "rms_per_step";
    case Metric::episode_return: return "return";
  }
  return "unknown";
}

Metric parse_metric(std::string_view name) {
  if (name == "rms_end_of_episode") return Metric::rms_end_of_episode;
  if (name == "rms_per_step") return Metric::rms_per_step;
  if (name == "return") return Metric::episode_return;
  throw ConfigError("unknown metric '" + std::string(name) + "'");
}

std::string_view to_string(RewardMode mode) {
  return mode == RewardMode::noisy_eval ? "noisy_eval" : "unit_control";
}

RewardMode parse_reward_mode(std::string_view name) {
  if (name == "noisy_eval") return RewardMode::noisy_eval;
  if (name == "unit_control") return RewardMode::unit_control;
  throw ConfigError("unknown reward mode '" + std::string(name) + "'");
}

std::vector<double> logspace(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0 && hi >= lo) || n == 0) throw ConfigError("logspace needs 0 < lo <= hi and n >= 1");
  if (n == 1) return {lo};
  std::vector<double> out(n);
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

void ExperimentConfig::validate() const {
  require(!algorithms.empty(), "algorithm list is empty");
  require(!lambdas.empty(), "lambda list is empty");
  require(!alphas.empty(), "alpha list is empty");
  require(!horizons.empty(), "eta list is empty");
  for (const auto& a : algorithms) parse_algorithm(a);
  for (double l : lambdas) require(l >= 0.0 && l <= 1.0, "lambda must lie in [0, 1]");
  for (double a : alphas) require(a > 0.0 && std::isfinite(a), "alpha must be positive");
  for (const auto& h : horizons) {
    require(h.eta > 0.0 && h.eta < 1.0, "eta must lie in (0, 1)");
    require(!h.k_max || *h.k_max > 0, "K_max must be positive");
  }
  require(epsilon >= 0.0 && epsilon <= 1.0, "epsilon must lie in [0, 1]");
  require(episodes > 0, "episodes must be positive");
  require(runs > 0, "runs must be positive");
  require(hidden > 0, "hidden must be positive");
  require(init_range >= 0.0 && std::isfinite(init_range), "init_range must be >= 0");
  require(episode_length > 0, "episode_length must be positive");
  require(max_steps > 0, "max_steps must be positive");
  require(error_cap > 0.0, "error_cap must be positive");
  require(truth_rollouts >= 2, "truth_rollouts must be >= 2");
  require(truth_visit_rollouts > 0, "truth_visit_rollouts must be positive");
  require(threads > 0, "threads must be positive");
  const bool tabular_task = task == TaskId::random_walk || task == TaskId::one_state;
  require(approximator != ApproximatorKind::tabular || tabular_task,
          "tabular approximator requires a discrete task");
  const bool control = task == TaskId::cart_pole ||
                       (task == TaskId::mountain_car && reward_mode == RewardMode::unit_control);
  if (control) {
    require(metric == Metric::episode_return, "control tasks report metric = return");
  } else {
    require(metric != Metric::episode_return, "prediction tasks report an RMS metric");
  }
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::optional<std::size_t> shared_k_max;
  std::size_t line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (value.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty value");

    if (key == "name") {
      cfg.name = std::string(value);
    } else if (key == "task") {
      cfg.task = parse_task(value);
    } else if (key == "algorithm" || key == "algorithms") {
      cfg.algorithms.clear();
      for (auto part : split(value, ',')) cfg.algorithms.emplace_back(part);
    } else if (key == "lambda") {
      cfg.lambdas = parse_double_list(key, value);
    } else if (key == "alpha") {
      cfg.alphas = parse_double_list(key, value);
    } else if (key == "eta") {
      cfg.horizons.clear();
      for (auto part : split(value, ',')) cfg.horizons.push_back(parse_horizon(part));
    } else if (key == "k_max") {
      if (value != "none") shared_k_max = parse_unsigned(key, value);
    } else if (key == "epsilon") {
      cfg.epsilon = parse_double(key, value);
    } else if (key == "episodes") {
      cfg.episodes = parse_unsigned(key, value);
    } else if (key == "runs") {
      cfg.runs = parse_unsigned(key, value);
    } else if (key == "seed") {
      cfg.seed = parse_unsigned(key, value);
    } else if (key == "approximator") {
      cfg.approximator = parse_approximator_kind(value);
    } else if (key == "hidden") {
      cfg.hidden = parse_unsigned(key, value);
    } else if (key == "init_range") {
      cfg.init_range = parse_double(key, value);
    } else if (key == "reward_mode") {
      cfg.reward_mode = parse_reward_mode(value);
    } else if (key == "episode_length") {
      cfg.episode_length = parse_unsigned(key, value);
    } else if (key == "max_steps") {
      cfg.max_steps = parse_unsigned(key, value);
    } else if (key == "metric") {
      cfg.metric = parse_metric(value);
    } else if (key == "normalize") {
      cfg.normalize = parse_bool(key, value);
    } else if (key == "error_cap") {
      cfg.error_cap = parse_double(key, value);
    } else if (key == "truth_rollouts") {
      cfg.truth_rollouts = parse_unsigned(key, value);
    } else if (key == "truth_visit_rollouts") {
      cfg.truth_visit_rollouts = parse_unsigned(key, value);
    } else if (key == "threads") {
      cfg.threads = parse_unsigned(key, value);
    } else {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
    }
  }
  if (shared_k_max) {
    for (auto& h : cfg.horizons) {
      if (!h.k_max) h.k_max = shared_k_max;
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string format_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "name = " << c.name << '\n'
      << "task = " << to_string(c.task) << '\n'
      << "algorithm = " << join(c.algorithms, [](const std::string& s) { return s; }) << '\n'
      << "lambda = " << join(c.lambdas, fmt_double) << '\n'
      << "alpha = " << join(c.alphas, fmt_double) << '\n'
      << "eta = " << join(c.horizons, [](const HorizonSetting& h) { return h.label(); }) << '\n'
      << "epsilon = " << fmt_double(c.epsilon) << '\n'
      << "episodes = " << c.episodes << '\n'
      << "runs = " << c.runs << '\n'
      << "seed = " << c.seed << '\n'
      << "approximator = " << to_string(c.approximator) << '\n'
      << "hidden = " << c.hidden << '\n'
      << "init_range = " << fmt_double(c.init_range) << '\n'
      << "reward_mode = " << to_string(c.reward_mode) << '\n'
      << "episode_length = " << c.episode_length << '\n'
      << "max_steps = " << c.max_steps << '\n'
      << "metric = " << to_string(c.metric) << '\n'
      << "normalize = " << (c.normalize ? "true" : "false") << '\n'
      << "error_cap = " << fmt_double(c.error_cap) << '\n'
      << "truth_rollouts = " << c.truth_rollouts << '\n'
      << "truth_visit_rollouts = " << c.truth_visit_rollouts << '\n'
      << "threads = " << c.threads << '\n';
  return out.str();
}

std::vector<std::string> preset_names() {
  return {"fig1", "fig2", "fig3-left", "fig3-right", "fig4-mc", "fig4-cartpole"};
}

ExperimentConfig preset(std::string_view name, double scale) {
  if (!(scale > 0.0)) throw ConfigError("scale must be positive");
  ExperimentConfig c;
  c.name = std::string(name);
  const std::vector<double> control_lambdas{0.0, 0.2, 0.4, 0.6, 0.8, 0.9, 1.0};
  if (name == "fig1") {
    c.task = TaskId::random_walk;
    c.algorithms = {"td_lambda", "online_lambda_return", "offline_lambda_return"};
    c.lambdas = {1.0};
    c.alphas = {0.2};
    c.episodes = 3;
    c.runs = 50;
    c.approximator = ApproximatorKind::tabular;
    c.init_range = 0.0;
    c.metric = Metric::rms_per_step;
  } else if (name == "fig2") {
    c.task = TaskId::one_state;
    c.algorithms = {"td_lambda", "online_lambda_return"};
    c.lambdas = {1.0};
    c.alphas = logspace(0.01, 1.0, 12);
    c.episodes = 10;
    c.runs = 100;
    c.approximator = ApproximatorKind::tabular;
    c.init_range = 0.1;
    c.episode_length = 10;
    c.metric = Metric::rms_end_of_episode;
    c.normalize = false;
  } else if (name == "fig3-left") {
    c.task = TaskId::mountain_car;
    c.algorithms = {"td_lambda", "forward_td", "online_lambda_return", "offline_lambda_return"};
    c.lambdas = {0.9};
    c.alphas = logspace(1e-4, 0.1, 12);
    c.horizons = {{0.01, std::nullopt}};
    c.episodes = 50;
    c.runs = 50;
    c.approximator = ApproximatorKind::mlp;
  } else if (name == "fig3-right") {
    c.task = TaskId::mountain_car;
    c.algorithms = {"forward_td"};
    c.lambdas = {0.0, 0.3, 0.6, 0.8, 0.9, 0.95, 0.98, 1.0};
    c.alphas = {0.015};
    c.horizons = {{0.01, std::nullopt}, {0.1, std::nullopt}, {0.3, std::nullopt}, {0.01, 50}};
    c.episodes = 50;
    c.runs = 200;
    c.approximator = ApproximatorKind::mlp;
  } else if (name == "fig4-mc") {
    c.task = TaskId::mountain_car;
    c.reward_mode = RewardMode::unit_control;
    c.algorithms = {"sarsa_lambda", "forward_sarsa"};
    c.lambdas = control_lambdas;
    c.alphas = logspace(1e-3, 0.1, 12);
    c.episodes = 50;
    c.runs = 200;
    c.max_steps = 5000;
    c.approximator = ApproximatorKind::mlp;
    c.metric = Metric::episode_return;
  } else if (name == "fig4-cartpole") {
    c.task = TaskId::cart_pole;
    c.algorithms = {"sarsa_lambda", "forward_sarsa"};
    c.lambdas = control_lambdas;
    c.alphas = logspace(1e-3, 0.1, 12);
    c.episodes = 1000;
    c.runs = 200;
    c.approximator = ApproximatorKind::mlp;
    c.init_range = 2.0;
    c.metric = Metric::episode_return;
  } else {
    throw ConfigError("unknown preset '" + std::string(name) + "'");
  }
  const double scaled = std::round(static_cast<double>(c.runs) * scale);
  c.runs = scale < 1.0 ? std::max<std::size_t>(10, static_cast<std::size_t>(scaled))
                       : static_cast<std::size_t>(scaled);
  return c;
}

}  // namespace fwdtd
