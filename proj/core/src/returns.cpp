#include "fwdtd/returns.hpp"

#include <cmath>
#include <limits>

#include "fwdtd/error.hpp"

namespace fwdtd {

namespace {

void check_discount(double gamma, double lambda) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("lambda must lie in [0, 1]");
}

std::string span_text(std::size_t t, std::size_t h, std::size_t length) {
  return "(t=" + std::to_string(t) + ", h=" + std::to_string(h) +
         ") on a tape of length " + std::to_string(length);
}

}  // namespace

ValueTape::ValueTape(double gamma, double lambda) : gamma_(gamma), lambda_(lambda), values_{0.0} {
  check_discount(gamma, lambda);
}

ValueTape::ValueTape(double gamma, double lambda, std::vector<double> rewards,
                     std::vector<double> values, bool terminal)
    : gamma_(gamma),
      lambda_(lambda),
      rewards_(std::move(rewards)),
      values_(std::move(values)),
      terminal_(terminal) {
  check_discount(gamma, lambda);
  if (values_.size() != rewards_.size() + 1) {
    throw DimensionError("tape needs exactly one more value than rewards");
  }
  if (terminal_) values_.back() = 0.0;
}

double ValueTape::reward(std::size_t k) const {
  if (k >= rewards_.size()) throw RangeError("reward index beyond tape");
  return rewards_[k];
}

double ValueTape::value(std::size_t j) const {
  if (j >= values_.size()) throw RangeError("value index beyond tape");
  return values_[j];
}

void ValueTape::push(double reward, double next_value) {
  if (terminal_) throw RangeError("cannot extend a terminated tape");
  rewards_.push_back(reward);
  values_.push_back(next_value);
}

void ValueTape::terminate(double reward) {
  push(reward, 0.0);
  terminal_ = true;
}

double n_step_return(const ValueTape& tape, std::size_t t, std::size_t n) {
  if (n == 0 || t + n > tape.length()) {
    throw RangeError("n-step return " + span_text(t, t + n, tape.length()));
  }
  const double gamma = tape.gamma();
  double discount = 1.0;
  double g = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    g += discount * tape.reward(t + k - 1);
    discount *= gamma;
  }
  return g + discount * tape.value(t + n);
}

BoundedLambdaReturn lambda_return_direct(const ValueTape& tape, std::size_t t, std::size_t h) {
  if (h < t + 1 || h > tape.length()) {
    throw RangeError("lambda-return " + span_text(t, h, tape.length()));
  }
  const double lambda = tape.lambda();
  const std::size_t span = h - t;
  double g = 0.0;
  for (std::size_t n = 1; n < span; ++n) {
    g += (1.0 - lambda) * std::pow(lambda, static_cast<double>(n - 1)) * n_step_return(tape, t, n);
  }
  g += std::pow(lambda, static_cast<double>(span - 1)) * n_step_return(tape, t, span);
  return {t, h, g};
}

BoundedLambdaReturn one_step_lambda_return(const ValueTape& tape, std::size_t t) {
  if (t + 1 > tape.length()) throw RangeError("lambda-return " + span_text(t, t + 1, tape.length()));
  return {t, t + 1, tape.reward(t) + tape.gamma() * tape.value(t + 1)};
}

double delta_prime(const ValueTape& tape, std::size_t h) {
  if (h + 1 > tape.length()) throw RangeError("delta' at h=" + std::to_string(h) + " beyond tape");
  return tape.reward(h) + tape.gamma() * tape.value(h + 1) - tape.value(h);
}

double rho(const ValueTape& tape, std::size_t t) {
  if (t + 1 > tape.length()) throw RangeError("rho at t=" + std::to_string(t) + " beyond tape");
  return tape.reward(t) + tape.gamma() * (1.0 - tape.lambda()) * tape.value(t + 1);
}

BoundedLambdaReturn extend_horizon(const BoundedLambdaReturn& g, const ValueTape& tape) {
  if (g.h < g.t + 1 || g.h + 1 > tape.length()) {
    throw RangeError("extend_horizon " + span_text(g.t, g.h + 1, tape.length()));
  }
  const double decay = tape.gamma() * tape.lambda();
  const double weight = std::pow(decay, static_cast<double>(g.h - g.t));
  return {g.t, g.h + 1, g.value + weight * delta_prime(tape, g.h)};
}

BoundedLambdaReturn shift_start(const BoundedLambdaReturn& g, const ValueTape& tape) {
  if (g.h < g.t + 2) throw RangeError("shift_start needs h >= t + 2");
  if (g.h > tape.length()) throw RangeError("shift_start " + span_text(g.t, g.h, tape.length()));
  const double decay = tape.gamma() * tape.lambda();
  if (decay == 0.0) throw ConfigError("shift_start is undefined for gamma * lambda = 0");
  return {g.t + 1, g.h, (g.value - rho(tape, g.t)) / decay};
}

std::vector<double> lambda_returns_to_horizon(const ValueTape& tape, std::size_t h) {
  if (h == 0 || h > tape.length()) throw RangeError("horizon beyond tape");
  const double decay = tape.gamma() * tape.lambda();
  std::vector<double> g(h);
  g[h - 1] = tape.reward(h - 1) + tape.gamma() * tape.value(h);
  for (std::size_t k = h - 1; k-- > 0;) g[k] = rho(tape, k) + decay * g[k + 1];
  return g;
}

Horizon Horizon::bounded(std::size_t k) {
  if (k == 0) throw ConfigError("K must be positive");
  return Horizon(k);
}

std::size_t Horizon::k() const {
  if (is_episodic()) throw RangeError("episodic horizon has no finite K");
  return k_;
}

std::string Horizon::to_string() const { return is_episodic() ? "inf" : std::to_string(k_); }

Horizon compute_horizon(double gamma, double lambda, double eta, std::optional<std::size_t> k_max) {
  if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("eta must lie in (0, 1)");
  check_discount(gamma, lambda);
  if (k_max && *k_max == 0) throw ConfigError("K_max must be positive");
  const double decay = gamma * lambda;
  if (decay < eta) return Horizon::bounded(1);
  if (decay == 1.0) return k_max ? Horizon::bounded(*k_max) : Horizon::episodic();
  const double raw = std::ceil(std::log(eta) / std::log(decay));
  std::size_t k = raw < 1.0 ? 1 : static_cast<std::size_t>(raw);
  if (k_max && *k_max < k) k = *k_max;
  return Horizon::bounded(k);
}

}  // namespace fwdtd
