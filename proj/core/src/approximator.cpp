#include "fwdtd/approximator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fwdtd/error.hpp"

namespace fwdtd {

namespace {

bool within_bound(double x) { return std::isfinite(x) && std::abs(x) <= kDivergenceBound; }

std::size_t mlp_weight_count(std::size_t inputs, std::size_t hidden) {
  return hidden * inputs + hidden + hidden + 1;
}

}  // namespace

std::string_view to_string(ApproximatorKind kind) {
  switch (kind) {
    case ApproximatorKind::tabular: return "tabular";
    case ApproximatorKind::linear: return "linear";
    case ApproximatorKind::mlp: return "mlp";
  }
  return "unknown";
}

ApproximatorKind parse_approximator_kind(std::string_view name) {
  if (name == "tabular") return ApproximatorKind::tabular;
  if (name == "linear") return ApproximatorKind::linear;
  if (name == "mlp") return ApproximatorKind::mlp;
  throw ConfigError("unknown approximator '" + std::string(name) + "'");
}

ValueFunction::ValueFunction(ApproximatorKind kind, std::size_t inputs, std::size_t hidden,
                             Activation activation, std::size_t weights)
    : kind_(kind),
      inputs_(inputs),
      hidden_(hidden),
      activation_(activation),
      weights_(weights, 0.0),
      scratch_(hidden, 0.0),
      grad_scratch_(weights, 0.0) {}

ValueFunction ValueFunction::tabular(std::size_t states) {
  if (states == 0) throw DimensionError("tabular value function needs at least one state");
  return ValueFunction(ApproximatorKind::tabular, states, 0, Activation::identity, states);
}

ValueFunction ValueFunction::linear(std::size_t inputs) {
  if (inputs == 0) throw DimensionError("linear value function needs at least one input");
  return ValueFunction(ApproximatorKind::linear, inputs, 0, Activation::identity, inputs);
}

ValueFunction ValueFunction::mlp(std::size_t inputs, std::size_t hidden, Activation activation) {
  if (inputs == 0 || hidden == 0) throw DimensionError("mlp needs non-empty input and hidden layers");
  return ValueFunction(ApproximatorKind::mlp, inputs, hidden, activation,
                       mlp_weight_count(inputs, hidden));
}

void ValueFunction::initialize_uniform(double range, Rng& rng) {
  if (range == 0.0) {
    std::fill(weights_.begin(), weights_.end(), 0.0);
  } else {
    std::uniform_real_distribution<double> dist(-range, range);
    for (double& w : weights_) w = dist(rng);
  }
  diverged_ = false;
}

void ValueFunction::set_weights(std::span<const double> weights) {
  if (weights.size() != weights_.size()) {
    throw DimensionError("expected " + std::to_string(weights_.size()) + " weights, got " +
                         std::to_string(weights.size()));
  }
  std::copy(weights.begin(), weights.end(), weights_.begin());
  diverged_ = false;
  check_weights();
}

void ValueFunction::check_features(std::span<const double> features) const {
  if (features.size() != inputs_) {
    throw DimensionError("expected " + std::to_string(inputs_) + " features, got " +
                         std::to_string(features.size()));
  }
}

std::size_t ValueFunction::tabular_index(std::span<const double> features) const {
  std::size_t index = features.size();
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i] == 1.0 && index == features.size()) {
      index = i;
    } else if (features[i] != 0.0) {
      throw DimensionError("tabular features must be one-hot");
    }
  }
  if (index == features.size()) throw DimensionError("tabular features must be one-hot");
  return index;
}

double ValueFunction::forward(std::span<const double> s) const {
  switch (kind_) {
    case ApproximatorKind::tabular:
      return weights_[tabular_index(s)];
    case ApproximatorKind::linear: {
      double v = 0.0;
      for (std::size_t i = 0; i < inputs_; ++i) v += weights_[i] * s[i];
      return v;
    }
    case ApproximatorKind::mlp: {
      const double* w1 = weights_.data();
      const double* b1 = w1 + hidden_ * inputs_;
      const double* w2 = b1 + hidden_;
      const double b2 = w2[hidden_];
      double v = b2;
      for (std::size_t j = 0; j < hidden_; ++j) {
        double z = b1[j];
        const double* row = w1 + j * inputs_;
        for (std::size_t i = 0; i < inputs_; ++i) z += row[i] * s[i];
        const double h = activation_ == Activation::tanh ? std::tanh(z) : z;
        v += w2[j] * h;
      }
      return v;
    }
  }
  return 0.0;
}

double ValueFunction::forward_backward(std::span<const double> s, std::span<double> grad) const {
  switch (kind_) {
    case ApproximatorKind::tabular: {
      const std::size_t k = tabular_index(s);
      std::fill(grad.begin(), grad.end(), 0.0);
      grad[k] = 1.0;
      return weights_[k];
    }
    case ApproximatorKind::linear:
      std::copy(s.begin(), s.end(), grad.begin());
      return forward(s);
    case ApproximatorKind::mlp: {
      const double* w1 = weights_.data();
      const double* b1 = w1 + hidden_ * inputs_;
      const double* w2 = b1 + hidden_;
      double* g_w1 = grad.data();
      double* g_b1 = g_w1 + hidden_ * inputs_;
      double* g_w2 = g_b1 + hidden_;
      double v = w2[hidden_];
      for (std::size_t j = 0; j < hidden_; ++j) {
        double z = b1[j];
        const double* row = w1 + j * inputs_;
        for (std::size_t i = 0; i < inputs_; ++i) z += row[i] * s[i];
        double h = z;
        double dh = 1.0;
        if (activation_ == Activation::tanh) {
          h = std::tanh(z);
          dh = 1.0 - h * h;
        }
        v += w2[j] * h;
        const double back = w2[j] * dh;
        double* g_row = g_w1 + j * inputs_;
        for (std::size_t i = 0; i < inputs_; ++i) g_row[i] = back * s[i];
        g_b1[j] = back;
        g_w2[j] = h;
      }
      g_w2[hidden_] = 1.0;
      return v;
    }
  }
  return 0.0;
}

double ValueFunction::evaluate(std::span<const double> features) const {
  check_features(features);
  ++counters_.evaluations;
  return forward(features);
}

WeightVector ValueFunction::gradient(std::span<const double> features) const {
  WeightVector grad(weights_.size(), 0.0);
  value_and_gradient(features, grad);
  return grad;
}

double ValueFunction::value_and_gradient(std::span<const double> features,
                                         std::span<double> grad) const {
  check_features(features);
  if (grad.size() != weights_.size()) throw DimensionError("gradient buffer has wrong length");
  ++counters_.gradients;
  return forward_backward(features, grad);
}

UpdateResult ValueFunction::apply_td_update(std::span<const double> features, double target,
                                            double alpha) {
  check_features(features);
  ++counters_.updates;
  if (diverged_) return {0.0, true};
  if (!within_bound(target)) {
    diverged_ = true;
    return {0.0, true};
  }
  const double v = forward_backward(features, grad_scratch_);
  const double td_error = target - v;
  const double scale = alpha * td_error;
  for (std::size_t i = 0; i < weights_.size(); ++i) weights_[i] += scale * grad_scratch_[i];
  if (!within_bound(v)) diverged_ = true;
  check_weights();
  return {td_error, diverged_};
}

bool ValueFunction::add_scaled(std::span<const double> direction, double scale) {
  if (direction.size() != weights_.size()) throw DimensionError("direction has wrong length");
  ++counters_.updates;
  if (diverged_) return false;
  if (!std::isfinite(scale)) {
    diverged_ = true;
    return false;
  }
  for (std::size_t i = 0; i < weights_.size(); ++i) weights_[i] += scale * direction[i];
  check_weights();
  return !diverged_;
}

void ValueFunction::check_weights() {
  if (!std::all_of(weights_.begin(), weights_.end(), within_bound)) diverged_ = true;
}

WeightVector finite_difference_gradient(const ValueFunction& vf, std::span<const double> features,
                                        double step) {
  ValueFunction probe = vf;
  WeightVector theta(vf.weights().begin(), vf.weights().end());
  WeightVector grad(theta.size(), 0.0);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double saved = theta[i];
    theta[i] = saved + step;
    probe.set_weights(theta);
    const double up = probe.evaluate(features);
    theta[i] = saved - step;
    probe.set_weights(theta);
    const double down = probe.evaluate(features);
    theta[i] = saved;
    grad[i] = (up - down) / (2.0 * step);
  }
  return grad;
}

ActionValueFunction::ActionValueFunction(ValueFunction single) { nets_.push_back(std::move(single)); }

ActionValueFunction::ActionValueFunction(std::vector<ValueFunction> per_action)
    : nets_(std::move(per_action)) {
  if (nets_.empty()) throw DimensionError("action-value function needs at least one action");
}

ValueFunction& ActionValueFunction::net(std::size_t action) {
  if (action >= nets_.size()) throw DimensionError("action index out of range");
  return nets_[action];
}

const ValueFunction& ActionValueFunction::net(std::size_t action) const {
  if (action >= nets_.size()) throw DimensionError("action index out of range");
  return nets_[action];
}

std::vector<double> ActionValueFunction::evaluate_all(std::span<const double> features) const {
  std::vector<double> q;
  q.reserve(nets_.size());
  for (const auto& n : nets_) q.push_back(n.evaluate(features));
  return q;
}

bool ActionValueFunction::diverged() const {
  return std::any_of(nets_.begin(), nets_.end(), [](const ValueFunction& n) { return n.diverged(); });
}

void ActionValueFunction::mark_diverged() {
  for (auto& n : nets_) n.mark_diverged();
}

OpCounters ActionValueFunction::counters() const {
  OpCounters total;
  for (const auto& n : nets_) {
    total.evaluations += n.counters().evaluations;
    total.gradients += n.counters().gradients;
    total.updates += n.counters().updates;
  }
  return total;
}

void ActionValueFunction::reset_counters() const {
  for (const auto& n : nets_) n.reset_counters();
}

}  // namespace fwdtd
