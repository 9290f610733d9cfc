#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "fwdtd/random.hpp"

namespace fwdtd {

using FeatureVector = std::vector<double>;
using WeightVector = std::vector<double>;

enum class ApproximatorKind { tabular, linear, mlp };
enum class Activation { tanh, identity };

std::string_view to_string(ApproximatorKind kind);
ApproximatorKind parse_approximator_kind(std::string_view name);

/// Any weight, value or target with magnitude above this bound (or non-finite) marks divergence.
inline constexpr double kDivergenceBound = 1e10;

/// Call counts of the public evaluation/update surface. Internal forward passes
/// performed by an update are not counted as evaluations.
struct OpCounters {
  std::uint64_t evaluations = 0;
  std::uint64_t gradients = 0;
  std::uint64_t updates = 0;
};

struct UpdateResult {
  double td_error = 0.0;
  bool diverged = false;
};

/// Parameterized state-value estimate V(s|theta).
///
/// Three kinds share one flat weight vector:
///   - tabular: one weight per state; features must be a one-hot vector.
///   - linear:  V = theta . s (no bias).
///   - mlp:     one hidden layer, V = w2 . act(W1 s + b1) + b2.
///              Weight layout is [W1 (hidden x inputs, row-major) | b1 | w2 | b2].
///
/// Once any weight or update target leaves the finite bound the function is
/// flagged diverged and further updates are ignored; the flag is sticky.
class ValueFunction {
 public:
  static ValueFunction tabular(std::size_t states);
  static ValueFunction linear(std::size_t inputs);
  static ValueFunction mlp(std::size_t inputs, std::size_t hidden,
                           Activation activation = Activation::tanh);

  /// Replaces all weights with draws from U[-range, range]; range 0 gives zeros.
  void initialize_uniform(double range, Rng& rng);

  ApproximatorKind kind() const { return kind_; }
  Activation activation() const { return activation_; }
  std::size_t input_dim() const { return inputs_; }
  std::size_t hidden_units() const { return hidden_; }
  std::size_t num_weights() const { return weights_.size(); }

  std::span<const double> weights() const { return weights_; }
  void set_weights(std::span<const double> weights);

  double evaluate(std::span<const double> features) const;
  WeightVector gradient(std::span<const double> features) const;

  /// Value and gradient in one pass; `grad` must have num_weights() entries.
  /// Counted as one gradient call.
  double value_and_gradient(std::span<const double> features, std::span<double> grad) const;

  /// theta <- theta + alpha (target - V(s|theta)) grad V(s|theta), both
  /// evaluated at the pre-update weights.
  UpdateResult apply_td_update(std::span<const double> features, double target, double alpha);

  /// theta <- theta + scale * direction. Returns false if the result diverged.
  bool add_scaled(std::span<const double> direction, double scale);

  bool diverged() const { return diverged_; }
  /// Marks the function diverged, e.g. when a caller observes a non-finite target.
  void mark_diverged() { diverged_ = true; }

  const OpCounters& counters() const { return counters_; }
  void reset_counters() const { counters_ = {}; }

 private:
  ValueFunction(ApproximatorKind kind, std::size_t inputs, std::size_t hidden,
                Activation activation, std::size_t weights);

  void check_features(std::span<const double> features) const;
  std::size_t tabular_index(std::span<const double> features) const;
  double forward(std::span<const double> features) const;
  double forward_backward(std::span<const double> features, std::span<double> grad) const;
  void check_weights();

  ApproximatorKind kind_;
  std::size_t inputs_;
  std::size_t hidden_;
  Activation activation_;
  WeightVector weights_;
  bool diverged_ = false;
  mutable OpCounters counters_;
  mutable std::vector<double> scratch_;
  mutable WeightVector grad_scratch_;
};

/// Central-difference estimate (V(theta + step e_i) - V(theta - step e_i)) / (2 step).
WeightVector finite_difference_gradient(const ValueFunction& vf,
                                        std::span<const double> features, double step);

/// One ValueFunction per action; a state-value function is the single-action case.
class ActionValueFunction {
 public:
  explicit ActionValueFunction(ValueFunction single);
  explicit ActionValueFunction(std::vector<ValueFunction> per_action);

  std::size_t num_actions() const { return nets_.size(); }
  ValueFunction& net(std::size_t action);
  const ValueFunction& net(std::size_t action) const;

  double evaluate(std::span<const double> features, std::size_t action) const {
    return net(action).evaluate(features);
  }
  std::vector<double> evaluate_all(std::span<const double> features) const;
  UpdateResult apply_td_update(std::span<const double> features, std::size_t action,
                               double target, double alpha) {
    return net(action).apply_td_update(features, target, alpha);
  }

  bool diverged() const;
  void mark_diverged();
  OpCounters counters() const;
  void reset_counters() const;

 private:
  std::vector<ValueFunction> nets_;
};

}  // namespace fwdtd
