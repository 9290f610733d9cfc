#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fwdtd/approximator.hpp"
#include "fwdtd/random.hpp"
#include "fwdtd/returns.hpp"

namespace fwdtd {

/// One step of experience. An empty `next_state` marks a terminal transition,
/// whose bootstrap value is 0 in every target.
struct Transition {
  FeatureVector state;
  std::size_t action = 0;
  double reward = 0.0;
  std::optional<FeatureVector> next_state;
  std::size_t next_action = 0;

  bool terminal() const { return !next_state.has_value(); }
};

/// Emitted for every weight update: which state (by time index within the
/// episode) was updated, and towards which target.
struct UpdateEvent {
  std::size_t time = 0;
  std::size_t action = 0;
  double target = 0.0;
};
using UpdateListener = std::function<void(const UpdateEvent&)>;

struct LearningParams {
  double alpha = 0.1;
  double gamma = 1.0;
  double lambda = 0.0;
};

/// Step-driven learning algorithm over an action-value function. State-value
/// prediction is the single-action case (all actions 0).
class Learner {
 public:
  Learner(ActionValueFunction values, LearningParams params);
  virtual ~Learner() = default;

  /// Resets per-episode state. Must precede the first observe() of every episode.
  virtual void begin_episode() = 0;
  /// Consumes one transition; a terminal transition also completes any
  /// end-of-episode work.
  virtual void observe(const Transition& transition) = 0;
  virtual std::string_view name() const = 0;

  const ActionValueFunction& values() const { return q_; }
  ActionValueFunction& mutable_values() { return q_; }
  const LearningParams& params() const { return params_; }
  bool diverged() const { return q_.diverged(); }

  void set_update_listener(UpdateListener listener) { listener_ = std::move(listener); }

 protected:
  void notify(std::size_t time, std::size_t action, double target) const {
    if (listener_) listener_({time, action, target});
  }
  /// Value of the successor (0 when terminal) under the current weights.
  double next_value(const Transition& transition) const;

  ActionValueFunction q_;
  LearningParams params_;
  std::size_t time_ = 0;

 private:
  UpdateListener listener_;
};

/// TD(0) / one-step Sarsa: U_t = R_{t+1} + gamma V(S_{t+1}|theta_t).
class TdZero final : public Learner {
 public:
  using Learner::Learner;
  void begin_episode() override { time_ = 0; }
  void observe(const Transition& transition) override;
  std::string_view name() const override { return "td0"; }
};

/// Backward-view TD(lambda) / Sarsa(lambda) with accumulating traces,
/// one trace block per action network.
class TdLambda final : public Learner {
 public:
  TdLambda(ActionValueFunction values, LearningParams params);
  void begin_episode() override;
  void observe(const Transition& transition) override;
  std::string_view name() const override { return "td_lambda"; }

  std::span<const double> trace(std::size_t action) const { return traces_.at(action); }

 private:
  std::vector<WeightVector> traces_;
  std::vector<bool> touched_;
  WeightVector grad_;
};

/// Forward TD(lambda) / forward Sarsa(lambda): updates towards the K-bounded
/// lambda-return G_t^{lambda|t+K}, delayed by K-1 steps, at the per-step cost of TD(0).
///
/// The running target is advanced incrementally (one horizon extension and one
/// start shift per step) and resynchronised from a freshly accumulated value
/// every K steps, which bounds the growth of rounding errors.
class ForwardTd final : public Learner {
 public:
  ForwardTd(ActionValueFunction values, LearningParams params, Horizon horizon,
            bool record_tape = false);

  void begin_episode() override;
  void observe(const Transition& transition) override;
  std::string_view name() const override { return "forward_td"; }

  /// Loop body for one transition, without the end-of-episode flush.
  void step(const Transition& transition);
  /// Drains the FIFO with horizon-T targets. No-op when empty.
  void flush();

  const Horizon& horizon() const { return horizon_; }
  std::size_t fifo_size() const { return fifo_.size(); }
  bool ready() const { return ready_; }
  /// Rewards and bootstrap values seen this episode (only when recording).
  const ValueTape& tape() const { return tape_; }

 private:
  struct Entry {
    FeatureVector features;
    std::size_t action;
    double rho;
  };

  void pop_and_update();

  Horizon horizon_;
  double decay_;
  double c_final_;
  bool record_;

  std::deque<Entry> fifo_;
  double u_sync_ = 0.0;
  double u_ = 0.0;
  double c_ = 1.0;
  double v_current_ = 0.0;
  std::size_t i_ = 0;
  bool ready_ = false;
  std::size_t next_update_time_ = 0;
  ValueTape tape_;
};

struct StateAction {
  FeatureVector features;
  std::size_t action = 0;
};

/// Replays updates k = 0..horizon-1 on `q` towards G_k^{lambda|horizon} computed
/// from `tape`.
void replay_lambda_return(ActionValueFunction& q, std::span<const StateAction> states,
                          const ValueTape& tape, std::size_t horizon, double alpha,
                          const UpdateListener& listener = {});

/// End-of-episode weights of the offline lambda-return algorithm, started from theta_0.
ActionValueFunction offline_lambda_return_episode(ActionValueFunction theta0,
                                                  std::span<const StateAction> states,
                                                  const ValueTape& tape, double alpha);

/// Online lambda-return algorithm: at every step t the weights are recomputed
/// from the start-of-episode weights by t updates with horizon-t targets.
/// Bootstrap values are recorded once, when each state is first observed.
/// O(t) updates per step; intended for small tasks.
class OnlineLambdaReturn final : public Learner {
 public:
  OnlineLambdaReturn(ActionValueFunction values, LearningParams params);
  void begin_episode() override;
  void observe(const Transition& transition) override;
  std::string_view name() const override { return "online_lambda_return"; }

  const ValueTape& tape() const { return tape_; }

 private:
  ActionValueFunction theta0_;
  std::vector<StateAction> states_;
  ValueTape tape_;
};

/// Offline lambda-return algorithm: weights stay at theta_0 during the episode,
/// then T updates with horizon-T targets run at termination.
class OfflineLambdaReturn final : public Learner {
 public:
  OfflineLambdaReturn(ActionValueFunction values, LearningParams params);
  void begin_episode() override;
  void observe(const Transition& transition) override;
  std::string_view name() const override { return "offline_lambda_return"; }

  const ValueTape& tape() const { return tape_; }

 private:
  std::vector<StateAction> states_;
  ValueTape tape_;
};

enum class AlgorithmId { td0, td_lambda, forward_td, online_lambda_return, offline_lambda_return };

/// Accepts the prediction names above plus the control aliases
/// sarsa, sarsa_lambda and forward_sarsa.
AlgorithmId parse_algorithm(std::string_view name);
std::string_view to_string(AlgorithmId id);

/// `horizon` is used by forward_td only.
std::unique_ptr<Learner> make_learner(AlgorithmId id, ActionValueFunction values,
                                      LearningParams params, Horizon horizon);

/// With probability 1 - epsilon an argmax action (ties broken uniformly), else a
/// uniformly random action. NaN values never win the argmax.
std::size_t epsilon_greedy(std::span<const double> q_values, double epsilon, Rng& rng);

}  // namespace fwdtd
