#include "fwdtd/algorithms.hpp"
#include "fwdtd/error.hpp"

namespace fwdtd {

void replay_lambda_return(ActionValueFunction& q, std::span<const StateAction> states,
                          const ValueTape& tape, std::size_t horizon, double alpha,
                          const UpdateListener& listener) {
  if (horizon > states.size()) throw RangeError("replay horizon beyond recorded states");
  if (horizon == 0) return;
  const std::vector<double> targets = lambda_returns_to_horizon(tape, horizon);
  for (std::size_t k = 0; k < horizon; ++k) {
    q.apply_td_update(states[k].features, states[k].action, targets[k], alpha);
    if (listener) listener({k, states[k].action, targets[k]});
  }
}

ActionValueFunction offline_lambda_return_episode(ActionValueFunction theta0,
                                                  std::span<const StateAction> states,
                                                  const ValueTape& tape, double alpha) {
  if (states.size() != tape.length()) throw DimensionError("one state per tape step expected");
  replay_lambda_return(theta0, states, tape, tape.length(), alpha);
  return theta0;
}

OnlineLambdaReturn::OnlineLambdaReturn(ActionValueFunction values, LearningParams params)
    : Learner(std::move(values), params), theta0_(q_), tape_(params.gamma, params.lambda) {}

void OnlineLambdaReturn::begin_episode() {
  time_ = 0;
  theta0_ = q_;
  states_.clear();
  tape_ = ValueTape(params_.gamma, params_.lambda);
}

void OnlineLambdaReturn::observe(const Transition& transition) {
  states_.push_back({transition.state, transition.action});
  if (transition.terminal()) {
    tape_.terminate(transition.reward);
  } else {
    tape_.push(transition.reward, next_value(transition));
  }
  ++time_;
  // A diverged replay is kept as-is; restarting from theta_0 would hide it.
  if (q_.diverged()) return;
  ActionValueFunction replayed = theta0_;
  const bool last = transition.terminal();
  UpdateListener forward;
  if (last) forward = [this](const UpdateEvent& e) { notify(e.time, e.action, e.target); };
  replay_lambda_return(replayed, states_, tape_, states_.size(), params_.alpha, forward);
  q_ = std::move(replayed);
}

OfflineLambdaReturn::OfflineLambdaReturn(ActionValueFunction values, LearningParams params)
    : Learner(std::move(values), params), tape_(params.gamma, params.lambda) {}

void OfflineLambdaReturn::begin_episode() {
  time_ = 0;
  states_.clear();
  tape_ = ValueTape(params_.gamma, params_.lambda);
}

void OfflineLambdaReturn::observe(const Transition& transition) {
  states_.push_back({transition.state, transition.action});
  ++time_;
  if (!transition.terminal()) {
    tape_.push(transition.reward, next_value(transition));
    return;
  }
  tape_.terminate(transition.reward);
  replay_lambda_return(q_, states_, tape_, states_.size(), params_.alpha,
                       [this](const UpdateEvent& e) { notify(e.time, e.action, e.target); });
}

}  // namespace fwdtd
