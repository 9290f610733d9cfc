#include <algorithm>
#include <cmath>

#include "fwdtd/algorithms.hpp"
#include "fwdtd/error.hpp"

namespace fwdtd {

Learner::Learner(ActionValueFunction values, LearningParams params)
    : q_(std::move(values)), params_(params) {
  if (!(params.alpha > 0.0)) throw ConfigError("step size alpha must be positive");
  if (!(params.gamma >= 0.0 && params.gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");
  if (!(params.lambda >= 0.0 && params.lambda <= 1.0)) throw ConfigError("lambda must lie in [0, 1]");
}

double Learner::next_value(const Transition& transition) const {
  if (transition.terminal()) return 0.0;
  return q_.evaluate(*transition.next_state, transition.next_action);
}

void TdZero::observe(const Transition& transition) {
  const double target = transition.reward + params_.gamma * next_value(transition);
  q_.apply_td_update(transition.state, transition.action, target, params_.alpha);
  notify(time_++, transition.action, target);
}

TdLambda::TdLambda(ActionValueFunction values, LearningParams params)
    : Learner(std::move(values), params) {
  for (std::size_t a = 0; a < q_.num_actions(); ++a) {
    traces_.emplace_back(q_.net(a).num_weights(), 0.0);
  }
  touched_.assign(q_.num_actions(), false);
}

void TdLambda::begin_episode() {
  time_ = 0;
  for (auto& e : traces_) std::fill(e.begin(), e.end(), 0.0);
  std::fill(touched_.begin(), touched_.end(), false);
}

void TdLambda::observe(const Transition& transition) {
  const std::size_t a = transition.action;
  ValueFunction& net = q_.net(a);
  grad_.resize(net.num_weights());
  const double v = net.value_and_gradient(transition.state, grad_);
  const double target = transition.reward + params_.gamma * next_value(transition);
  const double delta = target - v;

  const double decay = params_.gamma * params_.lambda;
  for (std::size_t b = 0; b < traces_.size(); ++b) {
    if (!touched_[b] && b != a) continue;
    WeightVector& e = traces_[b];
    if (b == a) {
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = decay * e[i] + grad_[i];
    } else {
      for (double& x : e) x = decay * x;
    }
  }
  touched_[a] = true;

  if (!std::isfinite(target) || std::abs(target) > kDivergenceBound) {
    q_.mark_diverged();
  } else {
    const double scale = params_.alpha * delta;
    for (std::size_t b = 0; b < traces_.size(); ++b) {
      if (touched_[b]) q_.net(b).add_scaled(traces_[b], scale);
    }
  }
  notify(time_++, a, target);
}

}  // namespace fwdtd
