#include "fwdtd/algorithms.hpp"
#include "fwdtd/error.hpp"

namespace fwdtd {

ForwardTd::ForwardTd(ActionValueFunction values, LearningParams params, Horizon horizon,
                     bool record_tape)
    : Learner(std::move(values), params),
      horizon_(horizon),
      decay_(params.gamma * params.lambda),
      c_final_(1.0),
      record_(record_tape),
      tape_(params.gamma, params.lambda) {
  const bool single_step = !horizon_.is_episodic() && horizon_.k() == 1;
  if (!single_step && decay_ == 0.0) {
    throw ConfigError("forward TD with K > 1 requires gamma * lambda > 0");
  }
  if (!horizon_.is_episodic()) {
    for (std::size_t n = 1; n < horizon_.k(); ++n) c_final_ *= decay_;
  }
}

void ForwardTd::begin_episode() {
  time_ = 0;
  fifo_.clear();
  u_sync_ = 0.0;
  u_ = 0.0;
  i_ = 0;
  c_ = 1.0;
  v_current_ = 0.0;
  ready_ = false;
  next_update_time_ = 0;
  tape_ = ValueTape(params_.gamma, params_.lambda);
}

void ForwardTd::observe(const Transition& transition) {
  step(transition);
  if (transition.terminal()) flush();
}

void ForwardTd::step(const Transition& transition) {
  const double gamma = params_.gamma;
  const double v_next = next_value(transition);
  const double r = transition.reward;
  fifo_.push_back({transition.state, transition.action, r + gamma * (1.0 - params_.lambda) * v_next});
  const double delta = r + gamma * v_next - v_current_;
  v_current_ = v_next;
  if (record_) {
    if (transition.terminal()) {
      tape_.terminate(r);
    } else {
      tape_.push(r, v_next);
    }
  }
  ++time_;

  if (!horizon_.is_episodic() && i_ == horizon_.k() - 1) {
    u_ = u_sync_;
    u_sync_ = v_current_;
    i_ = 0;
    c_ = 1.0;
    ready_ = true;
  } else {
    u_sync_ += c_ * delta;
    ++i_;
    c_ *= decay_;
  }

  if (ready_) {
    u_ += c_final_ * delta;
    pop_and_update();
  }
}

void ForwardTd::flush() {
  if (!horizon_.is_episodic()) {
    if (!ready_) u_ = u_sync_;
    while (!fifo_.empty()) pop_and_update();
    return;
  }
  // Without resynchronisation every start shift divides the rounding error by
  // gamma * lambda, so over a long episode the shifted target drifts. The same
  // horizon-T targets come out of the backward recursion without that growth.
  std::vector<double> targets(fifo_.size());
  double g = v_current_;
  for (std::size_t k = fifo_.size(); k-- > 0;) {
    g = fifo_[k].rho + decay_ * g;
    targets[k] = g;
  }
  for (double target : targets) {
    Entry entry = std::move(fifo_.front());
    fifo_.pop_front();
    q_.apply_td_update(entry.features, entry.action, target, params_.alpha);
    notify(next_update_time_++, entry.action, target);
  }
}

void ForwardTd::pop_and_update() {
  Entry entry = std::move(fifo_.front());
  fifo_.pop_front();
  q_.apply_td_update(entry.features, entry.action, u_, params_.alpha);
  notify(next_update_time_++, entry.action, u_);
  const bool single_step = !horizon_.is_episodic() && horizon_.k() == 1;
  if (!single_step) u_ = (u_ - entry.rho) / decay_;
}

}  // namespace fwdtd
