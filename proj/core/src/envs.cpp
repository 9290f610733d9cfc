#include "fwdtd/envs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fwdtd/error.hpp"

namespace fwdtd {

namespace {

double scale_to_unit(double x, double lo, double hi) {
  return std::clamp(2.0 * (x - lo) / (hi - lo) - 1.0, -1.0, 1.0);
}

}  // namespace

RandomWalkOutcome random_walk_step(int state, Rng& rng) {
  if (state < 1 || state > random_walk::kStates) throw RangeError("random walk state out of range");
  std::bernoulli_distribution left(random_walk::kLeftProbability);
  if (left(rng)) return {state - 1, 1.0, state == 1};
  return {std::min(state + 1, random_walk::kStates), 1.0, false};
}

FeatureVector random_walk_features(int state) {
  if (state < 1 || state > random_walk::kStates) throw RangeError("random walk state out of range");
  FeatureVector f(random_walk::kStates, 0.0);
  f[static_cast<std::size_t>(state - 1)] = 1.0;
  return f;
}

OneStateOutcome one_state_step(std::size_t counter, std::size_t episode_length) {
  if (episode_length == 0) throw ConfigError("one-state episode length must be positive");
  if (counter >= episode_length) throw RangeError("one-state episode already ended");
  const std::size_t next = counter + 1;
  const bool terminal = next == episode_length;
  return {next, terminal ? 1.0 : 0.0, terminal};
}

MountainCarOutcome mountain_car_step(const MountainCarState& state, std::size_t action, Rng& rng,
                                     RewardMode mode) {
  using namespace mountain_car;
  if (action > forward) throw RangeError("mountain car action out of range");
  double velocity = state.velocity + kForce * (static_cast<double>(action) - 1.0) -
                    kGravity * std::cos(3.0 * state.position);
  velocity = std::clamp(velocity, -kMaxSpeed, kMaxSpeed);
  double position = std::clamp(state.position + velocity, kMinPosition, kMaxPosition);
  if (position == kMinPosition && velocity < 0.0) velocity = 0.0;
  double reward = -1.0;
  if (mode == RewardMode::noisy_eval) {
    reward = std::normal_distribution<double>(kRewardMean, kRewardStdDev)(rng);
  }
  return {{position, velocity}, reward, position >= kGoalPosition};
}

FeatureVector mountain_car_features(const MountainCarState& state) {
  using namespace mountain_car;
  return {scale_to_unit(state.position, kMinPosition, kMaxPosition),
          scale_to_unit(state.velocity, -kMaxSpeed, kMaxSpeed)};
}

std::size_t near_optimal_mountain_car_action(const MountainCarState& state) {
  if (state.velocity > 0.0) return mountain_car::forward;
  if (state.velocity < 0.0) return mountain_car::reverse;
  return mountain_car::coast;
}

CartPoleOutcome cart_pole_step(const CartPoleState& s, std::size_t action) {
  using namespace cart_pole;
  if (action > right) throw RangeError("cart-pole action out of range");
  const double force = action == right ? kForce : -kForce;
  const double cos_t = std::cos(s.theta);
  const double sin_t = std::sin(s.theta);
  const double temp = (force + kPoleMassLength * s.theta_dot * s.theta_dot * sin_t) / kTotalMass;
  const double theta_acc = (kGravity * sin_t - cos_t * temp) /
                           (kHalfLength * (4.0 / 3.0 - kPoleMass * cos_t * cos_t / kTotalMass));
  const double x_acc = temp - kPoleMassLength * theta_acc * cos_t / kTotalMass;
  CartPoleState next{s.x + kDt * s.x_dot, s.x_dot + kDt * x_acc, s.theta + kDt * s.theta_dot,
                     s.theta_dot + kDt * theta_acc};
  return {next, 1.0, cart_pole_failed(next)};
}

bool cart_pole_failed(const CartPoleState& s) {
  return std::abs(s.x) > cart_pole::kPositionLimit || std::abs(s.theta) > cart_pole::kAngleLimit;
}

FeatureVector cart_pole_features(const CartPoleState& s) {
  using namespace cart_pole;
  return {std::clamp(s.x / kPositionLimit, -1.0, 1.0),
          std::clamp(s.x_dot / kVelocityScale, -1.0, 1.0),
          std::clamp(s.theta / kAngleLimit, -1.0, 1.0),
          std::clamp(s.theta_dot / kAngularVelocityScale, -1.0, 1.0)};
}

std::string_view to_string(TaskId task) {
  switch (task) {
    case TaskId::random_walk: return "random_walk";
    case TaskId::one_state: return "one_state";
    case TaskId::mountain_car: return "mountain_car";
    case TaskId::cart_pole: return "cart_pole";
  }
  return "unknown";
}

TaskId parse_task(std::string_view name) {
  if (name == "random_walk") return TaskId::random_walk;
  if (name == "one_state") return TaskId::one_state;
  if (name == "mountain_car") return TaskId::mountain_car;
  if (name == "cart_pole") return TaskId::cart_pole;
  throw ConfigError("unknown task '" + std::string(name) + "'");
}

namespace {

class RandomWalkEnv final : public Environment {
 public:
  const EnvSpec& spec() const override { return spec_; }
  void reset(Rng&) override { state_ = random_walk::kStart; }
  StepResult step(std::size_t, Rng& rng) override {
    const auto out = random_walk_step(state_, rng);
    state_ = out.next;
    return {out.reward, out.terminal};
  }
  FeatureVector features() const override { return random_walk_features(state_); }
  std::vector<double> raw_state() const override { return {static_cast<double>(state_)}; }

 private:
  EnvSpec spec_{TaskId::random_walk, random_walk::kStates, 1, 1.0, false};
  int state_ = random_walk::kStart;
};

class OneStateEnv final : public Environment {
 public:
  explicit OneStateEnv(std::size_t length) : length_(length) {
    if (length == 0) throw ConfigError("one-state episode length must be positive");
  }
  const EnvSpec& spec() const override { return spec_; }
  void reset(Rng&) override { counter_ = 0; }
  StepResult step(std::size_t, Rng&) override {
    const auto out = one_state_step(counter_, length_);
    counter_ = out.next;
    return {out.reward, out.terminal};
  }
  FeatureVector features() const override { return {1.0}; }
  std::vector<double> raw_state() const override { return {static_cast<double>(counter_)}; }

 private:
  EnvSpec spec_{TaskId::one_state, 1, 1, 1.0, false};
  std::size_t length_;
  std::size_t counter_ = 0;
};

class MountainCarEnv final : public Environment {
 public:
  explicit MountainCarEnv(RewardMode mode)
      : mode_(mode), spec_{TaskId::mountain_car, 2, 3, 1.0, mode == RewardMode::unit_control} {}
  const EnvSpec& spec() const override { return spec_; }
  void reset(Rng&) override { state_ = {}; }
  StepResult step(std::size_t action, Rng& rng) override {
    const auto out = mountain_car_step(state_, action, rng, mode_);
    state_ = out.next;
    return {out.reward, out.terminal};
  }
  FeatureVector features() const override { return mountain_car_features(state_); }
  std::vector<double> raw_state() const override { return {state_.position, state_.velocity}; }
  std::size_t evaluation_action() const override { return near_optimal_mountain_car_action(state_); }

 private:
  RewardMode mode_;
  EnvSpec spec_;
  MountainCarState state_;
};

class CartPoleEnv final : public Environment {
 public:
  const EnvSpec& spec() const override { return spec_; }
  void reset(Rng&) override {
    state_ = {};
    steps_ = 0;
  }
  StepResult step(std::size_t action, Rng&) override {
    const auto out = cart_pole_step(state_, action);
    state_ = out.next;
    ++steps_;
    return {out.reward, out.terminal || steps_ >= cart_pole::kMaxSteps};
  }
  FeatureVector features() const override { return cart_pole_features(state_); }
  std::vector<double> raw_state() const override {
    return {state_.x, state_.x_dot, state_.theta, state_.theta_dot};
  }

 private:
  EnvSpec spec_{TaskId::cart_pole, 4, 2, 1.0, true};
  CartPoleState state_;
  std::size_t steps_ = 0;
};

}  // namespace

std::unique_ptr<Environment> make_environment(TaskId task, const EnvOptions& options) {
  switch (task) {
    case TaskId::random_walk: return std::make_unique<RandomWalkEnv>();
    case TaskId::one_state: return std::make_unique<OneStateEnv>(options.one_state_length);
    case TaskId::mountain_car: return std::make_unique<MountainCarEnv>(options.reward_mode);
    case TaskId::cart_pole: return std::make_unique<CartPoleEnv>();
  }
  throw ConfigError("unknown task");
}

FeatureVector features_from_raw(TaskId task, std::span<const double> raw) {
  auto need = [&](std::size_t n) {
    if (raw.size() != n) throw DimensionError("wrong number of raw state coordinates");
  };
  switch (task) {
    case TaskId::random_walk:
      need(1);
      return random_walk_features(static_cast<int>(raw[0]));
    case TaskId::one_state:
      need(1);
      return {1.0};
    case TaskId::mountain_car:
      need(2);
      return mountain_car_features({raw[0], raw[1]});
    case TaskId::cart_pole:
      need(4);
      return cart_pole_features({raw[0], raw[1], raw[2], raw[3]});
  }
  throw ConfigError("unknown task");
}

}  // namespace fwdtd
