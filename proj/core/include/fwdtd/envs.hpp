#pragma once

#include <cstddef>
#include <memory>
#include <numbers>
#include <string_view>
#include <vector>

#include "fwdtd/approximator.hpp"
#include "fwdtd/random.hpp"

namespace fwdtd {

// ---------------------------------------------------------------------------
// Random walk: states 1..10 in a row, terminal state 0 on the left. Each step
// moves left with probability 0.7, otherwise right (state 10 stays put).
// Every reward is 1 and gamma = 1; episodes start in state 10.
// ---------------------------------------------------------------------------
namespace random_walk {
inline constexpr int kStates = 10;
inline constexpr int kStart = kStates;
inline constexpr double kLeftProbability = 0.7;
}  // namespace random_walk

struct RandomWalkOutcome {
  int next = 0;  // 0 is the terminal state
  double reward = 1.0;
  bool terminal = false;
};

RandomWalkOutcome random_walk_step(int state, Rng& rng);
/// One-hot over the 10 non-terminal states.
FeatureVector random_walk_features(int state);

// ---------------------------------------------------------------------------
// One-state task: a single state with a self-loop for T - 1 steps (reward 0),
// then a transition into the terminal state with reward 1.
// ---------------------------------------------------------------------------
struct OneStateOutcome {
  std::size_t next = 0;
  double reward = 0.0;
  bool terminal = false;
};

OneStateOutcome one_state_step(std::size_t counter, std::size_t episode_length);

// ---------------------------------------------------------------------------
// Mountain car.
// ---------------------------------------------------------------------------
namespace mountain_car {
inline constexpr double kMinPosition = -1.2;
inline constexpr double kMaxPosition = 0.6;
inline constexpr double kMaxSpeed = 0.07;
inline constexpr double kGoalPosition = 0.5;
inline constexpr double kStartPosition = -0.5;
inline constexpr double kForce = 0.001;
inline constexpr double kGravity = 0.0025;
inline constexpr double kRewardMean = -1.0;
inline constexpr double kRewardStdDev = 2.0;
enum Action : std::size_t { reverse = 0, coast = 1, forward = 2 };
}  // namespace mountain_car

struct MountainCarState {
  double position = mountain_car::kStartPosition;
  double velocity = 0.0;
  friend bool operator==(const MountainCarState&, const MountainCarState&) = default;
};

enum class RewardMode { noisy_eval, unit_control };

struct MountainCarOutcome {
  MountainCarState next;
  double reward = -1.0;
  bool terminal = false;
};

/// velocity += 0.001 (a - 1) - 0.0025 cos(3 position), clipped to +-0.07;
/// position += velocity, clipped to [-1.2, 0.6]; velocity is zeroed when the
/// car hits the left wall. Terminal at position >= 0.5.
MountainCarOutcome mountain_car_step(const MountainCarState& state, std::size_t action, Rng& rng,
                                     RewardMode mode);
FeatureVector mountain_car_features(const MountainCarState& state);
/// Energy pumping: push in the direction of motion, coast when at rest.
std::size_t near_optimal_mountain_car_action(const MountainCarState& state);

// ---------------------------------------------------------------------------
// Cart-pole (Barto, Sutton & Anderson constants, Euler integration).
// ---------------------------------------------------------------------------
namespace cart_pole {
inline constexpr double kGravity = 9.8;
inline constexpr double kCartMass = 1.0;
inline constexpr double kPoleMass = 0.1;
inline constexpr double kTotalMass = kCartMass + kPoleMass;
inline constexpr double kHalfLength = 0.5;
inline constexpr double kPoleMassLength = kPoleMass * kHalfLength;
inline constexpr double kForce = 10.0;
inline constexpr double kDt = 0.02;
inline constexpr double kAngleLimit = 12.0 * std::numbers::pi / 180.0;
inline constexpr double kPositionLimit = 2.4;
inline constexpr std::size_t kMaxSteps = 1000;
// Feature scale for the two unbounded rates; features are clipped to [-1, 1].
inline constexpr double kVelocityScale = 3.0;
inline constexpr double kAngularVelocityScale = 3.5;
enum Action : std::size_t { left = 0, right = 1 };
}  // namespace cart_pole

struct CartPoleState {
  double x = 0.0;
  double x_dot = 0.0;
  double theta = 0.0;
  double theta_dot = 0.0;
};

struct CartPoleOutcome {
  CartPoleState next;
  double reward = 1.0;
  bool terminal = false;  // pole fell or cart left the track
};

CartPoleOutcome cart_pole_step(const CartPoleState& state, std::size_t action);
bool cart_pole_failed(const CartPoleState& state);
FeatureVector cart_pole_features(const CartPoleState& state);

// ---------------------------------------------------------------------------
// Uniform environment interface used by the experiment runner.
// ---------------------------------------------------------------------------
enum class TaskId { random_walk, one_state, mountain_car, cart_pole };

std::string_view to_string(TaskId task);
TaskId parse_task(std::string_view name);

struct EnvSpec {
  TaskId task;
  std::size_t feature_dim;
  std::size_t num_actions;
  double gamma;
  /// Control tasks learn action values; prediction tasks follow a fixed policy.
  bool control;
};

struct EnvOptions {
  std::size_t one_state_length = 10;
  RewardMode reward_mode = RewardMode::noisy_eval;
};

struct StepResult {
  double reward = 0.0;
  bool terminal = false;
};

class Environment {
 public:
  virtual ~Environment() = default;
  virtual const EnvSpec& spec() const = 0;
  virtual void reset(Rng& rng) = 0;
  virtual StepResult step(std::size_t action, Rng& rng) = 0;
  virtual FeatureVector features() const = 0;
  /// Raw state coordinates (state index, counter, or physical variables).
  virtual std::vector<double> raw_state() const = 0;
  /// Action of the fixed evaluation policy in the current state.
  virtual std::size_t evaluation_action() const { return 0; }
};

std::unique_ptr<Environment> make_environment(TaskId task, const EnvOptions& options = {});

/// Feature map of a task applied to raw coordinates as returned by raw_state().
FeatureVector features_from_raw(TaskId task, std::span<const double> raw);

}  // namespace fwdtd
