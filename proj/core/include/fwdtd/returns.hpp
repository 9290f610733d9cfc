#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace fwdtd {

/// Rewards and bootstrap values of one (possibly unfinished) episode.
///
/// Index conventions, with T = length():
///   reward(k) is R_{k+1} for k in [0, T)
///   value(j)  is v_j = V(S_j | theta_{j-1}) for j in [0, T]; v_0 defaults to 0
///             and v_T is forced to 0 once the episode terminates.
class ValueTape {
 public:
  ValueTape(double gamma, double lambda);
  /// `values` must hold rewards.size() + 1 entries.
  ValueTape(double gamma, double lambda, std::vector<double> rewards, std::vector<double> values,
            bool terminal = false);

  double gamma() const { return gamma_; }
  double lambda() const { return lambda_; }
  std::size_t length() const { return rewards_.size(); }
  bool terminal() const { return terminal_; }

  double reward(std::size_t k) const;
  double value(std::size_t j) const;
  const std::vector<double>& rewards() const { return rewards_; }
  const std::vector<double>& values() const { return values_; }

  /// Appends R_{T+1} and v_{T+1}.
  void push(double reward, double next_value);
  /// Appends the final reward with next value 0 and closes the tape.
  void terminate(double reward);
  void set_initial_value(double v0) { values_.front() = v0; }

 private:
  double gamma_;
  double lambda_;
  std::vector<double> rewards_;
  std::vector<double> values_;
  bool terminal_ = false;
};

/// Interim lambda-return G_t^{lambda|h}.
struct BoundedLambdaReturn {
  std::size_t t = 0;
  std::size_t h = 1;
  double value = 0.0;
};

/// G_t^{(n)} = sum_{k=1..n} gamma^{k-1} R_{t+k} + gamma^n v_{t+n}.
double n_step_return(const ValueTape& tape, std::size_t t, std::size_t n);

/// Direct weighted sum of n-step returns; O((h-t)^2). Reference implementation.
BoundedLambdaReturn lambda_return_direct(const ValueTape& tape, std::size_t t, std::size_t h);

/// G_t^{lambda|t+1} = R_{t+1} + gamma v_{t+1}.
BoundedLambdaReturn one_step_lambda_return(const ValueTape& tape, std::size_t t);

/// delta'_h = R_{h+1} + gamma v_{h+1} - v_h.
double delta_prime(const ValueTape& tape, std::size_t h);

/// rho_t = R_{t+1} + gamma (1 - lambda) v_{t+1}.
double rho(const ValueTape& tape, std::size_t t);

/// G_t^{lambda|h+1} = G_t^{lambda|h} + (gamma lambda)^{h-t} delta'_h.
BoundedLambdaReturn extend_horizon(const BoundedLambdaReturn& g, const ValueTape& tape);

/// G_{t+1}^{lambda|h} = (G_t^{lambda|h} - rho_t) / (gamma lambda). Requires h >= t + 2
/// and gamma lambda > 0.
BoundedLambdaReturn shift_start(const BoundedLambdaReturn& g, const ValueTape& tape);

/// All G_k^{lambda|h} for k in [0, h), by the backward recursion
/// G_k = rho_k + gamma lambda G_{k+1}, seeded with G_{h-1} = R_h + gamma v_h.
std::vector<double> lambda_returns_to_horizon(const ValueTape& tape, std::size_t h);

/// Update delay of forward TD(lambda): a finite K, or the episodic mode where all
/// updates wait for the end of the episode.
class Horizon {
 public:
  static Horizon bounded(std::size_t k);
  static Horizon episodic() { return Horizon(0); }

  bool is_episodic() const { return k_ == 0; }
  /// Finite K; throws RangeError in episodic mode.
  std::size_t k() const;
  std::string to_string() const;

  friend bool operator==(const Horizon&, const Horizon&) = default;

 private:
  explicit Horizon(std::size_t k) : k_(k) {}
  std::size_t k_;
};

/// K = ceil(log(eta) / log(gamma lambda)), with K = 1 when gamma lambda < eta, episodic
/// when gamma lambda = 1, clamped to K_max when given.
Horizon compute_horizon(double gamma, double lambda, double eta,
                        std::optional<std::size_t> k_max = std::nullopt);

}  // namespace fwdtd
