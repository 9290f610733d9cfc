#pragma once

#include <stdexcept>
#include <string>

namespace fwdtd {

/// Feature or weight vector length does not match the approximator.
class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

/// A time index or horizon lies outside the recorded tape.
class RangeError : public std::out_of_range {
 public:
  explicit RangeError(const std::string& what) : std::out_of_range(what) {}
};

/// Invalid experiment configuration or hyperparameter.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// The weight change of a run is numerically zero, so a ratio against it is undefined.
class DegenerateTrajectoryError : public std::runtime_error {
 public:
  explicit DegenerateTrajectoryError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fwdtd
