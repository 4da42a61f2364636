#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace corridor {

/// A probability constrained to the open interval (0,1), with a numerical
/// guard band: values within 1e-12 of either endpoint are rejected rather
/// than clamped, so downstream log/ratio arithmetic stays finite.
class Probability {
public:
  static constexpr double kGuard = 1e-12;

  explicit Probability(double value) : value_(value) {
    if (!(value >= kGuard && value <= 1.0 - kGuard)) {
      throw std::domain_error("Probability must lie in [1e-12, 1-1e-12], got " +
                              std::to_string(value));
    }
  }

  double value() const noexcept { return value_; }
  double complement() const noexcept { return 1.0 - value_; }

  friend bool operator==(Probability a, Probability b) noexcept { return a.value_ == b.value_; }
  friend bool operator<(Probability a, Probability b) noexcept { return a.value_ < b.value_; }
  friend bool operator>(Probability a, Probability b) noexcept { return a.value_ > b.value_; }
  friend bool operator<=(Probability a, Probability b) noexcept { return a.value_ <= b.value_; }
  friend bool operator>=(Probability a, Probability b) noexcept { return a.value_ >= b.value_; }

private:
  double value_;
};

}  // namespace corridor
