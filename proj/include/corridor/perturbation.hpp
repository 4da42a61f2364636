#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

// Volatility schedules: deterministic trajectories of the observation-noise
// variance. A schedule's `magnitude` is the additive variance increment on
// top of the base level, so a family of schedules differing only in
// magnitude forms a one-parameter perturbation ladder.

namespace corridor {

enum class ScheduleKind { Constant, Step, Pulse, Ramp };

inline const char* to_string(ScheduleKind k) {
  switch (k) {
    case ScheduleKind::Constant: return "constant";
    case ScheduleKind::Step: return "step";
    case ScheduleKind::Pulse: return "pulse";
    case ScheduleKind::Ramp: return "ramp";
  }
  return "?";
}

struct PerturbationSchedule {
  ScheduleKind kind = ScheduleKind::Constant;
  double base_sigma_sq = 0.25;
  double magnitude = 0.0;       // additive variance increment
  std::int64_t onset = 0;
  std::int64_t duration = 0;    // Pulse: active steps; Ramp: rise length

  void validate() const {
    if (!(base_sigma_sq >= 0.0)) throw std::invalid_argument("schedule: base_sigma_sq must be >= 0");
    if (!(magnitude >= 0.0)) throw std::invalid_argument("schedule: magnitude must be >= 0");
    if (onset < 0) throw std::invalid_argument("schedule: onset must be >= 0");
    if (duration < 0) throw std::invalid_argument("schedule: duration must be >= 0");
    if (kind == ScheduleKind::Ramp && duration < 1)
      throw std::invalid_argument("schedule: ramp needs duration >= 1");
  }
};

inline double schedule_at(const PerturbationSchedule& s, std::int64_t t) {
  if (t < 0) throw std::domain_error("schedule_at: negative time " + std::to_string(t));
  switch (s.kind) {
    case ScheduleKind::Constant:
      return s.base_sigma_sq;
    case ScheduleKind::Step:
      return t < s.onset ? s.base_sigma_sq : s.base_sigma_sq + s.magnitude;
    case ScheduleKind::Pulse:
      return (t >= s.onset && t < s.onset + s.duration) ? s.base_sigma_sq + s.magnitude
                                                        : s.base_sigma_sq;
    case ScheduleKind::Ramp:
      if (t < s.onset) return s.base_sigma_sq;
      if (t >= s.onset + s.duration) return s.base_sigma_sq + s.magnitude;
      return s.base_sigma_sq +
             s.magnitude * static_cast<double>(t - s.onset) / static_cast<double>(s.duration);
  }
  return s.base_sigma_sq;
}

/// An ascending grid of perturbation magnitudes sharing one schedule shape.
/// At least 3 entries: second differences need three points.
struct PerturbationLadder {
  std::vector<double> magnitudes;
  PerturbationSchedule shape;

  void validate() const {
    shape.validate();
    if (magnitudes.size() < 3)
      throw std::invalid_argument("ladder: needs at least 3 magnitudes");
    for (std::size_t i = 0; i < magnitudes.size(); ++i) {
      if (!(magnitudes[i] >= 0.0)) throw std::invalid_argument("ladder: magnitudes must be >= 0");
      if (i > 0 && !(magnitudes[i] > magnitudes[i - 1]))
        throw std::invalid_argument("ladder: magnitudes must be strictly increasing");
    }
  }
};

inline std::vector<PerturbationSchedule> ladder_schedules(const PerturbationLadder& l) {
  l.validate();
  std::vector<PerturbationSchedule> out;
  out.reserve(l.magnitudes.size());
  for (double m : l.magnitudes) {
    PerturbationSchedule s = l.shape;
    s.magnitude = m;
    out.push_back(s);
  }
  return out;
}

}  // namespace corridor
