#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "corridor/perturbation.hpp"
#include "corridor/probability.hpp"
#include "corridor/ring_buffer.hpp"
#include "corridor/rng.hpp"

// Minimal scalar predictive-coding loop: a latent environment emits noisy
// observations y = theta + eta, the agent keeps a point estimate mu, updates
// it by precision-weighted prediction error, and scores itself by the
// fraction of observed variance its predictions explain over a sliding
// window.

namespace corridor {

enum class DriftMode { Static, RandomWalk, Ar1 };

inline const char* to_string(DriftMode m) {
  switch (m) {
    case DriftMode::Static: return "static";
    case DriftMode::RandomWalk: return "random_walk";
    case DriftMode::Ar1: return "ar1";
  }
  return "?";
}

struct EnvState {
  double theta = 0.0;
  double sigma_sq = 1.0;  // current observation-noise variance
  DriftMode drift_mode = DriftMode::RandomWalk;
  double drift_param = 0.05;  // RandomWalk: step scale; Ar1: coefficient
  double drift_scale = 0.05;  // Ar1 innovation scale (unused otherwise)
  Rng rng;                    // observation stream, independent of the agent

  EnvState() : rng(0) {}
  explicit EnvState(std::uint64_t stream_seed) : rng(stream_seed) {}

  void validate() const {
    if (!(sigma_sq >= 0.0)) throw std::invalid_argument("env: sigma_sq must be >= 0");
    if (drift_mode == DriftMode::Ar1 && !(std::abs(drift_param) < 1.0))
      throw std::invalid_argument("env: AR1 coefficient magnitude must be < 1");
  }
};

/// Advances the latent state one step and emits an observation. A noise
/// variate is drawn even when sigma_sq is zero, so the stream consumption
/// rate does not depend on the schedule.
inline double env_step(EnvState& env) {
  switch (env.drift_mode) {
    case DriftMode::Static:
      break;
    case DriftMode::RandomWalk:
      env.theta += env.drift_param * env.rng.normal();
      break;
    case DriftMode::Ar1:
      env.theta = env.drift_param * env.theta + env.drift_scale * env.rng.normal();
      break;
  }
  return env.theta + std::sqrt(env.sigma_sq) * env.rng.normal();
}

struct AgentState {
  double mu;     // internal estimate of the latent state
  double alpha;  // learning-rate parameter, (0, 2]
  double omega;  // precision weighting, (0, 1]
  RingBuffer<double> error_window;
  RingBuffer<double> obs_window;
  double p_clamp = 1e-6;          // explained-variance clamp into the open interval
  double variance_floor = 1e-12;  // below this Var(y), p is not estimable

  AgentState(double mu0, double alpha_, double omega_, std::size_t window_capacity)
      : mu(mu0),
        alpha(alpha_),
        omega(omega_),
        error_window(window_capacity),
        obs_window(window_capacity) {
    if (window_capacity < 8) throw std::invalid_argument("agent: window capacity must be >= 8");
    if (!(alpha > 0.0 && alpha <= 2.0)) throw std::invalid_argument("agent: alpha must be in (0, 2]");
    if (!(omega > 0.0 && omega <= 1.0)) throw std::invalid_argument("agent: omega must be in (0, 1]");
    if (!(alpha * omega > 0.0 && alpha * omega < 2.0))
      throw std::invalid_argument("agent: alpha*omega must be in (0, 2)");
  }
};

struct StepRecord {
  std::int64_t t = 0;
  double y = 0.0;
  double prediction = 0.0;
  double epsilon = 0.0;  // y - prediction, exactly
  std::optional<Probability> p_hat;
  double sigma_sq = 0.0;
};

/// One prediction-error update: predict y_hat = mu, compute the error,
/// correct mu by alpha*omega*error, and append (error, y) to the windows.
inline StepRecord agent_update(AgentState& agent, double y) {
  StepRecord rec;
  rec.y = y;
  rec.prediction = agent.mu;
  rec.epsilon = y - rec.prediction;
  agent.mu += agent.alpha * agent.omega * rec.epsilon;
  agent.error_window.push(rec.epsilon);
  agent.obs_window.push(y);
  return rec;
}

/// Fraction of windowed observation variance the predictions explain:
/// p = 1 - Var(eps)/Var(y), unbiased estimators, clamped into
/// [p_clamp, 1 - p_clamp]. Absent until the window is full or while Var(y)
/// sits below the variance floor.
inline std::optional<Probability> explained_variance(const AgentState& agent) {
  if (!agent.error_window.full()) return std::nullopt;
  const double var_y = sample_variance(agent.obs_window);
  if (var_y < agent.variance_floor) return std::nullopt;
  const double var_e = sample_variance(agent.error_window);
  double p = 1.0 - var_e / var_y;
  if (p < agent.p_clamp) p = agent.p_clamp;
  if (p > 1.0 - agent.p_clamp) p = 1.0 - agent.p_clamp;
  return Probability(p);
}

/// Open-loop episode: the schedule drives sigma_sq, the agent just tracks.
/// Bit-identical traces under identical seeds and configuration.
inline std::vector<StepRecord> run_episode(EnvState env, AgentState agent,
                                           const PerturbationSchedule& schedule, std::int64_t T) {
  if (T < 1) throw std::invalid_argument("run_episode: T must be >= 1");
  env.validate();
  schedule.validate();
  std::vector<StepRecord> trace;
  trace.reserve(static_cast<std::size_t>(T));
  for (std::int64_t t = 0; t < T; ++t) {
    env.sigma_sq = schedule_at(schedule, t);
    const double y = env_step(env);
    StepRecord rec = agent_update(agent, y);
    rec.t = t;
    rec.sigma_sq = env.sigma_sq;
    rec.p_hat = explained_variance(agent);
    trace.push_back(rec);
  }
  return trace;
}

}  // namespace corridor
