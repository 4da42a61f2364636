#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "corridor/agent.hpp"
#include "corridor/balance.hpp"

// The compute / inference / model / action cycle. Each step the loop
// estimates the explained-variance fraction, evaluates the balance function
// and corridor position, regulates the agent's precision weighting toward a
// target partition, and injects or damps observation noise at the corridor
// extremes.

namespace corridor {

enum class CimaAction { None, RaiseGain, LowerGain, InjectNoise, DampNoise };

inline const char* to_string(CimaAction a) {
  switch (a) {
    case CimaAction::None: return "None";
    case CimaAction::RaiseGain: return "RaiseGain";
    case CimaAction::LowerGain: return "LowerGain";
    case CimaAction::InjectNoise: return "InjectNoise";
    case CimaAction::DampNoise: return "DampNoise";
  }
  return "?";
}

struct CimaConfig {
  Probability target_p;
  Probability corridor_low;
  Probability corridor_high;
  double gain_step = 1.0005;          // multiplicative omega adjustment per step
  double noise_inject_sigma_sq = 0.25;
  double deadband = 0.02;             // no-action half-width around target_p

  explicit CimaConfig(const Landmarks& lm)
      : target_p(lm.p_phi), corridor_low(lm.p_phi), corridor_high(lm.p_star) {}

  void validate() const {
    if (!(corridor_low < corridor_high))
      throw std::invalid_argument("cima: corridor_low must be < corridor_high");
    if (target_p < corridor_low || target_p > corridor_high)
      throw std::invalid_argument("cima: target_p must lie within the corridor");
    if (!(gain_step > 0.0)) throw std::invalid_argument("cima: gain_step must be > 0");
    if (!(noise_inject_sigma_sq >= 0.0))
      throw std::invalid_argument("cima: noise_inject_sigma_sq must be >= 0");
    if (!(deadband >= 0.0)) throw std::invalid_argument("cima: deadband must be >= 0");
  }
};

struct CimaDiagnostics {
  Probability p_hat;
  double f_value;             // balance(p_hat)
  CorridorZone corridor_state;
  CimaAction action_taken = CimaAction::None;
  double omega = 0.0;         // agent gains after the model stage
  double alpha = 0.0;
};

// Compute: current explained-variance estimate, absent while the window fills.
inline std::optional<Probability> compute_stage(const AgentState& agent) {
  return explained_variance(agent);
}

// Inference: balance value and corridor position for the estimate.
inline CimaDiagnostics inference_stage(Probability p_hat, const Landmarks& lm) {
  return {p_hat, balance(p_hat), corridor_classify(p_hat, lm), CimaAction::None, 0.0, 0.0};
}

// Model: steer omega toward the target partition, multiplicatively, with a
// deadband. Raising is capped so omega <= 1 and alpha*omega stays below 2.
inline CimaAction model_stage(AgentState& agent, const CimaDiagnostics& diag,
                              const CimaConfig& cfg) {
  const double p = diag.p_hat.value();
  const double target = cfg.target_p.value();
  if (p < target - cfg.deadband) {
    const double cap = std::min(1.0, (2.0 - 1e-12) / agent.alpha);
    const double raised = std::min(agent.omega * cfg.gain_step, cap);
    if (raised != agent.omega) {
      agent.omega = raised;
      return CimaAction::RaiseGain;
    }
    return CimaAction::None;  // saturated at the cap
  }
  if (p > target + cfg.deadband) {
    agent.omega /= cfg.gain_step;
    return CimaAction::LowerGain;
  }
  return CimaAction::None;
}

// Action: outside the deadband, inject noise above the peak and withdraw
// previously injected noise below the partition. The injected stock is
// tracked separately so damping never cuts into scheduled variance.
inline CimaAction action_stage(EnvState& env, double& injected_stock,
                               const CimaDiagnostics& diag, const CimaConfig& cfg) {
  const double p = diag.p_hat.value();
  if (std::abs(p - cfg.target_p.value()) <= cfg.deadband) return CimaAction::None;
  if (diag.corridor_state == CorridorZone::AbovePeak && cfg.noise_inject_sigma_sq > 0.0) {
    env.sigma_sq += cfg.noise_inject_sigma_sq;
    injected_stock += cfg.noise_inject_sigma_sq;
    return CimaAction::InjectNoise;
  }
  if (diag.corridor_state == CorridorZone::BelowPartition && injected_stock > 0.0) {
    env.sigma_sq = std::max(0.0, env.sigma_sq - injected_stock);
    injected_stock = 0.0;
    return CimaAction::DampNoise;
  }
  return CimaAction::None;
}

struct CimaStep {
  StepRecord step;
  std::optional<CimaDiagnostics> diag;  // absent while the window fills
};

/// Full closed-loop run. Per step: compose sigma_sq from the schedule plus
/// the injected stock, then environment step, agent update, and the four
/// stages. Consumes randomness exactly like run_episode, so an inert
/// controller reproduces the open-loop trace bit for bit.
inline std::vector<CimaStep> run_cima(EnvState env, AgentState agent,
                                      const PerturbationSchedule& schedule,
                                      const CimaConfig& cfg, const Landmarks& lm,
                                      std::int64_t T) {
  if (T < 1) throw std::invalid_argument("run_cima: T must be >= 1");
  env.validate();
  schedule.validate();
  cfg.validate();
  std::vector<CimaStep> out;
  out.reserve(static_cast<std::size_t>(T));
  double injected = 0.0;
  for (std::int64_t t = 0; t < T; ++t) {
    env.sigma_sq = schedule_at(schedule, t) + injected;
    const double y = env_step(env);
    StepRecord rec = agent_update(agent, y);
    rec.t = t;
    rec.sigma_sq = env.sigma_sq;
    const auto p_hat = compute_stage(agent);
    rec.p_hat = p_hat;
    std::optional<CimaDiagnostics> diag;
    if (p_hat) {
      CimaDiagnostics d = inference_stage(*p_hat, lm);
      const CimaAction model_action = model_stage(agent, d, cfg);
      const CimaAction env_action = action_stage(env, injected, d, cfg);
      d.action_taken = env_action != CimaAction::None ? env_action : model_action;
      d.omega = agent.omega;
      d.alpha = agent.alpha;
      diag = d;
    }
    out.push_back({rec, diag});
  }
  return out;
}

}  // namespace corridor
