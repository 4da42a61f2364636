#pragma once

#include <cmath>
#include <stdexcept>

#include "corridor/probability.hpp"

// Net informational balance of a binary split: the expected surprise carried
// by the unexplained fraction minus the self-information of the explained
// one, f(p) = -(1-p)*ln(1-p) + ln(p), in nats. The function is strictly
// concave on (0,1) with a single interior maximum and a single interior zero;
// both are exposed as landmarks alongside the self-similar golden partition.

namespace corridor {

// ln(1-p) without forming 1-p, stable as p -> 1.
inline double log_complement(double p) { return std::log1p(-p); }

inline double balance(Probability p) {
  const double v = p.value();
  return -(1.0 - v) * log_complement(v) + std::log(v);
}

struct BalanceComponents {
  double term_unknown;  // -(1-p) ln(1-p): expected surprise from the complement
  double term_known;    // -ln p: surprise of confirming the expected outcome
};

inline BalanceComponents balance_components(Probability p) {
  const double v = p.value();
  return {-(1.0 - v) * log_complement(v), -std::log(v)};
}

// f'(p) = 1 + ln(1-p) + 1/p, strictly decreasing on (0,1).
inline double balance_derivative(Probability p) {
  const double v = p.value();
  return 1.0 + log_complement(v) + 1.0 / v;
}

// f''(p) = -1/(1-p) - 1/p^2 < 0 everywhere in the domain.
inline double balance_second_derivative(Probability p) {
  const double v = p.value();
  return -1.0 / (1.0 - v) - 1.0 / (v * v);
}

// Shannon entropy of a Bernoulli(p) outcome, in nats.
inline double bernoulli_entropy(Probability p) {
  const double v = p.value();
  return -v * std::log(v) - (1.0 - v) * log_complement(v);
}

struct BalanceProfile {
  Probability p;
  double f;
  double f_prime;
  double f_double_prime;
  double term_unknown;
  double term_known;
};

inline BalanceProfile balance_profile(Probability p) {
  const auto [tu, tk] = balance_components(p);
  return {p, tu - tk, balance_derivative(p), balance_second_derivative(p), tu, tk};
}

/// Position of a probability relative to the corridor [p_phi, p_star].
/// Both boundaries belong to the corridor.
enum class CorridorZone { BelowPartition, InCorridor, AbovePeak };

inline const char* to_string(CorridorZone z) {
  switch (z) {
    case CorridorZone::BelowPartition: return "BelowPartition";
    case CorridorZone::InCorridor: return "InCorridor";
    case CorridorZone::AbovePeak: return "AbovePeak";
  }
  return "?";
}

/// The unique p with p:(1-p) = 1:p, i.e. the positive root of p^2 + p - 1,
/// equal to 1/phi = phi - 1 where phi is the golden ratio.
inline Probability golden_partition() {
  return Probability((std::sqrt(5.0) - 1.0) / 2.0);
}

struct MaximizerResult {
  Probability p_star;
  double f_at_p_star;
};

/// Locates the unique root of f' in (0,1) by bisection. f' decreases
/// strictly from +inf at 0+ to -inf at 1-, so the sign change brackets the
/// maximizer; the bracket is narrowed to machine width, which satisfies any
/// tolerance down to ~1e-12 on |f'|.
inline MaximizerResult find_maximizer(double tolerance) {
  if (!(tolerance > 0.0)) throw std::invalid_argument("find_maximizer: tolerance must be > 0");
  double lo = Probability::kGuard;
  double hi = 1.0 - Probability::kGuard;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket at machine resolution
    const double d = balance_derivative(Probability(mid));
    if (d > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const Probability root(0.5 * (lo + hi));
  return {root, balance(root)};
}

/// The unique interior zero of f. f rises through zero once below the
/// maximizer; the p -> 1 tail approaches zero from above and is not a root.
inline Probability find_interior_zero(double tolerance) {
  if (!(tolerance > 0.0)) throw std::invalid_argument("find_interior_zero: tolerance must be > 0");
  double lo = Probability::kGuard;   // f -> -inf
  double hi = 0.88;                  // f(0.88) > 0, below the maximizer
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (balance(Probability(mid)) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return Probability(0.5 * (lo + hi));
}

struct Landmarks {
  Probability p_star;    // maximizer of f
  double f_at_p_star;
  Probability p_phi;     // golden partition
  Probability p_zero;    // interior zero of f
  double tolerance;
};

inline Landmarks compute_landmarks(double tolerance = 1e-10) {
  const auto m = find_maximizer(tolerance);
  return {m.p_star, m.f_at_p_star, golden_partition(), find_interior_zero(tolerance), tolerance};
}

inline CorridorZone corridor_classify(Probability p, const Landmarks& lm) {
  if (p < lm.p_phi) return CorridorZone::BelowPartition;
  if (p > lm.p_star) return CorridorZone::AbovePeak;
  return CorridorZone::InCorridor;
}

}  // namespace corridor
