#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "corridor/agent.hpp"

using namespace corridor;

namespace {

AgentState make_test_agent(double mu0 = 0.0, double alpha = 1.0, double omega = 0.5,
                           std::size_t window = 64) {
  return AgentState(mu0, alpha, omega, window);
}

// offline recomputation of explained variance from a trace window, written
// against the raw series rather than the agent's ring buffers
double batch_p_hat(const std::vector<StepRecord>& trace, std::size_t end_inclusive,
                   std::size_t window, double p_clamp) {
  std::vector<double> ys, es;
  for (std::size_t t = end_inclusive + 1 - window; t <= end_inclusive; ++t) {
    ys.push_back(trace[t].y);
    es.push_back(trace[t].epsilon);
  }
  const double p = 1.0 - sample_variance(es) / sample_variance(ys);
  return std::min(std::max(p, p_clamp), 1.0 - p_clamp);
}

}  // namespace

TEST_CASE("env_step is exact with zero noise and a static latent") {
  EnvState env(123);
  env.drift_mode = DriftMode::Static;
  env.theta = 1.5;
  env.sigma_sq = 0.0;
  for (int i = 0; i < 10; ++i) REQUIRE(env_step(env) == 1.5);
}

TEST_CASE("env_step is reproducible for a fixed seed") {
  EnvState a(99), b(99);
  a.drift_mode = b.drift_mode = DriftMode::Static;
  a.sigma_sq = b.sigma_sq = 1.0;
  for (int i = 0; i < 1000; ++i) REQUIRE(env_step(a) == env_step(b));

  EnvState c(100);
  c.drift_mode = DriftMode::Static;
  c.sigma_sq = 1.0;
  bool all_equal = true;
  EnvState a2(99);
  a2.drift_mode = DriftMode::Static;
  a2.sigma_sq = 1.0;
  for (int i = 0; i < 100; ++i) {
    if (env_step(a2) != env_step(c)) all_equal = false;
  }
  REQUIRE_FALSE(all_equal);
}

TEST_CASE("random walk increments have the configured variance") {
  EnvState env(7);
  env.drift_mode = DriftMode::RandomWalk;
  env.drift_param = 0.1;
  env.sigma_sq = 0.0;
  std::vector<double> increments;
  double prev = env.theta;
  for (int i = 0; i < 10000; ++i) {
    env_step(env);
    increments.push_back(env.theta - prev);
    prev = env.theta;
  }
  const double var = sample_variance(increments);
  CHECK(var > 0.009);
  CHECK(var < 0.011);
}

TEST_CASE("ar1 validation rejects non-contracting coefficients") {
  EnvState env(1);
  env.drift_mode = DriftMode::Ar1;
  env.drift_param = 1.0;
  CHECK_THROWS_AS(env.validate(), std::invalid_argument);
  env.drift_param = -1.2;
  CHECK_THROWS_AS(env.validate(), std::invalid_argument);
  env.drift_param = 0.95;
  CHECK_NOTHROW(env.validate());
}

TEST_CASE("agent_update fixed point and full correction") {
  auto a = make_test_agent(2.0, 1.0, 1.0);
  const auto rec = agent_update(a, 2.0);
  CHECK(rec.epsilon == 0.0);
  CHECK(a.mu == 2.0);

  auto b = make_test_agent(0.0, 1.0, 1.0);
  agent_update(b, 3.0);
  CHECK(b.mu == 3.0);

  auto c = make_test_agent(1.0, 0.5, 0.5);
  const auto rc = agent_update(c, 2.0);
  CHECK(rc.epsilon == 1.0);
  CHECK(c.mu == 1.25);
}

TEST_CASE("agent construction enforces the gain region") {
  CHECK_THROWS_AS(AgentState(0.0, 2.5, 0.5, 64), std::invalid_argument);
  CHECK_THROWS_AS(AgentState(0.0, 1.0, 1.5, 64), std::invalid_argument);
  CHECK_THROWS_AS(AgentState(0.0, 2.0, 1.0, 64), std::invalid_argument);  // product exactly 2
  CHECK_THROWS_AS(AgentState(0.0, 1.0, 0.0, 64), std::invalid_argument);
  CHECK_THROWS_AS(AgentState(0.0, 1.0, 0.5, 4), std::invalid_argument);   // window too small
  CHECK_NOTHROW(AgentState(0.0, 2.0, 0.9, 8));
}

TEST_CASE("explained variance is absent until the window fills") {
  auto a = make_test_agent(0.0, 1.0, 0.5, 16);
  EnvState env(5);
  env.drift_mode = DriftMode::Static;
  env.sigma_sq = 1.0;
  for (int i = 0; i < 15; ++i) {
    agent_update(a, env_step(env));
    REQUIRE_FALSE(explained_variance(a).has_value());
  }
  agent_update(a, env_step(env));
  REQUIRE(explained_variance(a).has_value());
}

TEST_CASE("explained variance clamps at both extremes") {
  // perfect prediction: zero errors against spread observations
  auto perfect = make_test_agent(0.0, 1.0, 0.5, 16);
  for (int i = 0; i < 16; ++i) {
    perfect.error_window.push(0.0);
    perfect.obs_window.push(static_cast<double>(i % 5));
  }
  auto p = explained_variance(perfect);
  REQUIRE(p.has_value());
  CHECK(p->value() == 1.0 - 1e-6);

  // model explains nothing: errors identical to observations
  auto blind = make_test_agent(0.0, 1.0, 0.5, 16);
  for (int i = 0; i < 16; ++i) {
    const double v = std::sin(0.7 * i);
    blind.error_window.push(v);
    blind.obs_window.push(v);
  }
  p = explained_variance(blind);
  REQUIRE(p.has_value());
  CHECK(p->value() == 1e-6);
}

TEST_CASE("explained variance reports not-estimable under the variance floor") {
  auto a = make_test_agent(0.0, 1.0, 0.5, 16);
  for (int i = 0; i < 16; ++i) {
    a.error_window.push(0.0);
    a.obs_window.push(4.2);  // flat observations, Var(y) = 0
  }
  CHECK_FALSE(explained_variance(a).has_value());
}

TEST_CASE("windowed estimate equals offline batch recomputation") {
  EnvState env(11);
  env.drift_mode = DriftMode::Static;
  env.theta = 0.0;
  PerturbationSchedule sched;
  sched.kind = ScheduleKind::Constant;
  sched.base_sigma_sq = 1.0;
  const std::size_t W = 256;
  AgentState agent(0.0, 1.0, 0.5, W);
  const auto trace = run_episode(env, agent, sched, 2000);
  for (std::size_t t = W - 1; t < trace.size(); t += 97) {
    REQUIRE(trace[t].p_hat.has_value());
    const double offline = batch_p_hat(trace, t, W, 1e-6);
    REQUIRE(std::abs(trace[t].p_hat->value() - offline) < 1e-12);
  }
}

TEST_CASE("run_episode enforces the length contract") {
  EnvState env(3);
  AgentState agent = make_test_agent();
  PerturbationSchedule sched;
  CHECK_THROWS_AS(run_episode(env, agent, sched, 0), std::invalid_argument);
  CHECK(run_episode(env, agent, sched, 1).size() == 1);
}

TEST_CASE("run_episode is bit-deterministic and mirrors the schedule") {
  PerturbationSchedule sched;
  sched.kind = ScheduleKind::Pulse;
  sched.base_sigma_sq = 0.5;
  sched.magnitude = 2.0;
  sched.onset = 50;
  sched.duration = 20;

  const auto t1 = run_episode(EnvState(21), make_test_agent(), sched, 200);
  const auto t2 = run_episode(EnvState(21), make_test_agent(), sched, 200);
  REQUIRE(t1.size() == t2.size());
  for (std::size_t i = 0; i < t1.size(); ++i) {
    REQUIRE(t1[i].y == t2[i].y);
    REQUIRE(t1[i].prediction == t2[i].prediction);
    REQUIRE(t1[i].epsilon == t2[i].epsilon);
    REQUIRE(t1[i].sigma_sq == schedule_at(sched, t1[i].t));
  }
}

TEST_CASE("error identity holds exactly on every record") {
  EnvState env(77);
  env.drift_mode = DriftMode::RandomWalk;
  env.drift_param = 0.2;
  PerturbationSchedule sched;
  sched.base_sigma_sq = 1.3;
  for (const auto& rec : run_episode(env, make_test_agent(), sched, 3000)) {
    REQUIRE(rec.epsilon == rec.y - rec.prediction);
  }
}

TEST_CASE("mu stays bounded across the whole stable gain region") {
  for (double gain : {0.1, 1.0, 1.9}) {
    EnvState env(31);
    env.drift_mode = DriftMode::Static;
    env.sigma_sq = 1.0;
    AgentState agent(0.0, 1.0, gain / 2.0, 8);
    agent.alpha = 2.0;  // alpha*omega = gain
    PerturbationSchedule sched;
    sched.base_sigma_sq = 1.0;
    const auto trace = run_episode(env, agent, sched, 1000000);
    double max_abs = 0.0;
    for (const auto& r : trace) max_abs = std::max(max_abs, std::abs(r.prediction));
    REQUIRE(std::isfinite(max_abs));
    REQUIRE(max_abs < 100.0);
  }
}

TEST_CASE("steady-state error variance grows with observation noise") {
  const std::vector<double> ladder = {0.25, 0.5, 1.0, 2.0, 4.0};
  std::vector<double> mean_var(ladder.size(), 0.0);
  const int seeds = 100;
  for (int s = 0; s < seeds; ++s) {
    for (std::size_t k = 0; k < ladder.size(); ++k) {
      EnvState env(1000 + static_cast<std::uint64_t>(s));
      env.drift_mode = DriftMode::Static;
      PerturbationSchedule sched;
      sched.base_sigma_sq = ladder[k];
      AgentState agent(0.0, 1.0, 0.5, 8);
      const auto trace = run_episode(env, agent, sched, 1500);
      std::vector<double> tail;
      for (std::size_t t = 500; t < trace.size(); ++t) tail.push_back(trace[t].epsilon);
      mean_var[k] += sample_variance(tail) / seeds;
    }
  }
  for (std::size_t k = 1; k < ladder.size(); ++k) REQUIRE(mean_var[k] >= mean_var[k - 1]);
}
