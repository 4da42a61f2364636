#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "corridor/config.hpp"
#include "corridor/manifest.hpp"
#include "corridor/parallel.hpp"
#include "corridor/trace_io.hpp"

using namespace corridor;
using nlohmann::json;

TEST_CASE("default config validates and resolves its ladder") {
  ExperimentConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  const auto mags = cfg.resolved_magnitudes();
  REQUIRE(mags.size() == 7);
  CHECK(mags.front() == 0.25);
  CHECK(mags.back() == 16.0);
  CHECK(cfg.resolved_sweep_onset() == cfg.sweep.T / 2);
}

TEST_CASE("unknown keys are all reported with their locations") {
  const json j = {
      {"master_seed", 7},
      {"sneed", 1},
      {"episode", {{"T", 100}, {"controler", true}, {"env", {{"theta", 0.5}}}}},
  };
  try {
    ExperimentConfig::from_json(j);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    REQUIRE(e.issues().size() == 3);
    const std::string all = e.what();
    CHECK(all.find("$: unknown key 'sneed'") != std::string::npos);
    CHECK(all.find("$.episode: unknown key 'controler'") != std::string::npos);
    CHECK(all.find("$.episode.env: unknown key 'theta'") != std::string::npos);
  }
}

TEST_CASE("value validation lists every offending key") {
  ExperimentConfig cfg;
  cfg.balance.grid_points = 1;
  cfg.workers = 0;
  cfg.format = "xml";
  try {
    cfg.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string all = e.what();
    CHECK(all.find("$.balance.grid_points") != std::string::npos);
    CHECK(all.find("$.workers") != std::string::npos);
    CHECK(all.find("$.format") != std::string::npos);
  }
}

TEST_CASE("config roundtrips through its JSON snapshot") {
  ExperimentConfig cfg;
  cfg.master_seed = 777;
  cfg.episode.env.drift_mode = "random_walk";
  cfg.episode.env.drift_param = 0.42;
  cfg.sweep.trials = 12;
  const auto snap = cfg.to_json();
  const auto back = ExperimentConfig::from_json(snap);
  CHECK(back.master_seed == 777);
  CHECK(back.episode.env.drift_mode == "random_walk");
  CHECK(back.episode.env.drift_param == 0.42);
  CHECK(back.sweep.trials == 12);
  // resolved snapshot pins the landmark-dependent defaults
  CHECK(snap["episode"]["cima"]["target_p"].get<double>() ==
        Catch::Approx(0.6180339887498949).epsilon(1e-12));
  CHECK(snap["episode"]["cima"]["corridor_high"].get<double>() ==
        Catch::Approx(0.881663146369918).epsilon(1e-9));
}

TEST_CASE("sweep window misfits are caught at validation time") {
  ExperimentConfig cfg;
  cfg.sweep.T = 1000;  // default windows cannot fit
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.sweep.synthetic.enabled = true;  // synthetic mode skips the geometry
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("stream derivation separates and reproduces streams") {
  const std::uint64_t master = 42;
  std::set<std::uint64_t> seen;
  for (std::uint64_t tag = 1; tag <= 4; ++tag) {
    for (std::uint64_t i = 0; i < 20; ++i) {
      for (std::uint64_t j = 0; j < 20; ++j) {
        seen.insert(derive_stream(master, {tag, i, j}));
      }
    }
  }
  CHECK(seen.size() == 4 * 20 * 20);  // no collisions across the grid
  CHECK(derive_stream(42, {1, 2, 3}) == derive_stream(42, {1, 2, 3}));
  CHECK(derive_stream(42, {1, 2, 3}) != derive_stream(43, {1, 2, 3}));
  CHECK(derive_stream(42, {1, 2}) != derive_stream(42, {2, 1}));
}

TEST_CASE("rng normal moments are sane") {
  Rng rng(1);
  const int n = 200000;
  double sum = 0.0, ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    ss += z * z;
  }
  const double mean = sum / n;
  const double var = ss / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("trace csv roundtrips bit-exactly") {
  std::vector<StepRecord> trace(64);
  Rng rng(5);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    trace[i].t = static_cast<std::int64_t>(i);
    trace[i].y = rng.normal() * 1e3;
    trace[i].prediction = rng.normal();
    trace[i].epsilon = trace[i].y - trace[i].prediction;
    trace[i].sigma_sq = std::abs(rng.normal());
    if (i % 3 == 0) trace[i].p_hat = Probability(0.5 + 0.4 * rng.uniform01());
  }
  std::stringstream ss;
  write_trace_csv(ss, trace);
  const auto back = read_trace_csv(ss);
  REQUIRE(back.size() == trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    REQUIRE(back[i].t == trace[i].t);
    REQUIRE(back[i].y == trace[i].y);
    REQUIRE(back[i].prediction == trace[i].prediction);
    REQUIRE(back[i].epsilon == trace[i].epsilon);
    REQUIRE(back[i].sigma_sq == trace[i].sigma_sq);
    REQUIRE(back[i].p_hat.has_value() == trace[i].p_hat.has_value());
    if (trace[i].p_hat) REQUIRE(back[i].p_hat->value() == trace[i].p_hat->value());
  }
}

TEST_CASE("trace jsonl roundtrips bit-exactly") {
  std::vector<StepRecord> trace(16);
  Rng rng(6);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    trace[i].t = static_cast<std::int64_t>(i);
    trace[i].y = rng.normal();
    trace[i].epsilon = rng.normal();
    trace[i].sigma_sq = 0.25;
    if (i > 7) trace[i].p_hat = Probability(0.618);
  }
  std::stringstream ss;
  write_trace_jsonl(ss, trace);
  const auto back = read_trace_jsonl(ss);
  REQUIRE(back.size() == trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    REQUIRE(back[i].y == trace[i].y);
    REQUIRE(back[i].epsilon == trace[i].epsilon);
    REQUIRE(back[i].p_hat.has_value() == trace[i].p_hat.has_value());
  }
}

TEST_CASE("malformed trace files report line numbers") {
  std::stringstream bad_header("nope\n1,2,3,4,,5\n");
  try {
    read_trace_csv(bad_header);
    FAIL("expected error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("line 1") != std::string::npos);
  }

  std::stringstream bad_cell(std::string(kTraceHeader) + "\n0,1.0,0.5,0.5,,0.25\n1,oops,0.5,0.5,,0.25\n");
  try {
    read_trace_csv(bad_cell);
    FAIL("expected error");
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(msg.find("oops") != std::string::npos);
  }

  std::stringstream wide(std::string(kTraceHeader) + "\n0,1.0,0.5,0.5,,0.25,9\n");
  try {
    read_trace_csv(wide);
    FAIL("expected error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("format_double writes shortest round-trip forms") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -42.5, 0.0, 16.0}) {
    const std::string s = format_double(v);
    CHECK(parse_double(s, "x", 1) == v);
  }
  CHECK(format_double(0.25) == "0.25");
  CHECK(format_double(16.0) == "16");
}

TEST_CASE("fnv1a64 checksums are stable and content-sensitive") {
  const std::string a = "t,y\n0,1.5\n";
  const std::string b = "t,y\n0,1.6\n";
  CHECK(fnv1a64(a.data(), a.size()) == fnv1a64(a.data(), a.size()));
  CHECK(fnv1a64(a.data(), a.size()) != fnv1a64(b.data(), b.size()));

  namespace fs = std::filesystem;
  const fs::path p = fs::temp_directory_path() / "corridor_checksum_test.txt";
  {
    std::ofstream os(p, std::ios::binary);
    os << a;
  }
  std::uint64_t bytes = 0;
  CHECK(fnv1a64_file(p.string(), &bytes) == fnv1a64(a.data(), a.size()));
  CHECK(bytes == a.size());
  fs::remove(p);
}

TEST_CASE("manifest json carries version, config, and outputs") {
  RunManifest m;
  m.command = "balance";
  m.master_seed = 42;
  m.config_snapshot = ExperimentConfig().to_json();
  m.outputs.push_back({"balance_grid.csv", 0x1234, 99});
  const auto j = m.to_json();
  CHECK(j["artifact_version"] == kArtifactVersion);
  CHECK(j["command"] == "balance");
  CHECK(j["outputs"][0]["path"] == "balance_grid.csv");
  CHECK(j["outputs"][0]["bytes"] == 99);
}

TEST_CASE("parallel_for fills disjoint slots identically to serial") {
  std::vector<double> serial(500), parallel(500);
  auto work = [](std::size_t i) {
    double acc = 0.0;
    Rng rng(derive_stream(9, {5, i}));
    for (int k = 0; k < 100; ++k) acc += rng.normal();
    return acc;
  };
  parallel_for(serial.size(), 1, [&](std::size_t i) { serial[i] = work(i); });
  parallel_for(parallel.size(), 4, [&](std::size_t i) { parallel[i] = work(i); });
  for (std::size_t i = 0; i < serial.size(); ++i) REQUIRE(serial[i] == parallel[i]);
}
