#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "corridor/antifragility.hpp"
#include "corridor/cima.hpp"

// File formats. CSV column order is part of the contract and never changes:
//   trace:       t,y,prediction,epsilon,p_hat,sigma_sq
//   diagnostics: t,p_hat,f_value,corridor_state,action_taken,omega,alpha
//   curve:       magnitude,phi,phi_std_error,e_before,e_after,trials
// Doubles are written with std::to_chars (shortest round-trip form), so
// outputs are locale-independent and read back bit-exactly.

namespace corridor {

inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s, const char* what, std::size_t line_no) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": bad " + what + " value '" + s + "'");
  }
  return v;
}

inline constexpr const char* kTraceHeader = "t,y,prediction,epsilon,p_hat,sigma_sq";
inline constexpr const char* kDiagnosticsHeader =
    "t,p_hat,f_value,corridor_state,action_taken,omega,alpha";
inline constexpr const char* kCurveHeader = "magnitude,phi,phi_std_error,e_before,e_after,trials";

inline void write_trace_csv(std::ostream& os, const std::vector<StepRecord>& trace) {
  os << kTraceHeader << '\n';
  for (const auto& r : trace) {
    os << r.t << ',' << format_double(r.y) << ',' << format_double(r.prediction) << ','
       << format_double(r.epsilon) << ',' << (r.p_hat ? format_double(r.p_hat->value()) : "")
       << ',' << format_double(r.sigma_sq) << '\n';
  }
}

inline void write_trace_jsonl(std::ostream& os, const std::vector<StepRecord>& trace) {
  for (const auto& r : trace) {
    nlohmann::ordered_json j;
    j["t"] = r.t;
    j["y"] = r.y;
    j["prediction"] = r.prediction;
    j["epsilon"] = r.epsilon;
    if (r.p_hat) {
      j["p_hat"] = r.p_hat->value();
    } else {
      j["p_hat"] = nullptr;
    }
    j["sigma_sq"] = r.sigma_sq;
    os << j.dump() << '\n';
  }
}

inline void write_diagnostics_csv(std::ostream& os, const std::vector<CimaStep>& steps) {
  os << kDiagnosticsHeader << '\n';
  for (const auto& s : steps) {
    os << s.step.t << ',';
    if (s.diag) {
      os << format_double(s.diag->p_hat.value()) << ',' << format_double(s.diag->f_value) << ','
         << to_string(s.diag->corridor_state) << ',' << to_string(s.diag->action_taken) << ','
         << format_double(s.diag->omega) << ',' << format_double(s.diag->alpha);
    } else {
      os << ",,,,,";
    }
    os << '\n';
  }
}

inline void write_diagnostics_jsonl(std::ostream& os, const std::vector<CimaStep>& steps) {
  for (const auto& s : steps) {
    nlohmann::ordered_json j;
    j["t"] = s.step.t;
    if (s.diag) {
      j["p_hat"] = s.diag->p_hat.value();
      j["f_value"] = s.diag->f_value;
      j["corridor_state"] = to_string(s.diag->corridor_state);
      j["action_taken"] = to_string(s.diag->action_taken);
      j["omega"] = s.diag->omega;
      j["alpha"] = s.diag->alpha;
    } else {
      j["p_hat"] = nullptr;
      j["f_value"] = nullptr;
      j["corridor_state"] = nullptr;
      j["action_taken"] = nullptr;
      j["omega"] = nullptr;
      j["alpha"] = nullptr;
    }
    os << j.dump() << '\n';
  }
}

inline void write_curve_csv(std::ostream& os, const std::vector<PayoffSample>& curve) {
  os << kCurveHeader << '\n';
  for (const auto& s : curve) {
    os << format_double(s.magnitude) << ',' << format_double(s.phi) << ','
       << format_double(s.phi_std_error) << ',' << format_double(s.e_before) << ','
       << format_double(s.e_after) << ',' << s.trials << '\n';
  }
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace detail

/// Reads a trace written by write_trace_csv. Malformed content is reported
/// with its line number.
inline std::vector<StepRecord> read_trace_csv(std::istream& is) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(is, line)) throw std::runtime_error("line 1: empty trace file");
  if (line == std::string(kTraceHeader) + "\r") line.pop_back();
  if (line != kTraceHeader) {
    throw std::runtime_error("line 1: expected header '" + std::string(kTraceHeader) + "', got '" +
                             line + "'");
  }
  std::vector<StepRecord> trace;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != 6) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected 6 fields, got " +
                               std::to_string(cells.size()));
    }
    StepRecord r;
    r.t = static_cast<std::int64_t>(parse_double(cells[0], "t", line_no));
    r.y = parse_double(cells[1], "y", line_no);
    r.prediction = parse_double(cells[2], "prediction", line_no);
    r.epsilon = parse_double(cells[3], "epsilon", line_no);
    if (!cells[4].empty()) r.p_hat = Probability(parse_double(cells[4], "p_hat", line_no));
    r.sigma_sq = parse_double(cells[5], "sigma_sq", line_no);
    trace.push_back(r);
  }
  return trace;
}

/// Reads a trace written by write_trace_jsonl; one JSON object per line.
inline std::vector<StepRecord> read_trace_jsonl(std::istream& is) {
  std::vector<StepRecord> trace;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": " + e.what());
    }
    StepRecord r;
    try {
      r.t = j.at("t").get<std::int64_t>();
      r.y = j.at("y").get<double>();
      r.prediction = j.at("prediction").get<double>();
      r.epsilon = j.at("epsilon").get<double>();
      if (!j.at("p_hat").is_null()) r.p_hat = Probability(j.at("p_hat").get<double>());
      r.sigma_sq = j.at("sigma_sq").get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": " + e.what());
    }
    trace.push_back(r);
  }
  if (trace.empty()) throw std::runtime_error("line 1: empty trace file");
  return trace;
}

inline std::vector<StepRecord> read_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file: " + path);
  const bool jsonl = path.size() >= 6 && path.compare(path.size() - 6, 6, ".jsonl") == 0;
  try {
    return jsonl ? read_trace_jsonl(in) : read_trace_csv(in);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

}  // namespace corridor
