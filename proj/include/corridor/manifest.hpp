#pragma once

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace corridor {

inline constexpr const char* kArtifactVersion = "0.1.0";

/// FNV-1a 64-bit checksum; used to verify bit-identical reproduction of
/// output files, not for security.
inline std::uint64_t fnv1a64(const char* data, std::size_t len) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a64_file(const std::string& path, std::uint64_t* out_bytes = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checksum: cannot open " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  std::uint64_t total = 0;
  char buf[65536];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
    total += static_cast<std::uint64_t>(got);
  }
  if (out_bytes) *out_bytes = total;
  return h;
}

struct OutputRecord {
  std::string path;  // relative to the output directory
  std::uint64_t checksum_fnv1a64 = 0;
  std::uint64_t bytes = 0;
};

/// Everything needed to reproduce a run bit for bit: the fully resolved
/// configuration, the master seed, and a checksum per output file. The
/// wall-clock duration is informational and is the one field expected to
/// differ between otherwise identical runs.
struct RunManifest {
  std::string command;
  std::uint64_t master_seed = 0;
  nlohmann::ordered_json config_snapshot;
  std::vector<OutputRecord> outputs;
  double duration_seconds = 0.0;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["artifact_version"] = kArtifactVersion;
    j["command"] = command;
    j["master_seed"] = master_seed;
    j["config"] = config_snapshot;
    j["outputs"] = nlohmann::ordered_json::array();
    for (const auto& o : outputs) {
      nlohmann::ordered_json jo;
      jo["path"] = o.path;
      jo["fnv1a64"] = o.checksum_fnv1a64;
      jo["bytes"] = o.bytes;
      j["outputs"].push_back(jo);
    }
    j["duration_seconds"] = duration_seconds;
    return j;
  }
};

}  // namespace corridor
