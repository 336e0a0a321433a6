#include "ghostbeam/manifest.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ghostbeam/errors.hpp"

namespace ghostbeam {

std::uint64_t fnv1a64(const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ull;
  }
  return h;
}

std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open " + path + " for hashing");
  std::uint64_t h = 0xCBF29CE484222325ull;
  char buf[65536];
  while (is.read(buf, sizeof buf) || is.gcount() > 0) {
    std::streamsize got = is.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001B3ull;
    }
  }
  return h;
}

std::string fnv_hex(std::uint64_t h) {
  std::ostringstream os;
  os << "0x" << std::hex << h;
  return os.str();
}

void write_manifest(const std::string& path, const RunManifest& manifest) {
  nlohmann::json j;
  j["tool"] = "ghostbeam";
  j["version"] = "0.1.0";
  j["command"] = manifest.command;
  j["config_path"] = manifest.config_path;
  j["config_fnv64"] = fnv_hex(manifest.config_fnv64);
  j["rng_seed"] = manifest.rng_seed;
  j["strict"] = manifest.strict;
  j["created_unix_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::system_clock::now().time_since_epoch())
                             .count();
  j["duration_ms"] = manifest.duration_ms;

  auto sorted = manifest.artifacts;
  std::sort(sorted.begin(), sorted.end(),
            [](const ArtifactEntry& a, const ArtifactEntry& b) { return a.path < b.path; });
  j["artifacts"] = nlohmann::json::array();
  for (const auto& a : sorted) {
    nlohmann::json e;
    e["path"] = a.path;
    e["bytes"] = a.bytes;
    e["fnv64"] = fnv_hex(a.fnv64);
    j["artifacts"].push_back(e);
  }

  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open " + path + " for writing");
  os << j.dump(2) << "\n";
  if (!os) throw ConfigError("failed writing " + path);
}

}  // namespace ghostbeam
