#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ghostbeam {

std::uint64_t fnv1a64(const void* data, std::size_t len);
std::uint64_t fnv1a64_file(const std::string& path);
std::string fnv_hex(std::uint64_t h);

struct ArtifactEntry {
  std::string path;  // relative to the manifest's directory
  std::uint64_t bytes = 0;
  std::uint64_t fnv64 = 0;
};

// Reproducibility record written next to every command's outputs. Artifact
// checksums are the determinism contract; timing fields are informational.
struct RunManifest {
  std::string command;
  std::string config_path;
  std::uint64_t config_fnv64 = 0;
  std::uint64_t rng_seed = 0;
  bool strict = false;
  double duration_ms = 0.0;
  std::vector<ArtifactEntry> artifacts;
};

void write_manifest(const std::string& path, const RunManifest& manifest);

}  // namespace ghostbeam
