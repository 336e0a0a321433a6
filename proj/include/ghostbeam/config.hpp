#pragma once

#include <map>
#include <optional>
#include <string>

#include "ghostbeam/coincidence.hpp"
#include "ghostbeam/fields.hpp"
#include "ghostbeam/scene.hpp"

namespace ghostbeam {

// INI-style run configuration: top-level schema_version, then [scene] [source]
// [rates] [output] sections. Parse and lookup failures throw ConfigError with
// file:line anchors.
struct ConfigValue {
  std::string text;
  int line = 0;
};

class ParsedConfig {
 public:
  static ParsedConfig load(const std::string& path);
  static ParsedConfig parse(const std::string& text, const std::string& label);

  bool has(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key) const;
  int get_int(const std::string& section, const std::string& key) const;
  Vec2 get_pair(const std::string& section, const std::string& key) const;
  std::uint64_t get_seed(const std::string& section, const std::string& key) const;

  std::string get_string_or(const std::string& section, const std::string& key,
                            const std::string& fallback) const;
  double get_double_or(const std::string& section, const std::string& key,
                       double fallback) const;
  int get_int_or(const std::string& section, const std::string& key, int fallback) const;

  const std::string& path() const { return path_; }
  int schema_version() const { return schema_version_; }

 private:
  const ConfigValue& require(const std::string& section, const std::string& key) const;
  std::string path_;
  int schema_version_ = 1;
  std::map<std::string, std::map<std::string, ConfigValue>> sections_;
};

SlabScene build_scene(const ParsedConfig& cfg);
SourceParams build_source(const ParsedConfig& cfg);
RateConfig build_rates(const ParsedConfig& cfg);

struct OutputParams {
  std::string dir = "out";
  int grid_nx = 1024;
  int grid_ny = 1024;
  double image_halfwidth = 4000.0;  // nm
  int image_points = 513;
  double line_dy = 0.0;             // 0: lambda_spp/8
  int components = 33;
  int scan_points = 129;
  int ring_count = 5;
  double beta_peak = 0.3;
};

OutputParams build_output(const ParsedConfig& cfg);

}  // namespace ghostbeam
