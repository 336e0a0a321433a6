#include "ghostbeam/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ghostbeam/errors.hpp"

namespace ghostbeam {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(const std::string& path, int line, const std::string& msg) {
  throw ConfigError(path + ":" + std::to_string(line) + ": " + msg);
}

double parse_double(const ConfigValue& v, const std::string& path) {
  try {
    std::size_t used = 0;
    double d = std::stod(v.text, &used);
    if (used != v.text.size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    fail(path, v.line, "expected a number, got '" + v.text + "'");
  }
}

}  // namespace

ParsedConfig ParsedConfig::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse(buf.str(), path);
}

ParsedConfig ParsedConfig::parse(const std::string& text, const std::string& label) {
  ParsedConfig cfg;
  cfg.path_ = label;
  std::istringstream is(text);
  std::string raw;
  std::string section;
  bool have_section = false;
  int lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    std::size_t cut = raw.find_first_of("#;");
    std::string line = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(label, lineno, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) fail(label, lineno, "empty section name");
      have_section = true;
      cfg.sections_[section];
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail(label, lineno, "expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(label, lineno, "empty key");
    if (!have_section) {
      if (key != "schema_version")
        fail(label, lineno, "key '" + key + "' appears before any [section]");
      try {
        cfg.schema_version_ = std::stoi(value);
      } catch (const std::exception&) {
        fail(label, lineno, "bad schema_version '" + value + "'");
      }
      if (cfg.schema_version_ != 1)
        fail(label, lineno, "unsupported schema_version " + value);
      continue;
    }
    auto& sec = cfg.sections_[section];
    if (sec.count(key))
      fail(label, lineno, "duplicate key '" + key + "' in section [" + section + "]");
    sec[key] = {value, lineno};
  }
  return cfg;
}

bool ParsedConfig::has(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) > 0;
}

const ConfigValue& ParsedConfig::require(const std::string& section,
                                         const std::string& key) const {
  auto s = sections_.find(section);
  if (s == sections_.end())
    throw ConfigError(path_ + ": missing section [" + section + "] (needed for key '" +
                      key + "')");
  auto k = s->second.find(key);
  if (k == s->second.end())
    throw ConfigError(path_ + ": missing key '" + key + "' in section [" + section + "]");
  return k->second;
}

std::string ParsedConfig::get_string(const std::string& section,
                                     const std::string& key) const {
  return require(section, key).text;
}

double ParsedConfig::get_double(const std::string& section, const std::string& key) const {
  return parse_double(require(section, key), path_);
}

int ParsedConfig::get_int(const std::string& section, const std::string& key) const {
  const auto& v = require(section, key);
  try {
    std::size_t used = 0;
    int i = std::stoi(v.text, &used);
    if (used != v.text.size()) throw std::invalid_argument("trailing characters");
    return i;
  } catch (const std::exception&) {
    fail(path_, v.line, "expected an integer, got '" + v.text + "'");
  }
}

Vec2 ParsedConfig::get_pair(const std::string& section, const std::string& key) const {
  const auto& v = require(section, key);
  std::string t = trim(v.text);
  if (t.size() < 2 || t.front() != '[' || t.back() != ']')
    fail(path_, v.line, "expected [x, y], got '" + v.text + "'");
  t = t.substr(1, t.size() - 2);
  std::size_t comma = t.find(',');
  if (comma == std::string::npos) fail(path_, v.line, "expected two comma-separated values");
  try {
    return {std::stod(trim(t.substr(0, comma))), std::stod(trim(t.substr(comma + 1)))};
  } catch (const std::exception&) {
    fail(path_, v.line, "expected [x, y] with numeric entries");
  }
}

std::uint64_t ParsedConfig::get_seed(const std::string& section,
                                     const std::string& key) const {
  const auto& v = require(section, key);
  try {
    return std::stoull(v.text, nullptr, 0);
  } catch (const std::exception&) {
    fail(path_, v.line, "expected an unsigned integer seed, got '" + v.text + "'");
  }
}

std::string ParsedConfig::get_string_or(const std::string& section, const std::string& key,
                                        const std::string& fallback) const {
  return has(section, key) ? get_string(section, key) : fallback;
}

double ParsedConfig::get_double_or(const std::string& section, const std::string& key,
                                   double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

int ParsedConfig::get_int_or(const std::string& section, const std::string& key,
                             int fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

SlabScene build_scene(const ParsedConfig& cfg) {
  SlabScene scene;
  scene.width_x = cfg.get_double("scene", "width_x");
  scene.width_y = cfg.get_double("scene", "width_y");
  scene.lambda_spp = cfg.get_double("scene", "lambda_spp");
  scene.injection_center = cfg.get_pair("scene", "injection");
  scene.object_x = cfg.get_double("scene", "object_x");
  scene.bucket_center = cfg.get_pair("scene", "bucket_center");
  scene.bucket_extent_dy = cfg.get_double("scene", "bucket_extent");

  std::string kind = cfg.get_string("scene", "object");
  if (kind == "double_slit") {
    DoubleSlit slit;
    slit.separation_d = cfg.get_double("scene", "slit_separation");
    slit.width_b = cfg.get_double("scene", "slit_width");
    scene.object = slit;
  } else if (kind == "rings") {
    RingResonator rings;
    rings.n_rings = cfg.get_int_or("scene", "ring_count", 5);
    rings.spacing = scene.lambda_spp;
    scene.object = rings;
  } else if (kind == "uniform" || kind == "opaque") {
    TransmissionProfile flat;
    flat.y0 = -0.5 * scene.width_y - 1.0;
    flat.dy = scene.width_y + 2.0;
    double t = kind == "uniform" ? 1.0 : 0.0;
    flat.t = {t, t};
    scene.object = flat;
  } else {
    throw ConfigError(cfg.path() + ": unknown object kind '" + kind +
                      "' (expected double_slit, rings, uniform, or opaque)");
  }
  require_valid_scene(scene);
  return scene;
}

SourceParams build_source(const ParsedConfig& cfg) {
  SourceParams p = make_source(cfg.get_double("source", "energy_kev"),
                               cfg.get_double("source", "hbar_omega_ev"),
                               cfg.get_double("source", "waist"),
                               cfg.get_double_or("source", "energy_window_mev", 100.0));
  p.field_scale = cfg.get_double_or("source", "field_scale", 1.0);
  return p;
}

RateConfig build_rates(const ParsedConfig& cfg) {
  RateConfig r;
  r.current_pa = cfg.get_double_or("rates", "current_pa", r.current_pa);
  r.p_spp = cfg.get_double_or("rates", "p_spp", r.p_spp);
  r.p_ps = cfg.get_double_or("rates", "p_ps", r.p_ps);
  r.window_ns = cfg.get_double_or("rates", "window_ns", r.window_ns);
  r.dead_time_ns = cfg.get_double_or("rates", "dead_time_ns", r.dead_time_ns);
  r.dark_rate_hz = cfg.get_double_or("rates", "dark_rate_hz", r.dark_rate_hz);
  r.duration_s = cfg.get_double_or("rates", "duration_s", r.duration_s);
  r.delay_ns = cfg.get_double_or("rates", "delay_ns", r.delay_ns);
  r.jitter_ns = cfg.get_double_or("rates", "jitter_ns", r.jitter_ns);
  r.bucket_tags = cfg.get_int_or("rates", "bucket_tags", r.bucket_tags);
  if (cfg.has("rates", "seed")) r.rng_seed = cfg.get_seed("rates", "seed");
  require_valid_rates(r);
  return r;
}

OutputParams build_output(const ParsedConfig& cfg) {
  OutputParams out;
  out.dir = cfg.get_string_or("output", "dir", out.dir);
  out.grid_nx = cfg.get_int_or("output", "grid_nx", out.grid_nx);
  out.grid_ny = cfg.get_int_or("output", "grid_ny", out.grid_ny);
  out.image_halfwidth = cfg.get_double_or("output", "image_halfwidth", out.image_halfwidth);
  out.image_points = cfg.get_int_or("output", "image_points", out.image_points);
  out.line_dy = cfg.get_double_or("output", "line_dy", out.line_dy);
  out.scan_points = cfg.get_int_or("output", "scan_points", out.scan_points);
  out.components = cfg.get_int_or("source", "components", out.components);
  out.ring_count = cfg.get_int_or("scene", "ring_count", out.ring_count);
  out.beta_peak = cfg.get_double_or("output", "beta_peak", out.beta_peak);
  if (out.grid_nx < 16 || out.grid_ny < 16)
    throw ConfigError(cfg.path() + ": output grid must be at least 16x16");
  if (out.image_points < 8)
    throw ConfigError(cfg.path() + ": image_points must be at least 8");
  return out;
}

}  // namespace ghostbeam
