// Command-line front end. Every subcommand reads one INI config, writes its
// artifacts into an output directory, and finishes with a manifest recording
// config and artifact checksums so reruns can be compared byte for byte.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "ghostbeam/beamshape.hpp"
#include "ghostbeam/coincidence.hpp"
#include "ghostbeam/config.hpp"
#include "ghostbeam/errors.hpp"
#include "ghostbeam/fields.hpp"
#include "ghostbeam/joint.hpp"
#include "ghostbeam/manifest.hpp"
#include "ghostbeam/parallel.hpp"
#include "ghostbeam/propagation.hpp"
#include "ghostbeam/scene.hpp"

namespace gb = ghostbeam;
namespace fs = std::filesystem;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;  // empty: use [output] dir from the config
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool strict = false;
};

// Collects artifacts as they land on disk and hashes them for the manifest.
class ArtifactSink {
 public:
  explicit ArtifactSink(fs::path dir) : dir_(std::move(dir)) {
    fs::create_directories(dir_);
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void add(const std::string& name) {
    gb::ArtifactEntry e;
    e.path = name;
    e.bytes = static_cast<std::uint64_t>(fs::file_size(dir_ / name));
    e.fnv64 = gb::fnv1a64_file(path(name));
    entries_.push_back(e);
  }

  const std::vector<gb::ArtifactEntry>& entries() const { return entries_; }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<gb::ArtifactEntry> entries_;
};

using Clock = std::chrono::steady_clock;

void finish_run(const std::string& command, const CommonOpts& opts, std::uint64_t seed_used,
                ArtifactSink& sink, Clock::time_point t0) {
  gb::RunManifest m;
  m.command = command;
  m.config_path = opts.config_path;
  m.config_fnv64 = gb::fnv1a64_file(opts.config_path);
  m.rng_seed = seed_used;
  m.strict = opts.strict;
  m.duration_ms =
      std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  m.artifacts = sink.entries();
  gb::write_manifest(sink.path("manifest.json"), m);
  for (const auto& e : sink.entries())
    std::cout << "wrote " << (sink.dir() / e.path).string() << "\n";
  std::cout << "wrote " << sink.path("manifest.json") << "\n";
}

void report_warnings(const gb::Diagnostics& diag) {
  for (const auto& w : diag.warnings) std::cerr << "warning: " << w << "\n";
}

gb::YAxis image_axis(const gb::OutputParams& out) {
  double dy = 2.0 * out.image_halfwidth / (out.image_points - 1);
  return gb::YAxis::centered(out.image_halfwidth, dy);
}

// Wraps a real map in the complex dump container (imaginary part zero).
gb::ComplexField2D real_dump(const gb::ComplexField2D& like, const std::vector<double>& values) {
  gb::ComplexField2D f(like.nx(), like.ny(), like.dx(), like.dy(), like.origin());
  for (std::size_t i = 0; i < values.size(); ++i) f.values()[i] = values[i];
  return f;
}

// Full-slab map of one plane-wave component with the object applied: analytic
// ansatz up to the object line, then an angular-spectrum continuation of the
// masked line.
gb::ComplexField2D component_map(const gb::PlaneWaveComponent& comp, const gb::SlabScene& scene,
                                 const gb::SourceParams& source, const gb::YAxis& axis, int nx,
                                 double dx, gb::Diagnostics* diag) {
  auto line = gb::component_line(comp, scene, source, axis, scene.object_x);
  auto transfer = gb::build_transfer(scene, axis);
  gb::apply_transfer(line, transfer);
  auto map = gb::propagate_map(line, axis, scene.object_x, scene.lambda_spp, nx, dx, 0.0, diag);
  gb::parallel_for(nx, [&](int ix) {
    double x = map.x(ix);
    if (x > scene.object_x) return;
    auto column = gb::component_line(comp, scene, source, axis, x);
    for (int iy = 0; iy < axis.n; ++iy) map.at(ix, iy) = column[iy];
  });
  return map;
}

int run_forward(const CommonOpts& opts) {
  auto t0 = Clock::now();
  auto cfg = gb::ParsedConfig::load(opts.config_path);
  auto scene = gb::build_scene(cfg);
  auto source = gb::build_source(cfg);
  auto out = gb::build_output(cfg);
  ArtifactSink sink(opts.out_dir.empty() ? out.dir : opts.out_dir);
  gb::Diagnostics diag{opts.strict, {}};

  auto state = gb::build_joint_state(scene, source, out.components, out.line_dy);
  auto profile = gb::ungated_image(state, 0.0, image_axis(out));
  gb::save_profile_csv(sink.path("ungated_profile.csv"), profile, {});
  sink.add("ungated_profile.csv");

  int nx = out.grid_nx, ny = out.grid_ny;
  double dx = scene.width_x / (nx - 1);
  gb::YAxis axis{ny, scene.width_y / (ny - 1), -0.5 * scene.width_y};
  std::vector<double> intensity(static_cast<std::size_t>(nx) * ny, 0.0);
  gb::ComplexField2D axial;
  int mid = static_cast<int>(state.components.size()) / 2;
  for (int j = 0; j < static_cast<int>(state.components.size()); ++j) {
    auto map = component_map(state.components[j], scene, source, axis, nx, dx,
                             j == 0 ? &diag : nullptr);
    double w = std::norm(state.components[j].a);
    const auto& v = map.values();
    for (std::size_t i = 0; i < v.size(); ++i) intensity[i] += w * std::norm(v[i]);
    if (j == mid) axial = std::move(map);
  }
  axial.save(sink.path("forward_axial.bin"));
  sink.add("forward_axial.bin");
  real_dump(axial, intensity).save(sink.path("forward_intensity.bin"));
  sink.add("forward_intensity.bin");

  report_warnings(diag);
  finish_run("forward", opts, opts.seed, sink, t0);
  std::cout << "ungated visibility: " << profile.visibility << "\n";
  return gb::kExitOk;
}

int run_ghost(const CommonOpts& opts, double bucket_y, bool bucket_y_given, int scan_count,
              double defocus) {
  auto t0 = Clock::now();
  auto cfg = gb::ParsedConfig::load(opts.config_path);
  auto scene = gb::build_scene(cfg);
  auto source = gb::build_source(cfg);
  auto out = gb::build_output(cfg);
  ArtifactSink sink(opts.out_dir.empty() ? out.dir : opts.out_dir);
  gb::Diagnostics diag{opts.strict, {}};

  auto state = gb::build_joint_state(scene, source, out.components, out.line_dy);

  if (scan_count != 0) {
    int count = scan_count > 0 ? scan_count : out.scan_points;
    auto points = gb::bucket_scan_points(scene, count);
    auto scan = gb::ghost_scan(state, points);
    gb::save_ghost_scan_csv(sink.path("ghost_scan.csv"), scan);
    sink.add("ghost_scan.csv");
    report_warnings(diag);
    finish_run("ghost", opts, opts.seed, sink, t0);
    return gb::kExitOk;
  }

  gb::Vec2 point{scene.bucket_center.x,
                 bucket_y_given ? bucket_y : scene.bucket_center.y};
  auto post = gb::postselect(state, point);
  auto profile = gb::electron_image(post, defocus, image_axis(out));
  int dominant = static_cast<int>(gb::dominant_terms(post).size());
  gb::save_profile_csv(sink.path("gated_profile.csv"), profile,
                       {{"bucket_y_nm", std::to_string(point.y)},
                        {"defocus_nm", std::to_string(defocus)},
                        {"dominant_terms", std::to_string(dominant)}});
  sink.add("gated_profile.csv");

  auto reverse = gb::time_reversed_field(point, scene, out.grid_nx, out.grid_ny);
  reverse.save(sink.path("reverse_field.bin"));
  sink.add("reverse_field.bin");

  report_warnings(diag);
  finish_run("ghost", opts, opts.seed, sink, t0);
  std::cout << "gated visibility: " << profile.visibility << "\n";
  return gb::kExitOk;
}

// Bucket point associated with one photon tag; tags split the bucket extent
// into equal strips, sampled at strip centers.
gb::Vec2 tag_point(const gb::SlabScene& scene, int tag, int tags) {
  double frac = (tag + 0.5) / tags - 0.5;
  return {scene.bucket_center.x, scene.bucket_center.y + frac * scene.bucket_extent_dy};
}

int run_coincidence(const CommonOpts& opts, bool stream) {
  auto t0 = Clock::now();
  auto cfg = gb::ParsedConfig::load(opts.config_path);
  auto rates = gb::build_rates(cfg);
  if (opts.seed_given) rates.rng_seed = opts.seed;
  auto out = gb::build_output(cfg);
  ArtifactSink sink(opts.out_dir.empty() ? out.dir : opts.out_dir);

  double rate_per_s = rates.electron_rate_hz() * rates.p_spp * (1.0 + rates.p_ps) +
                      rates.dark_rate_hz;
  double expected = rate_per_s * rates.duration_s;
  if (expected > 1e9 && !stream)
    throw gb::ConfigError("expected about " + std::to_string(expected) +
                          " event records, too many to hold in memory; rerun with --stream "
                          "or reduce duration/current");

  gb::CoincidenceSummary summary;
  double T = rates.duration_ns();
  if (stream) {
    gb::EventStream events(rates);
    gb::StreamingCorrelator corr(rates.window_ns, rates.dead_time_ns);
    std::ofstream csv(sink.path("events.csv"));
    if (!csv) throw gb::ConfigError("cannot open " + sink.path("events.csv") + " for writing");
    gb::write_event_header(csv);
    double per_ns = rate_per_s * 1e-9;
    double chunk = per_ns > 0.0 ? std::max(1e6, 4e6 / per_ns) : T;
    double t = 0.0;
    while (t < T) {
      double t2 = std::min(T, t + chunk);
      bool last = t2 >= T;
      auto recs = events.advance(last ? T * (1.0 + 1e-12) + 1.0 : t2);
      if (last) {
        auto bad = [T](const gb::EventRecord& r) { return r.t_ns < 0.0 || r.t_ns > T; };
        recs.erase(std::remove_if(recs.begin(), recs.end(), bad), recs.end());
      } else {
        auto neg = [](const gb::EventRecord& r) { return r.t_ns < 0.0; };
        recs.erase(std::remove_if(recs.begin(), recs.end(), neg), recs.end());
      }
      gb::write_event_rows(csv, recs.data(), recs.size());
      corr.feed(recs.data(), recs.size());
      t = t2;
    }
    if (!csv) throw gb::ConfigError("failed writing " + sink.path("events.csv"));
    csv.close();
    summary = corr.finish(T);
  } else {
    auto log = gb::simulate_events(rates);
    gb::save_event_log(sink.path("events.csv"), log);
    summary = gb::correlate(log, rates.window_ns, rates.dead_time_ns);
  }
  sink.add("events.csv");

  std::string report = gb::format_rate_report(rates, &summary);
  {
    std::ofstream os(sink.path("coincidence_report.txt"));
    os << report;
    if (!os) throw gb::ConfigError("failed writing " + sink.path("coincidence_report.txt"));
  }
  sink.add("coincidence_report.txt");

  // The histogram needs gated images only when something was actually drawn.
  std::vector<gb::ImageProfile> images;
  if (summary.true_count > 0) {
    auto scene = gb::build_scene(cfg);
    auto source = gb::build_source(cfg);
    auto state = gb::build_joint_state(scene, source, out.components, out.line_dy);
    auto detector = image_axis(out);
    for (int k = 0; k < rates.bucket_tags; ++k) {
      auto post = gb::postselect(state, tag_point(scene, k, rates.bucket_tags));
      images.push_back(gb::electron_image(post, 0.0, detector));
    }
  }
  auto hist = gb::accumulate_coincidences(summary.accepted, images,
                                          rates.rng_seed ^ 0x9e3779b97f4a7c15ULL);
  gb::save_profile_csv(sink.path("accumulated_histogram.csv"), hist,
                       {{"true_coincidences", std::to_string(summary.true_count)}});
  sink.add("accumulated_histogram.csv");

  finish_run("coincidence", opts, rates.rng_seed, sink, t0);
  std::cout << report;
  return gb::kExitOk;
}

int run_beamshape(const CommonOpts& opts, const std::string& l_text, bool mixture) {
  auto t0 = Clock::now();
  auto cfg = gb::ParsedConfig::load(opts.config_path);
  auto scene = gb::build_scene(cfg);
  auto source = gb::build_source(cfg);
  auto out = gb::build_output(cfg);
  ArtifactSink sink(opts.out_dir.empty() ? out.dir : opts.out_dir);
  gb::Diagnostics diag{opts.strict, {}};

  int l;
  if (l_text == "+1" || l_text == "1") l = 1;
  else if (l_text == "-1") l = -1;
  else throw gb::ConfigError("--l must be +1 or -1, got '" + l_text + "'");

  int n_grid = out.grid_nx | 1;  // odd grid keeps the vortex core on a pixel
  auto ring = gb::ring_vortex_scene(out.ring_count, scene, source, l, n_grid, out.beta_peak);
  ring.reverse_field.save(sink.path("reverse_ring.bin"));
  sink.add("reverse_ring.bin");
  ring.beta.values.save(sink.path("beta_map.bin"));
  sink.add("beta_map.bin");

  auto sideband = [](const gb::BetaMap& beta) {
    gb::ComplexField2D f = beta.values;
    for (auto& v : f.values()) v = gb::transmission(v);
    return f;
  };
  auto spectrum = gb::oam_analyze(sideband(ring.beta), 8, &diag);
  if (mixture) {
    auto other = gb::ring_vortex_scene(out.ring_count, scene, source, -l, n_grid, out.beta_peak);
    auto spectrum2 = gb::oam_analyze(sideband(other.beta), 8, &diag);
    spectrum = gb::mix_spectra(spectrum, spectrum2);
  }
  gb::save_oam_csv(sink.path("oam_spectrum.csv"), spectrum);
  sink.add("oam_spectrum.csv");

  report_warnings(diag);
  finish_run("beamshape", opts, opts.seed, sink, t0);
  std::cout << "dominant l: " << spectrum.dominant_l << ", mean l: " << spectrum.mean_l()
            << "\n";
  return gb::kExitOk;
}

std::vector<double> parse_gaps(const std::string& text) {
  std::vector<double> gaps;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    std::string item = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw gb::ConfigError("--gaps: cannot parse '" + item + "'");
    }
    if (used != item.size() || !(v > 0.0))
      throw gb::ConfigError("--gaps: entries must be positive numbers, got '" + item + "'");
    gaps.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (gaps.empty()) throw gb::ConfigError("--gaps: no entries");
  return gaps;
}

int run_resolution(const CommonOpts& opts, const std::string& gaps_text) {
  auto t0 = Clock::now();
  auto cfg = gb::ParsedConfig::load(opts.config_path);
  auto scene = gb::build_scene(cfg);
  ArtifactSink sink(opts.out_dir.empty() ? gb::build_output(cfg).dir : opts.out_dir);
  gb::Diagnostics diag{opts.strict, {}};

  auto gaps = parse_gaps(gaps_text);
  auto sweep = gb::resolution_sweep(scene.lambda_spp, gaps, {}, &diag);
  gb::save_resolution_csv(sink.path("resolution.csv"), sweep, scene.lambda_spp);
  sink.add("resolution.csv");

  report_warnings(diag);
  finish_run("resolution", opts, opts.seed, sink, t0);
  return gb::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"plasmon-mediated electron ghost imaging simulator"};
  app.require_subcommand(1);

  CommonOpts opts;
  auto add_common = [&opts](CLI::App* sub) {
    sub->add_option("--config", opts.config_path, "INI run configuration")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", opts.seed, "override the RNG seed");
    sub->add_flag("--strict", opts.strict, "escalate numerical warnings to errors");
    sub->add_option("--out", opts.out_dir, "output directory (default from config)");
  };

  auto* fwd = app.add_subcommand("forward", "injected field maps and the ungated profile");
  add_common(fwd);

  auto* ghost = app.add_subcommand("ghost", "post-selected imaging for one bucket point or a scan");
  add_common(ghost);
  double bucket_y = 0.0;
  int scan_count = 0;
  double defocus = 0.0;
  auto* point_opt =
      ghost->add_option("--bucket-point", bucket_y, "bucket detector y, nm");
  auto* scan_opt = ghost->add_option(
      "--bucket-scan", scan_count,
      "scan the bucket line instead (point count; 0 uses the config value)");
  scan_opt->expected(0, 1)->excludes(point_opt);
  ghost->add_option("--defocus", defocus, "imaging defocus, nm");

  auto* coin = app.add_subcommand("coincidence", "timestamp stream and gated accumulation");
  add_common(coin);
  bool stream = false;
  coin->add_flag("--stream", stream, "generate events in chunks (large runs)");

  auto* beam = app.add_subcommand("beamshape", "ring-resonator vortex coupling and OAM content");
  add_common(beam);
  std::string l_text = "+1";
  bool mixture = false;
  beam->add_option("--l", l_text, "photon angular momentum branch, +1 or -1");
  beam->add_flag("--mixture", mixture, "analyze the incoherent +1/-1 mixture");

  auto* reso = app.add_subcommand("resolution", "near-field resolution vs sample gap");
  add_common(reso);
  std::string gaps_text = "20,40,80,160,320,600";
  reso->add_option("--gaps", gaps_text, "comma-separated gaps, nm");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? gb::kExitOk : gb::kExitConfig;
  }
  opts.seed_given = app.get_subcommands().front()->count("--seed") > 0;

  try {
    if (fwd->parsed()) return run_forward(opts);
    if (ghost->parsed())
      return run_ghost(opts, bucket_y, point_opt->count() > 0,
                       scan_opt->count() > 0 ? (scan_count > 0 ? scan_count : -1) : 0, defocus);
    if (coin->parsed()) return run_coincidence(opts, stream);
    if (beam->parsed()) return run_beamshape(opts, l_text, mixture);
    if (reso->parsed()) return run_resolution(opts, gaps_text);
  } catch (const gb::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return gb::kExitConfig;
  } catch (const gb::GeometryError& e) {
    std::cerr << "geometry error: " << e.what() << "\n";
    return gb::kExitGeometry;
  } catch (const gb::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return gb::kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return gb::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return gb::kExitConfig;
}
