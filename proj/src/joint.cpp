#include "ghostbeam/joint.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "ghostbeam/constants.hpp"
#include "ghostbeam/errors.hpp"
#include "ghostbeam/fft.hpp"
#include "ghostbeam/parallel.hpp"

namespace ghostbeam {

namespace {

constexpr double kDetectionFloor = 1e-12;

void require_bucket_point(const SlabScene& scene, Vec2 p) {
  if (p.x <= scene.object_x || p.x > scene.width_x)
    throw GeometryError("bucket point must lie downstream of the object line");
  double half = 0.5 * scene.bucket_extent_dy;
  if (std::abs(p.y - scene.bucket_center.y) > half + 1e-9)
    throw GeometryError("bucket point outside the bucket extent");
}

std::vector<cplx> reverse_object_line(const JointState& state, Vec2 p) {
  return time_reversed_line(p, state.scene, state.axis, state.scene.object_x);
}

void write_csv_header(std::ofstream& os, const std::string& path) {
  if (!os) throw ConfigError("cannot open " + path + " for writing");
  os.precision(17);
}

}  // namespace

JointState build_joint_state(const SlabScene& scene, const SourceParams& source,
                             int n_components, double line_dy) {
  require_valid_scene(scene);
  require_valid_source(source);
  if (line_dy <= 0.0) line_dy = scene.lambda_spp / 8.0;
  JointState state;
  state.scene = scene;
  state.source = source;
  state.axis = YAxis::centered(0.5 * scene.width_y, line_dy);
  state.components = decompose_source(scene, source, n_components);
  state.electron_k = source.electron_wavenumber();
  state.lines.resize(state.components.size());
  state.reach.resize(state.components.size());
  double wsum = 0.0;
  for (const auto& c : state.components) wsum += std::norm(c.a);
  if (std::abs(wsum - 1.0) > 1e-9)
    throw NumericalError("component weights not normalized");
  // A fully crossing Gaussian beam carries flux s sqrt(pi) through the line
  // regardless of angle; steep components clipped by the slab carry less.
  double flux_ref = source.waist_s * std::sqrt(kPi);
  parallel_for(static_cast<int>(state.components.size()), [&](int j) {
    const auto& comp = state.components[j];
    auto line = component_line(comp, scene, source, state.axis, scene.object_x);
    double norm2 = 0.0;
    for (const cplx& v : line) norm2 += std::norm(v);
    norm2 *= state.axis.dy;
    double cos_theta = comp.k.x / std::hypot(comp.k.x, comp.k.y);
    double f = std::min(1.0, cos_theta * norm2 / flux_ref);
    if (f < 1e-14 || norm2 <= 0.0) {
      state.reach[j] = 0.0;
      state.lines[j].assign(state.axis.n, cplx(0.0, 0.0));
      return;
    }
    state.reach[j] = f;
    double scale = 1.0 / std::sqrt(norm2);
    for (cplx& v : line) v *= scale;
    state.lines[j] = std::move(line);
  });
  return state;
}

cplx overlap_line(const std::vector<cplx>& a, const std::vector<cplx>& b, double dy) {
  if (a.size() != b.size())
    throw std::invalid_argument("overlap_line: size mismatch");
  cplx s(0.0, 0.0);
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s * dy;
}

cplx superposition_integral(const ComplexField2D& fwd, const ComplexField2D& rev,
                            double line_x) {
  if (fwd.nx() != rev.nx() || fwd.ny() != rev.ny() ||
      std::abs(fwd.dx() - rev.dx()) > 1e-9 || std::abs(fwd.dy() - rev.dy()) > 1e-9 ||
      std::abs(fwd.origin().x - rev.origin().x) > 1e-9 ||
      std::abs(fwd.origin().y - rev.origin().y) > 1e-9)
    throw std::invalid_argument("superposition_integral: fields on different grids");
  int ia = fwd.column_at(line_x);
  int ib = rev.column_at(line_x);
  std::vector<cplx> a(fwd.line(ia), fwd.line(ia) + fwd.ny());
  std::vector<cplx> b(rev.line(ib), rev.line(ib) + rev.ny());
  double na = line_norm(a, fwd.dy());
  double nb = line_norm(b, rev.dy());
  if (std::abs(na - 1.0) > 1e-6 || std::abs(nb - 1.0) > 1e-6)
    throw std::invalid_argument(
        "superposition_integral: fields must be unit L2 along the integration line");
  return overlap_line(a, b, fwd.dy());
}

PostselectedElectron postselect(const JointState& state, Vec2 bucket_point) {
  require_bucket_point(state.scene, bucket_point);
  auto rev = reverse_object_line(state, bucket_point);
  PostselectedElectron post;
  post.detection_point = bucket_point;
  post.electron_k = state.electron_k;
  std::vector<cplx> c(state.components.size());
  double peak = 0.0;
  for (size_t j = 0; j < state.components.size(); ++j) {
    c[j] = overlap_line(state.lines[j], rev, state.axis.dy);
    peak = std::max(peak, std::abs(c[j]));
  }
  if (peak < kDetectionFloor) return post;  // dark detection
  post.recoils.reserve(c.size());
  post.weights.reserve(c.size());
  post.overlaps = c;
  for (size_t j = 0; j < c.size(); ++j) {
    post.recoils.push_back(state.components[j].electron_recoil);
    post.weights.push_back(state.components[j].a * std::sqrt(state.reach[j]) * c[j]);
  }
  return post;
}

std::vector<int> dominant_terms(const PostselectedElectron& post, double threshold) {
  double peak = 0.0;
  for (const cplx& w : post.weights) peak = std::max(peak, std::abs(w));
  std::vector<int> idx;
  for (size_t j = 0; j < post.weights.size(); ++j)
    if (std::abs(post.weights[j]) >= threshold * peak) idx.push_back(static_cast<int>(j));
  return idx;
}

double fringe_visibility(const std::vector<double>& intensity) {
  int n = static_cast<int>(intensity.size());
  if (n < 4) return 0.0;
  double lo = intensity[n / 4], hi = intensity[n / 4];
  for (int i = n / 4; i < 3 * n / 4; ++i) {
    lo = std::min(lo, intensity[i]);
    hi = std::max(hi, intensity[i]);
  }
  double denom = hi + lo;
  return denom > 0.0 ? (hi - lo) / denom : 0.0;
}

double fringe_period(const std::vector<double>& axis, const std::vector<double>& intensity) {
  int n = static_cast<int>(intensity.size());
  std::vector<double> peaks;
  for (int i = std::max(1, n / 4); i < std::min(n - 1, 3 * n / 4); ++i)
    if (intensity[i] > intensity[i - 1] && intensity[i] > intensity[i + 1])
      peaks.push_back(axis[i]);
  if (peaks.size() < 2) return 0.0;
  return (peaks.back() - peaks.front()) / static_cast<double>(peaks.size() - 1);
}

namespace {

void fill_image(const PostselectedElectron& post, double defocus, const YAxis& detector,
                std::vector<double>& out) {
  out.assign(detector.n, 0.0);
  if (!post.detected()) return;
  size_t m = post.weights.size();
  std::vector<double> ky(m), chi(m);
  for (size_t j = 0; j < m; ++j) {
    ky[j] = post.recoils[j].y;
    chi[j] = defocus * ky[j] * ky[j] / (2.0 * post.electron_k);
  }
  for (int i = 0; i < detector.n; ++i) {
    double r = detector.y(i);
    cplx s(0.0, 0.0);
    for (size_t j = 0; j < m; ++j) {
      double ph = ky[j] * r - chi[j];
      s += post.weights[j] * cplx(std::cos(ph), std::sin(ph));
    }
    out[i] = std::norm(s);
  }
}

}  // namespace

ImageProfile electron_image(const PostselectedElectron& post, double defocus,
                            const YAxis& detector) {
  ImageProfile img;
  img.gated = true;
  img.axis.resize(detector.n);
  for (int i = 0; i < detector.n; ++i) img.axis[i] = detector.y(i);
  fill_image(post, defocus, detector, img.intensity);
  img.visibility = fringe_visibility(img.intensity);
  return img;
}

ImageProfile ungated_image(const JointState& state, double defocus, const YAxis& detector) {
  (void)defocus;  // per-component intensity is defocus invariant
  ImageProfile img;
  img.gated = false;
  img.axis.resize(detector.n);
  for (int i = 0; i < detector.n; ++i) img.axis[i] = detector.y(i);
  // Each recorded electron lost a quantum that then crossed the object, so the
  // detected subset weights every component by its object throughput.
  const auto transfer = build_transfer(state.scene, state.axis);
  double level = 0.0;
  for (std::size_t j = 0; j < state.components.size(); ++j) {
    double through = 0.0;
    const auto& line = state.lines[j];
    for (int i = 0; i < state.axis.n; ++i) through += std::norm(transfer[i] * line[i]);
    level += std::norm(state.components[j].a) * state.reach[j] * through * state.axis.dy;
  }
  img.intensity.assign(detector.n, level);
  img.visibility = fringe_visibility(img.intensity);
  return img;
}

ImageProfile marginal_image(const JointState& state, const std::vector<Vec2>& bucket_points,
                            double defocus, const YAxis& detector) {
  ImageProfile img;
  img.gated = true;
  img.axis.resize(detector.n);
  for (int i = 0; i < detector.n; ++i) img.axis[i] = detector.y(i);
  img.intensity.assign(detector.n, 0.0);
  std::vector<std::vector<double>> partial(bucket_points.size());
  parallel_for(static_cast<int>(bucket_points.size()), [&](int p) {
    auto post = postselect(state, bucket_points[p]);
    fill_image(post, defocus, detector, partial[p]);
  });
  for (const auto& contrib : partial)
    for (int i = 0; i < detector.n; ++i) img.intensity[i] += contrib[i];
  img.visibility = fringe_visibility(img.intensity);
  return img;
}

GhostScan ghost_scan(const JointState& state, const std::vector<Vec2>& bucket_points) {
  GhostScan scan;
  scan.bucket_y.resize(bucket_points.size());
  scan.probability.resize(bucket_points.size());
  parallel_for(static_cast<int>(bucket_points.size()), [&](int p) {
    auto post = postselect(state, bucket_points[p]);
    double prob = 0.0;
    for (const cplx& w : post.weights) prob += std::norm(w);
    scan.bucket_y[p] = bucket_points[p].y;
    scan.probability[p] = prob;
  });
  return scan;
}

std::vector<Vec2> bucket_scan_points(const SlabScene& scene, int count, double span) {
  if (count < 1) throw std::invalid_argument("bucket_scan_points: count must be >= 1");
  if (span <= 0.0) span = scene.bucket_extent_dy;
  // Right-endpoint exclusive, so a span of exactly k oscillation periods sums
  // each phase once.
  std::vector<Vec2> pts(count);
  for (int i = 0; i < count; ++i) {
    double frac = static_cast<double>(i) / count - 0.5;
    pts[i] = {scene.bucket_center.x, scene.bucket_center.y + frac * span};
  }
  return pts;
}

std::vector<ResolutionPoint> resolution_sweep(double lambda_spp,
                                              const std::vector<double>& gaps,
                                              const ResolutionOptions& opts,
                                              Diagnostics* diag) {
  if (lambda_spp <= 0.0) throw std::invalid_argument("resolution_sweep: bad wavelength");
  double K = 2.0 * kPi / lambda_spp;
  YAxis axis{opts.n, opts.dy, -0.5 * opts.n * opts.dy};
  std::vector<cplx> source(opts.n);
  for (int i = 0; i < opts.n; ++i) {
    double y = axis.y(i);
    source[i] = std::exp(-y * y / (2.0 * opts.source_sigma * opts.source_sigma));
  }

  std::vector<ResolutionPoint> sweep;
  for (double gap : gaps) {
    if (gap <= 0.0) throw std::invalid_argument("resolution_sweep: gap must be positive");
    if (gap >= lambda_spp && diag)
      diag->warn("resolution_sweep: gap >= lambda_spp, outside the near-field regime");

    Propagator prop{lambda_spp, gap, true, Boundary::periodic};
    auto at_object = propagate_line(source, axis, prop);

    double kappa_lo = opts.kappa_min_frac * K;
    double kappa_hi = 1.6 * std::sqrt(K * K + 1.0 / (gap * gap));
    std::vector<double> modulation(opts.kappa_points);
    std::vector<double> kappas(opts.kappa_points);
    parallel_for(opts.kappa_points, [&](int q) {
      double kappa = kappa_lo + (kappa_hi - kappa_lo) * q / (opts.kappa_points - 1);
      kappas[q] = kappa;
      double power[4];
      for (int iph = 0; iph < 4; ++iph) {
        double phi = 0.5 * kPi * iph;
        std::vector<cplx> v(opts.n);
        for (int i = 0; i < opts.n; ++i)
          v[i] = at_object[i] * 0.5 * (1.0 + std::cos(kappa * axis.y(i) + phi));
        fft(v, -1);
        double p = 0.0;
        for (int j = 0; j < opts.n; ++j)
          if (std::abs(fft_wavenumber(j, opts.n, opts.dy)) <= K) p += std::norm(v[j]);
        power[iph] = p;
      }
      double mean = 0.25 * (power[0] + power[1] + power[2] + power[3]);
      double amp = 0.5 * std::hypot(power[0] - power[2], power[1] - power[3]);
      modulation[q] = mean > 0.0 ? amp / mean : 0.0;
    });

    ResolutionPoint pt;
    pt.gap = gap;
    pt.k_star_predicted = std::sqrt(K * K + 1.0 / (gap * gap));
    double base = modulation[0];
    pt.k_star = kappa_hi;
    bool crossed = false;
    for (int q = 1; q < opts.kappa_points && !crossed; ++q) {
      double r0 = modulation[q - 1] / base;
      double r1 = modulation[q] / base;
      if (r1 < std::exp(-1.0) && r0 >= std::exp(-1.0) && r1 > 0.0) {
        double t = (std::log(r0) + 1.0) / (std::log(r0) - std::log(r1));
        pt.k_star = kappas[q - 1] + t * (kappas[q] - kappas[q - 1]);
        crossed = true;
      }
    }
    if (!crossed && diag)
      diag->warn("resolution_sweep: no 1/e crossing found within the kappa sweep");
    sweep.push_back(pt);
  }
  return sweep;
}

void save_profile_csv(const std::string& path, const ImageProfile& profile,
                      const std::vector<std::pair<std::string, std::string>>& extra) {
  std::ofstream os(path);
  write_csv_header(os, path);
  os << "# gated: " << (profile.gated ? "true" : "false") << "\n";
  os << "# visibility: " << profile.visibility << "\n";
  double period = fringe_period(profile.axis, profile.intensity);
  os << "# fringe_period_nm: " << period << "\n";
  for (const auto& [k, v] : extra) os << "# " << k << ": " << v << "\n";
  os << "axis_nm,intensity\n";
  for (size_t i = 0; i < profile.axis.size(); ++i)
    os << profile.axis[i] << "," << profile.intensity[i] << "\n";
  if (!os) throw ConfigError("failed writing " + path);
}

void save_ghost_scan_csv(const std::string& path, const GhostScan& scan) {
  std::ofstream os(path);
  write_csv_header(os, path);
  os << "bucket_y_nm,probability\n";
  for (size_t i = 0; i < scan.bucket_y.size(); ++i)
    os << scan.bucket_y[i] << "," << scan.probability[i] << "\n";
  if (!os) throw ConfigError("failed writing " + path);
}

void save_resolution_csv(const std::string& path, const std::vector<ResolutionPoint>& sweep,
                         double lambda_spp) {
  std::ofstream os(path);
  write_csv_header(os, path);
  os << "# lambda_spp_nm: " << lambda_spp << "\n";
  os << "gap_nm,k_star_per_nm,k_star_predicted_per_nm\n";
  for (const auto& pt : sweep)
    os << pt.gap << "," << pt.k_star << "," << pt.k_star_predicted << "\n";
  if (!os) throw ConfigError("failed writing " + path);
}

}  // namespace ghostbeam
