#include "ghostbeam/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ghostbeam/constants.hpp"
#include "ghostbeam/errors.hpp"
#include "ghostbeam/fft.hpp"
#include "ghostbeam/parallel.hpp"

namespace ghostbeam {

void Diagnostics::warn(const std::string& msg) {
  if (strict) throw NumericalError(msg);
  warnings.push_back(msg);
}

namespace {

constexpr double kNaFlat = 0.60;   // |k_y|/K below which the aperture is open
constexpr double kNaZero = 0.85;   // |k_y|/K beyond which it is closed
constexpr int kPadFactor = 4;
constexpr double kTaperFraction = 0.05;

// Smooth numerical-aperture window used by the open-domain treatment.
double na_window(double ky, double K) {
  double u = std::abs(ky) / K;
  if (u <= kNaFlat) return 1.0;
  if (u >= kNaZero) return 0.0;
  double c = std::cos(0.5 * kPi * (u - kNaFlat) / (kNaZero - kNaFlat));
  return c * c * c * c;
}

// Angular-spectrum factor for one advance.
cplx transfer_factor(double ky, double K, double dist, bool evanescent) {
  double kk = K * K - ky * ky;
  if (kk >= 0.0) {
    double kx = std::sqrt(kk);
    return cplx(std::cos(kx * dist), std::sin(kx * dist));
  }
  if (!evanescent) return {0.0, 0.0};
  return {std::exp(-dist * std::sqrt(-kk)), 0.0};
}

void taper_edges(cplx* line, int n) {
  int m = static_cast<int>(std::floor(kTaperFraction * n));
  for (int i = 0; i < m; ++i) {
    double s = std::sin(0.5 * kPi * (i + 1) / (m + 1));
    double w = s * s;
    line[i] *= w;
    line[n - 1 - i] *= w;
  }
}

void check_band_occupancy(const std::vector<cplx>& spectrum, int n, double dy,
                          Diagnostics* diag) {
  if (!diag) return;
  double knyq = kPi / dy;
  double total = 0.0, top = 0.0;
  for (int j = 0; j < n; ++j) {
    double p = std::norm(spectrum[j]);
    total += p;
    if (std::abs(fft_wavenumber(j, n, dy)) >= 0.9 * knyq) top += p;
  }
  if (total > 0.0 && top > 0.01 * total) {
    std::ostringstream os;
    os << "sampling: " << (100.0 * top / total)
       << "% of line power sits in the top 10% of the spatial band; decrease dy";
    diag->warn(os.str());
  }
}

void require_propagable(double dy, const Propagator& prop) {
  if (prop.lambda_spp <= 0.0)
    throw std::invalid_argument("propagate: lambda_spp must be positive");
  if (prop.distance < 0.0) throw std::invalid_argument("propagate: negative distance");
  if (dy > prop.lambda_spp / 4.0 + 1e-12)
    throw NumericalError("propagate: grid spacing dy exceeds lambda_spp/4");
}

void propagate_one_line(cplx* data, int n, double dy, const Propagator& prop,
                        Diagnostics* diag, bool first_line) {
  double K = 2.0 * kPi / prop.lambda_spp;
  if (prop.boundary == Boundary::periodic) {
    std::vector<cplx> buf(data, data + n);
    fft(buf, -1);
    if (first_line) check_band_occupancy(buf, n, dy, diag);
    for (int j = 0; j < n; ++j)
      buf[j] *= transfer_factor(fft_wavenumber(j, n, dy), K, prop.distance,
                                prop.include_evanescent);
    fft(buf, +1);
    std::copy(buf.begin(), buf.end(), data);
    return;
  }
  int npad = next_fast_size(kPadFactor * n);
  std::vector<cplx> buf(npad, cplx(0.0, 0.0));
  std::copy(data, data + n, buf.begin());
  taper_edges(buf.data(), n);
  fft(buf, -1);
  if (first_line) check_band_occupancy(buf, npad, dy, diag);
  for (int j = 0; j < npad; ++j) {
    double ky = fft_wavenumber(j, npad, dy);
    buf[j] *= transfer_factor(ky, K, prop.distance, prop.include_evanescent) * na_window(ky, K);
  }
  fft(buf, +1);
  std::copy(buf.begin(), buf.begin() + n, data);
}

}  // namespace

ComplexField2D propagate(const ComplexField2D& field, const Propagator& prop,
                         Diagnostics* diag) {
  require_propagable(field.dy(), prop);
  ComplexField2D out = field;
  if (prop.distance == 0.0) return out;
  // Band check once on the first line; warnings from worker threads would race.
  propagate_one_line(out.line(0), out.ny(), out.dy(), prop, diag, true);
  parallel_for(out.nx() - 1, [&](int i) {
    propagate_one_line(out.line(i + 1), out.ny(), out.dy(), prop, nullptr, false);
  });
  return out;
}

std::vector<cplx> propagate_line(std::vector<cplx> line, const YAxis& axis,
                                 const Propagator& prop, Diagnostics* diag) {
  if (static_cast<int>(line.size()) != axis.n)
    throw std::invalid_argument("propagate_line: line/axis size mismatch");
  require_propagable(axis.dy, prop);
  if (prop.distance == 0.0) return line;
  propagate_one_line(line.data(), axis.n, axis.dy, prop, diag, true);
  return line;
}

ComplexField2D propagate_map(const std::vector<cplx>& source_line, const YAxis& axis,
                             double source_x, double lambda_spp, int nx, double dx,
                             double x0, Diagnostics* diag) {
  Propagator probe{lambda_spp, 0.0, true, Boundary::apodized};
  require_propagable(axis.dy, probe);
  int n = axis.n;
  int npad = next_fast_size(kPadFactor * n);
  std::vector<cplx> spectrum(npad, cplx(0.0, 0.0));
  std::copy(source_line.begin(), source_line.end(), spectrum.begin());
  taper_edges(spectrum.data(), n);
  fft(spectrum, -1);
  check_band_occupancy(spectrum, npad, axis.dy, diag);

  double K = 2.0 * kPi / lambda_spp;
  ComplexField2D out(nx, n, dx, axis.dy, {x0, axis.y0});
  parallel_for(nx, [&](int ix) {
    double dist = out.x(ix) - source_x;
    if (dist < 0.0) return;  // column stays zero upstream of the source line
    std::vector<cplx> buf(npad);
    for (int j = 0; j < npad; ++j) {
      double ky = fft_wavenumber(j, npad, axis.dy);
      buf[j] = spectrum[j] * transfer_factor(ky, K, dist, true) * na_window(ky, K);
    }
    fft(buf, +1);
    std::copy(buf.begin(), buf.begin() + n, out.line(ix));
  });
  return out;
}

void apply_transfer(ComplexField2D& field, const std::vector<cplx>& t) {
  if (static_cast<int>(t.size()) != field.ny())
    throw std::invalid_argument("apply_transfer: transmission/grid size mismatch");
  for (int ix = 0; ix < field.nx(); ++ix) {
    cplx* row = field.line(ix);
    for (int iy = 0; iy < field.ny(); ++iy) row[iy] *= t[iy];
  }
}

void apply_transfer(std::vector<cplx>& line, const std::vector<cplx>& t) {
  if (t.size() != line.size())
    throw std::invalid_argument("apply_transfer: transmission/line size mismatch");
  for (size_t i = 0; i < line.size(); ++i) line[i] *= t[i];
}

std::vector<cplx> point_response_line(double py_offset_from_y0, const YAxis& axis,
                                      double lambda_spp, double dist) {
  double K = 2.0 * kPi / lambda_spp;
  int npad = next_fast_size(kPadFactor * axis.n);
  std::vector<cplx> buf(npad);
  for (int j = 0; j < npad; ++j) {
    double ky = fft_wavenumber(j, npad, axis.dy);
    // Spectrum of a delta at the detection point, aperture limited.
    cplx src(std::cos(ky * py_offset_from_y0), -std::sin(ky * py_offset_from_y0));
    buf[j] = src * transfer_factor(ky, K, dist, true) * na_window(ky, K);
  }
  fft(buf, +1);
  buf.resize(axis.n);
  return buf;
}

std::vector<cplx> time_reversed_line(Vec2 bucket_point, const SlabScene& scene,
                                     const YAxis& axis, double line_x) {
  double dist = bucket_point.x - line_x;
  if (dist <= 0.0)
    throw GeometryError("time_reversed_line: line must lie upstream of the bucket point");
  std::vector<cplx> g = point_response_line(bucket_point.y - axis.y0, axis,
                                            scene.lambda_spp, dist);
  normalize_line(g, axis.dy);
  for (cplx& v : g) v = std::conj(v);
  if (std::abs(line_x - scene.object_x) < 0.5 * axis.dy) {
    auto t = build_transfer(scene, axis);
    apply_transfer(g, t);
  }
  return g;
}

ComplexField2D time_reversed_field(Vec2 bucket_point, const SlabScene& scene, int nx, int ny) {
  require_valid_scene(scene);
  if (nx < 2 || ny < 2) throw std::invalid_argument("time_reversed_field: grid too small");
  double dx = scene.width_x / (nx - 1);
  double dy = scene.width_y / (ny - 1);
  YAxis axis{ny, dy, -0.5 * scene.width_y};
  auto transfer = build_transfer(scene, axis);

  ComplexField2D out(nx, ny, dx, dy, {0.0, axis.y0});
  parallel_for(nx, [&](int ix) {
    double dist = std::abs(bucket_point.x - out.x(ix));
    std::vector<cplx> g;
    if (dist < 1e-9) {
      // On the detection column itself: band-limited spike.
      g = point_response_line(bucket_point.y - axis.y0, axis, scene.lambda_spp, 0.0);
    } else {
      g = point_response_line(bucket_point.y - axis.y0, axis, scene.lambda_spp, dist);
    }
    for (cplx& v : g) v = std::conj(v);
    if (out.x(ix) <= scene.object_x) apply_transfer(g, transfer);
    std::copy(g.begin(), g.end(), out.line(ix));
  });

  // Unit L2 for the unmasked restriction to the object line.
  double dist_obj = bucket_point.x - scene.object_x;
  auto g_obj = point_response_line(bucket_point.y - axis.y0, axis, scene.lambda_spp, dist_obj);
  double n0 = line_norm(g_obj, dy);
  if (n0 <= 0.0) throw NumericalError("time_reversed_field: degenerate reverse line");
  for (cplx& v : out.values()) v /= n0;
  return out;
}

}  // namespace ghostbeam
