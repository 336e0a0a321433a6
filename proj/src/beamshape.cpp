#include "ghostbeam/beamshape.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <variant>

#include "ghostbeam/constants.hpp"
#include "ghostbeam/errors.hpp"
#include "ghostbeam/parallel.hpp"

namespace ghostbeam {

SampledEz::SampledEz(int nx_, int ny_, int nz_, double dx_, double dy_, double dz_,
                     Vec2 origin_, double z0_)
    : nx(nx_), ny(ny_), nz(nz_), dx(dx_), dy(dy_), dz(dz_), origin(origin_), z0(z0_) {
  if (nx < 1 || ny < 1 || nz < 2 || dz <= 0.0)
    throw std::invalid_argument("SampledEz: bad grid");
  values.assign(static_cast<std::size_t>(nx) * ny * nz, cplx(0.0, 0.0));
}

BetaMap pinem_beta(const SampledEz& ez, double omega0, double v_nm_per_ns,
                   Diagnostics* diag) {
  if (omega0 <= 0.0 || v_nm_per_ns <= 0.0)
    throw std::invalid_argument("pinem_beta: omega0 and v must be positive");

  double peak = 0.0, edge = 0.0;
  for (int ix = 0; ix < ez.nx; ++ix)
    for (int iy = 0; iy < ez.ny; ++iy) {
      for (int iz = 0; iz < ez.nz; ++iz)
        peak = std::max(peak, std::abs(ez.at(ix, iy, iz)));
      edge = std::max({edge, std::abs(ez.at(ix, iy, 0)),
                       std::abs(ez.at(ix, iy, ez.nz - 1))});
    }
  if (diag && peak > 0.0 && edge > 1e-6 * peak)
    diag->warn("pinem_beta: field not negligible at the z boundaries, integral truncated");

  // omega0 z / v with z in nm and v in nm/ns.
  double phase_per_nm = omega0 / (v_nm_per_ns * 1e9);
  double coeff = kChargeOverHbar_per_Vs / omega0;

  BetaMap map;
  map.omega0 = omega0;
  map.v_nm_per_ns = v_nm_per_ns;
  map.values = ComplexField2D(ez.nx, ez.ny, ez.dx > 0 ? ez.dx : 1.0,
                              ez.dy > 0 ? ez.dy : 1.0, ez.origin);
  parallel_for(ez.nx, [&](int ix) {
    for (int iy = 0; iy < ez.ny; ++iy) {
      cplx acc(0.0, 0.0);
      for (int iz = 0; iz < ez.nz; ++iz) {
        double ph = phase_per_nm * ez.z(iz);
        cplx term = ez.at(ix, iy, iz) * cplx(std::cos(ph), std::sin(ph));
        acc += (iz == 0 || iz == ez.nz - 1) ? 0.5 * term : term;
      }
      map.values.at(ix, iy) = coeff * acc * ez.dz;
    }
  });
  return map;
}

cplx transmission(cplx beta) {
  double m = std::abs(beta);
  if (m == 0.0) return {0.0, 0.0};
  double j1 = std::cyl_bessel_j(1.0, m);
  double ph = std::arg(-beta);
  return j1 * cplx(std::cos(ph), std::sin(ph));
}

RingVortex ring_vortex_scene(int n_rings, const SlabScene& scene,
                             const SourceParams& source, int l, int n_grid,
                             double beta_peak) {
  if (l != 1 && l != -1)
    throw std::invalid_argument("ring_vortex_scene: only l = +1 or -1 channels exist");
  if (n_rings < 1) throw std::invalid_argument("ring_vortex_scene: n_rings must be >= 1");
  if (n_grid < 33) throw std::invalid_argument("ring_vortex_scene: grid too small");
  const auto* rings = std::get_if<RingResonator>(&scene.object);
  if (!rings) throw GeometryError("ring_vortex_scene: scene object is not a ring resonator");
  if (std::abs(rings->spacing - scene.lambda_spp) > 1e-9)
    throw GeometryError("ring_vortex_scene: ring spacing off the lambda_spp resonance");

  double K = scene.wavenumber();
  double r_flat = n_rings * scene.lambda_spp;
  double extent = 2.0 * (n_rings + 1) * scene.lambda_spp;
  double d = extent / (n_grid - 1);
  ComplexField2D field(n_grid, n_grid, d, d, {-0.5 * extent, -0.5 * extent});
  parallel_for(n_grid, [&](int ix) {
    double x = field.x(ix);
    for (int iy = 0; iy < n_grid; ++iy) {
      double y = field.origin().y + iy * d;
      double rho = std::hypot(x, y);
      double jl = rho > 0.0 ? std::cyl_bessel_j(1.0, K * rho) : 0.0;
      double taper = 1.0;
      if (rho > r_flat) {
        double u = (rho - r_flat) / scene.lambda_spp;
        taper = u >= 1.0 ? 0.0 : std::cos(0.5 * kPi * u) * std::cos(0.5 * kPi * u);
      }
      double phi = std::atan2(y, x);
      double ph = l * phi;
      field.at(ix, iy) = jl * taper * cplx(std::cos(ph), std::sin(ph));
    }
  });

  double peak = 0.0;
  for (const cplx& v : field.values()) peak = std::max(peak, std::abs(v));
  if (peak <= 0.0) throw NumericalError("ring_vortex_scene: empty field");
  for (cplx& v : field.values()) v /= peak;

  RingVortex out;
  out.l = l;
  out.reverse_field = field;
  out.beta.omega0 = source.omega;
  out.beta.v_nm_per_ns = source.v * kSpeedOfLight_nm_per_ns;
  out.beta.values = field;
  for (cplx& v : out.beta.values.values()) v *= beta_peak;
  return out;
}

double OamSpectrum::mean_l() const {
  double m = 0.0;
  for (const auto& [l, w] : weights) m += l * w;
  return m;
}

namespace {

cplx bilinear(const ComplexField2D& f, double x, double y) {
  double fx = (x - f.origin().x) / f.dx();
  double fy = (y - f.origin().y) / f.dy();
  int ix = static_cast<int>(std::floor(fx));
  int iy = static_cast<int>(std::floor(fy));
  if (ix < 0 || iy < 0 || ix + 1 >= f.nx() || iy + 1 >= f.ny()) return {0.0, 0.0};
  double tx = fx - ix, ty = fy - iy;
  return (1 - tx) * (1 - ty) * f.at(ix, iy) + tx * (1 - ty) * f.at(ix + 1, iy) +
         (1 - tx) * ty * f.at(ix, iy + 1) + tx * ty * f.at(ix + 1, iy + 1);
}

}  // namespace

OamSpectrum oam_analyze(const ComplexField2D& field, int l_max, Diagnostics* diag) {
  if (l_max < 1) throw std::invalid_argument("oam_analyze: l_max must be >= 1");
  double cx = 0.0, cy = 0.0, mass = 0.0;
  for (int ix = 0; ix < field.nx(); ++ix)
    for (int iy = 0; iy < field.ny(); ++iy) {
      double w = std::norm(field.at(ix, iy));
      cx += w * field.x(ix);
      cy += w * (field.origin().y + iy * field.dy());
      mass += w;
    }
  if (mass <= 0.0) throw std::invalid_argument("oam_analyze: empty field");
  cx /= mass;
  cy /= mass;
  double gx = field.origin().x + 0.5 * (field.nx() - 1) * field.dx();
  double gy = field.origin().y + 0.5 * (field.ny() - 1) * field.dy();
  if ((std::abs(cx - gx) > field.dx() || std::abs(cy - gy) > field.dy()) && diag)
    diag->warn("oam_analyze: field off-center, recentering on the intensity centroid");

  double r_max = std::min({cx - field.origin().x,
                           field.origin().x + (field.nx() - 1) * field.dx() - cx,
                           cy - field.origin().y,
                           field.origin().y + (field.ny() - 1) * field.dy() - cy}) -
                 std::max(field.dx(), field.dy());
  double dr = std::min(field.dx(), field.dy());
  int n_r = static_cast<int>(std::floor(r_max / dr));
  if (n_r < 4) throw std::invalid_argument("oam_analyze: field support too small");

  constexpr int kPhiSamples = 256;
  int n_l = 2 * l_max + 1;
  std::vector<double> accum(n_l, 0.0);
  std::vector<std::vector<double>> partial(n_r, std::vector<double>(n_l, 0.0));
  parallel_for(n_r, [&](int m) {
    double r = (m + 0.5) * dr;
    std::vector<cplx> ring(kPhiSamples);
    for (int k = 0; k < kPhiSamples; ++k) {
      double phi = 2.0 * kPi * k / kPhiSamples;
      ring[k] = bilinear(field, cx + r * std::cos(phi), cy + r * std::sin(phi));
    }
    for (int il = 0; il < n_l; ++il) {
      int l = il - l_max;
      cplx c(0.0, 0.0);
      for (int k = 0; k < kPhiSamples; ++k) {
        double ph = -l * 2.0 * kPi * k / kPhiSamples;
        c += ring[k] * cplx(std::cos(ph), std::sin(ph));
      }
      c /= static_cast<double>(kPhiSamples);
      partial[m][il] = r * std::norm(c);
    }
  });
  for (int m = 0; m < n_r; ++m)
    for (int il = 0; il < n_l; ++il) accum[il] += partial[m][il];

  double total = 0.0;
  for (double w : accum) total += w;
  if (total <= 0.0) throw std::invalid_argument("oam_analyze: no azimuthal content");

  OamSpectrum spec;
  double best = -1.0;
  for (int il = 0; il < n_l; ++il) {
    int l = il - l_max;
    double w = accum[il] / total;
    spec.weights[l] = w;
    if (w > best) {
      best = w;
      spec.dominant_l = l;
    }
  }
  return spec;
}

OamSpectrum mix_spectra(const OamSpectrum& a, const OamSpectrum& b) {
  OamSpectrum out;
  for (const auto& [l, w] : a.weights) out.weights[l] += 0.5 * w;
  for (const auto& [l, w] : b.weights) out.weights[l] += 0.5 * w;
  double best = -1.0;
  for (const auto& [l, w] : out.weights)
    if (w > best) {
      best = w;
      out.dominant_l = l;
    }
  return out;
}

double phase_winding(const ComplexField2D& field, double radius) {
  if (radius <= 0.0) throw std::invalid_argument("phase_winding: radius must be positive");
  double cx = field.origin().x + 0.5 * (field.nx() - 1) * field.dx();
  double cy = field.origin().y + 0.5 * (field.ny() - 1) * field.dy();
  constexpr int kSteps = 720;
  double total = 0.0;
  cplx prev = bilinear(field, cx + radius, cy);
  for (int k = 1; k <= kSteps; ++k) {
    double phi = 2.0 * kPi * k / kSteps;
    cplx cur = bilinear(field, cx + radius * std::cos(phi), cy + radius * std::sin(phi));
    if (std::abs(cur) == 0.0 || std::abs(prev) == 0.0)
      throw NumericalError("phase_winding: field vanishes on the sampling circle");
    total += std::arg(cur / prev);
    prev = cur;
  }
  return total;
}

void save_oam_csv(const std::string& path, const OamSpectrum& spectrum) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open " + path + " for writing");
  os.precision(17);
  os << "# dominant_l: " << spectrum.dominant_l << "\n";
  os << "# mean_l: " << spectrum.mean_l() << "\n";
  os << "l,weight\n";
  for (const auto& [l, w] : spectrum.weights) os << l << "," << w << "\n";
  if (!os) throw ConfigError("failed writing " + path);
}

}  // namespace ghostbeam
