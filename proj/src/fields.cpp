#include "ghostbeam/fields.hpp"

#include <cmath>
#include <stdexcept>

#include "ghostbeam/constants.hpp"
#include "ghostbeam/errors.hpp"

namespace ghostbeam {

double SourceParams::s0() const {
  // v c gamma / omega, in nm.
  return v * kSpeedOfLight_m_per_s * gamma / omega * 1e9;
}

double SourceParams::hbar_omega_ev() const { return kHbar_eVs * omega; }

double SourceParams::electron_wavenumber() const {
  // pc in keV, lambda_e = h c / (p c).
  double pc = gamma * kElectronRestEnergy_keV * v;
  double lambda_e_nm = 1.23984193 / pc;  // hc = 1239.84193 eV nm
  return 2.0 * kPi / lambda_e_nm;
}

SourceParams make_source(double energy_kev, double hbar_omega_ev, double waist_s_nm,
                         double energy_window_mev) {
  if (energy_kev <= 0.0 || hbar_omega_ev <= 0.0)
    throw std::invalid_argument("make_source: energies must be positive");
  SourceParams p;
  p.electron_energy_kev = energy_kev;
  p.gamma = 1.0 + energy_kev / kElectronRestEnergy_keV;
  p.v = std::sqrt(1.0 - 1.0 / (p.gamma * p.gamma));
  p.omega = hbar_omega_ev / kHbar_eVs;
  p.waist_s = waist_s_nm;
  p.energy_window_mev = energy_window_mev;
  require_valid_source(p);
  return p;
}

void require_valid_source(const SourceParams& p) {
  if (p.v <= 0.0 || p.v >= 1.0) throw std::invalid_argument("source: v must lie in (0, 1)");
  double gamma_expected = 1.0 / std::sqrt(1.0 - p.v * p.v);
  if (std::abs(p.gamma - gamma_expected) > 1e-9 * gamma_expected)
    throw std::invalid_argument("source: gamma inconsistent with v");
  double energy_expected = (p.gamma - 1.0) * kElectronRestEnergy_keV;
  if (std::abs(p.electron_energy_kev - energy_expected) > 1e-9 * std::max(1.0, energy_expected))
    throw std::invalid_argument("source: kinetic energy inconsistent with gamma");
  if (p.omega <= 0.0) throw std::invalid_argument("source: omega must be positive");
  if (p.energy_window_mev <= 0.0 ||
      p.energy_window_mev * 1e-3 > p.hbar_omega_ev())
    throw std::invalid_argument("source: energy window must be positive and below the loss quantum");
  if (p.waist_s < p.s0())
    throw std::invalid_argument("source: waist s must be at least the intrinsic size s0");
  if (p.field_scale <= 0.0) throw std::invalid_argument("source: field_scale must be positive");
}

double SourceFieldSample::magnitude() const {
  return std::sqrt(std::norm(z) + std::norm(rho));
}

SourceFieldSample swift_electron_field(double rho_nm, const SourceParams& p) {
  if (!(rho_nm > 0.0)) throw std::invalid_argument("swift_electron_field: rho must be > 0");
  double u = rho_nm / p.s0();
  double k0, k1;
  if (u > 700.0) {
    // Asymptotic K_nu(u) ~ sqrt(pi/2u) e^-u; underflows smoothly to zero well
    // before either argument overflows.
    double a = std::sqrt(kPi / (2.0 * u)) * std::exp(-u);
    k0 = a;
    k1 = a;
  } else {
    k0 = std::cyl_bessel_k(0, u);
    k1 = std::cyl_bessel_k(1, u);
  }
  SourceFieldSample s;
  s.z = cplx(0.0, p.field_scale / p.gamma * k0);
  s.rho = cplx(-p.field_scale * k1, 0.0);
  return s;
}

std::vector<PlaneWaveComponent> decompose_source(const SlabScene& scene, const SourceParams& p,
                                                 int n) {
  if (n < 3 || n % 2 == 0)
    throw std::invalid_argument("decompose_source: n must be odd and >= 3");
  require_valid_source(p);
  double K = scene.wavenumber();
  double dtheta = kPi / n;
  std::vector<PlaneWaveComponent> comps(n);
  double norm2 = 0.0;
  for (int j = 0; j < n; ++j) {
    double theta = (j - (n - 1) / 2) * dtheta;
    double ky = K * std::sin(theta);
    PlaneWaveComponent& c = comps[j];
    c.k = {K * std::cos(theta), ky};
    c.electron_recoil = {-c.k.x, -c.k.y};
    c.energy_loss_ev = p.hbar_omega_ev();
    // Angular spectrum of the real-space Gaussian exp(-y^2 / 2 s^2).
    double amp = std::exp(-0.5 * ky * ky * p.waist_s * p.waist_s);
    c.a = cplx(amp, 0.0);
    norm2 += amp * amp;
  }
  double scale = 1.0 / std::sqrt(norm2);
  for (auto& c : comps) c.a *= scale;
  return comps;
}

namespace {

// Envelope and carrier of one truncated plane wave at position rho.
inline cplx component_value(const PlaneWaveComponent& comp, const SlabScene& scene,
                            const SourceParams& p, double x, double y) {
  double rx = x - scene.injection_center.x;
  double ry = y - scene.injection_center.y;
  double K = std::hypot(comp.k.x, comp.k.y);
  // Transverse offset from the beam axis through the injection center.
  double t = (-comp.k.y * rx + comp.k.x * ry) / K;
  double env = std::exp(-0.5 * t * t / (p.waist_s * p.waist_s));
  double phase = comp.k.x * rx + comp.k.y * ry;
  return cplx(env * std::cos(phase), env * std::sin(phase));
}

}  // namespace

ComplexField2D render_component(const PlaneWaveComponent& comp, const SlabScene& scene,
                                const SourceParams& p, int nx, int ny) {
  if (nx < 2 || ny < 2) throw std::invalid_argument("render_component: grid too small");
  double dx = scene.width_x / (nx - 1);
  double dy = scene.width_y / (ny - 1);
  ComplexField2D f(nx, ny, dx, dy, {0.0, -0.5 * scene.width_y});
  for (int ix = 0; ix < nx; ++ix) {
    cplx* row = f.line(ix);
    double x = f.x(ix);
    for (int iy = 0; iy < ny; ++iy) row[iy] = component_value(comp, scene, p, x, f.y(iy));
  }
  double target = std::norm(comp.a);
  if (target > 0.0) f.normalize(target);
  return f;
}

std::vector<cplx> component_line(const PlaneWaveComponent& comp, const SlabScene& scene,
                                 const SourceParams& p, const YAxis& axis, double line_x) {
  std::vector<cplx> v(axis.n);
  for (int i = 0; i < axis.n; ++i) v[i] = component_value(comp, scene, p, line_x, axis.y(i));
  return v;
}

}  // namespace ghostbeam
