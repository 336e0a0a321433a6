#pragma once

#include <vector>

#include "ghostbeam/field.hpp"
#include "ghostbeam/scene.hpp"

namespace ghostbeam {

// Electron/plasmon source description. v and gamma are stored redundantly
// with the kinetic energy and must stay consistent (checked on construction).
struct SourceParams {
  double electron_energy_kev = 100.0;
  double v = 0.0;            // beam speed, units of c
  double gamma = 0.0;        // Lorentz factor
  double omega = 0.0;        // plasmon angular frequency, rad/s
  double waist_s = 150.0;    // injected beam waist, nm
  double energy_window_mev = 100.0;
  double field_scale = 1.0;  // overall source-field prefactor (opaque scale)

  // Intrinsic transverse size of the swift-electron near field, v*gamma/omega.
  double s0() const;
  double hbar_omega_ev() const;
  // Electron wavenumber 2 pi / lambda_e, rad/nm (relativistic).
  double electron_wavenumber() const;
};

// Builds consistent kinematics from kinetic energy and photon energy.
SourceParams make_source(double energy_kev, double hbar_omega_ev, double waist_s_nm,
                         double energy_window_mev = 100.0);

// Throws when v/gamma/energy are mutually inconsistent or the waist is below
// the intrinsic source size s0.
void require_valid_source(const SourceParams& p);

// Cylindrical components of the swift-electron evanescent field at transverse
// distance rho from the trajectory:
//   E_z   =  scale * (i/gamma) K0(rho/s0)
//   E_rho = -scale * K1(rho/s0)
// with the full physical prefactor folded into one positive scale constant.
struct SourceFieldSample {
  cplx z;
  cplx rho;
  double magnitude() const;
};
SourceFieldSample swift_electron_field(double rho_nm, const SourceParams& p);

// One term of the angular decomposition of the injected wave: a truncated
// plane wave with in-plane wavevector k (|k| = 2 pi / lambda_spp), amplitude
// a_k, and the recoil exactly -k carried by the matching electron.
struct PlaneWaveComponent {
  Vec2 k;               // rad/nm
  cplx a;               // amplitude, sum |a|^2 = 1 over a decomposition
  Vec2 electron_recoil; // = {-k.x, -k.y}
  double energy_loss_ev = 0.0;
};

// Samples n (odd, >= 3) directions uniformly in angle across the forward
// half-circle, with Gaussian angular weights from the waist-s source profile,
// normalized so sum |a_k|^2 = 1.
std::vector<PlaneWaveComponent> decompose_source(const SlabScene& scene, const SourceParams& p,
                                                 int n);

// Renders one component over the slab grid: Gaussian envelope of waist s
// transverse to k through the injection center, times exp(i k.(rho - rho_inj)),
// then scaled so the total power equals |a_k|^2.
ComplexField2D render_component(const PlaneWaveComponent& comp, const SlabScene& scene,
                                const SourceParams& p, int nx, int ny);

// The same component restricted to the column x = line_x (unnormalized).
std::vector<cplx> component_line(const PlaneWaveComponent& comp, const SlabScene& scene,
                                 const SourceParams& p, const YAxis& axis, double line_x);

}  // namespace ghostbeam
