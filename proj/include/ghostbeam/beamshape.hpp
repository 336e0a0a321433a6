#pragma once

#include <map>
#include <string>
#include <vector>

#include "ghostbeam/fields.hpp"
#include "ghostbeam/propagation.hpp"
#include "ghostbeam/scene.hpp"

namespace ghostbeam {

// Dimensionless coupling beta over the transverse plane.
struct BetaMap {
  ComplexField2D values;
  double omega0 = 0.0;       // rad/s
  double v_nm_per_ns = 0.0;  // electron speed
};

// E_z(R, z) samples on a regular 3D grid, V/nm; z fastest.
struct SampledEz {
  int nx = 0, ny = 0, nz = 0;
  double dx = 0.0, dy = 0.0, dz = 0.0;
  Vec2 origin{0.0, 0.0};
  double z0 = 0.0;
  std::vector<cplx> values;

  SampledEz(int nx_, int ny_, int nz_, double dx_, double dy_, double dz_,
            Vec2 origin_, double z0_);
  cplx& at(int ix, int iy, int iz) {
    return values[(static_cast<std::size_t>(ix) * ny + iy) * nz + iz];
  }
  const cplx& at(int ix, int iy, int iz) const {
    return values[(static_cast<std::size_t>(ix) * ny + iy) * nz + iz];
  }
  double z(int iz) const { return z0 + iz * dz; }
};

// beta(R) = (e/hbar omega0) * integral of E_z(R, z) exp(i omega0 z / v) dz,
// trapezoidal along z. Field tails must be < 1e-6 of the peak at the z
// boundaries or a truncation warning is raised.
BetaMap pinem_beta(const SampledEz& ez, double omega0, double v_nm_per_ns,
                   Diagnostics* diag = nullptr);

// T_e = J1(|beta|) * exp(i arg(-beta)).
cplx transmission(cplx beta);

struct RingVortex {
  ComplexField2D reverse_field;  // inward ring-resonator solution, unit peak
  BetaMap beta;
  int l = 0;
};

// Reverse solution for a circularly polarized outcoupled photon on the ring
// resonator: J_l(K rho) e^{i l phi} tapered past the outer ring, scaled so the
// coupling peaks at beta_peak. Requires the scene to hold a RingResonator
// whose spacing equals lambda_spp.
RingVortex ring_vortex_scene(int n_rings, const SlabScene& scene,
                             const SourceParams& source, int l, int n_grid = 513,
                             double beta_peak = 0.3);

struct OamSpectrum {
  std::map<int, double> weights;  // sums to 1
  int dominant_l = 0;
  double mean_l() const;
};

// Azimuthal Fourier decomposition on concentric circles about the intensity
// centroid, radially weighted by |field|^2. An off-center field is recentered
// with a warning.
OamSpectrum oam_analyze(const ComplexField2D& field, int l_max = 8,
                        Diagnostics* diag = nullptr);

OamSpectrum mix_spectra(const OamSpectrum& a, const OamSpectrum& b);

// Summed principal-value phase increments around a circle at the given radius
// about the grid center; 2*pi*l for a clean charge-l vortex.
double phase_winding(const ComplexField2D& field, double radius);

void save_oam_csv(const std::string& path, const OamSpectrum& spectrum);

}  // namespace ghostbeam
