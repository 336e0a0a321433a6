#pragma once

#include <string>
#include <vector>

#include "ghostbeam/fields.hpp"
#include "ghostbeam/propagation.hpp"
#include "ghostbeam/scene.hpp"

namespace ghostbeam {

// Entangled source-field/electron state sampled along the object line.
// Per-component incident lines are unit L2 in the dy metric; throughput and
// reverse-wave overlap both live in the c values computed at post-selection.
struct JointState {
  SlabScene scene;
  SourceParams source;
  YAxis axis;
  std::vector<PlaneWaveComponent> components;
  std::vector<std::vector<cplx>> lines;  // incident object-line field per component, unit L2
  std::vector<double> reach;  // fraction of each component's flux crossing the object line
  double electron_k = 0.0;    // rad/nm
};

JointState build_joint_state(const SlabScene& scene, const SourceParams& source,
                             int n_components, double line_dy = 0.0);

// Pure post-selected electron: a finite superposition of recoil plane waves.
// Empty weights encode a dark detection (no photon seen at this bucket point).
struct PostselectedElectron {
  std::vector<Vec2> recoils;
  std::vector<cplx> weights;    // a_j * c_j
  std::vector<cplx> overlaps;   // c_j
  Vec2 detection_point{0.0, 0.0};
  double defocus = 0.0;         // nm
  double electron_k = 0.0;
  bool detected() const { return !weights.empty(); }
};

// Discrete line inner product at x = line_x. Both fields must share the grid
// and be unit L2 along that line; the reverse field carries the conjugation,
// so a plain product suffices and |c| <= 1.
cplx superposition_integral(const ComplexField2D& fwd, const ComplexField2D& rev,
                            double line_x);

// Plain sum(a*b)*dy with no checks; operands follow the same convention.
cplx overlap_line(const std::vector<cplx>& a, const std::vector<cplx>& b, double dy);

PostselectedElectron postselect(const JointState& state, Vec2 bucket_point);

// Indices of weights within threshold of the strongest one.
std::vector<int> dominant_terms(const PostselectedElectron& post, double threshold = 0.05);

struct ImageProfile {
  std::vector<double> axis;       // detector coordinate, nm
  std::vector<double> intensity;  // >= 0
  bool gated = false;
  double visibility = 0.0;
};

// Contrast over the central half of the samples.
double fringe_visibility(const std::vector<double>& intensity);
// Mean spacing of interior local maxima over the central half; 0 if < 2 peaks.
double fringe_period(const std::vector<double>& axis, const std::vector<double>& intensity);

// Detector-plane intensity of the recoil superposition. The detector axis is
// calibrated so a recoil k_y produces exp(i k_y R); defocus enters as the
// quadratic phase defocus*k_y^2/(2 k_e) per component.
ImageProfile electron_image(const PostselectedElectron& post, double defocus,
                            const YAxis& detector);

// Incoherent |a|^2-weighted mixture over components, no post-selection.
ImageProfile ungated_image(const JointState& state, double defocus, const YAxis& detector);

// Sum of un-normalized gated intensities over a set of bucket points.
ImageProfile marginal_image(const JointState& state, const std::vector<Vec2>& bucket_points,
                            double defocus, const YAxis& detector);

struct GhostScan {
  std::vector<double> bucket_y;     // nm
  std::vector<double> probability;  // sum_j |a_j c_j|^2
};

GhostScan ghost_scan(const JointState& state, const std::vector<Vec2>& bucket_points);

// Evenly spaced points across the bucket extent on the bucket line.
std::vector<Vec2> bucket_scan_points(const SlabScene& scene, int count,
                                     double span = 0.0);

struct ResolutionPoint {
  double gap = 0.0;               // nm
  double k_star = 0.0;            // measured 1/e cutoff, rad/nm
  double k_star_predicted = 0.0;  // sqrt(K^2 + 1/gap^2)
};

struct ResolutionOptions {
  double source_sigma = 4.0;  // nm, sub-wavelength probe line
  double dy = 2.0;            // nm
  int n = 8192;
  double kappa_min_frac = 0.3;  // sweep start, units of K
  int kappa_points = 120;
};

// Near-field transfer measurement: a narrow source line crosses gap D, meets a
// grating of frequency kappa, and the phase modulation of the far-field power
// is tracked. k_star is where that modulation falls to 1/e of its value at the
// lowest kappa. Gaps >= lambda_spp are out of the near-field regime (warning).
std::vector<ResolutionPoint> resolution_sweep(double lambda_spp,
                                              const std::vector<double>& gaps,
                                              const ResolutionOptions& opts = {},
                                              Diagnostics* diag = nullptr);

void save_profile_csv(const std::string& path, const ImageProfile& profile,
                      const std::vector<std::pair<std::string, std::string>>& extra = {});
void save_ghost_scan_csv(const std::string& path, const GhostScan& scan);
void save_resolution_csv(const std::string& path, const std::vector<ResolutionPoint>& sweep,
                         double lambda_spp);

}  // namespace ghostbeam
