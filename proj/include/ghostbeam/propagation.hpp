#pragma once

#include <string>
#include <vector>

#include "ghostbeam/field.hpp"
#include "ghostbeam/scene.hpp"

namespace ghostbeam {

enum class Boundary {
  // Open-domain approximation: cos^2 taper on the outer 5% of the y range,
  // 4x zero padding, and a smooth numerical-aperture rolloff of the angular
  // spectrum (flat to 0.6 K, cos^4 rolloff to 0.85 K). Suppresses periodic
  // wrap-around of near-grazing waves; not exactly power conserving.
  apodized,
  // Plain periodic transform on the given grid. Unitary on the propagating
  // band when evanescent components are excluded; use for invariance checks
  // and operator composition.
  periodic,
};

struct Propagator {
  double lambda_spp = 0.0;  // nm
  double distance = 0.0;    // advance along +x, nm, >= 0
  bool include_evanescent = true;
  Boundary boundary = Boundary::apodized;
};

// Warning sink. In strict mode a warning is escalated to NumericalError.
struct Diagnostics {
  bool strict = false;
  std::vector<std::string> warnings;
  void warn(const std::string& msg);
};

// Advances every x = const line of the field by prop.distance along x using
// the one-dimensional angular spectrum along y:
// band |k_y| <= K gets phase exp(i d sqrt(K^2 - k_y^2)); beyond the band the
// factor is exp(-d sqrt(k_y^2 - K^2)) when evanescent components are kept,
// else zero. distance 0 is an exact identity in both boundary modes.
ComplexField2D propagate(const ComplexField2D& field, const Propagator& prop,
                         Diagnostics* diag = nullptr);

// Single-line version of the same operator.
std::vector<cplx> propagate_line(std::vector<cplx> line, const YAxis& axis,
                                 const Propagator& prop, Diagnostics* diag = nullptr);

// Fills columns of a slab map from one source line: column ix of the result
// holds the source line advanced by x(ix) - source_x (columns before the
// source line are left zero). Uses the apodized open-domain treatment.
ComplexField2D propagate_map(const std::vector<cplx>& source_line, const YAxis& axis,
                             double source_x, double lambda_spp, int nx, double dx,
                             double x0, Diagnostics* diag = nullptr);

// Pointwise object transmission along each line (t sampled on the y grid).
void apply_transfer(ComplexField2D& field, const std::vector<cplx>& t);
void apply_transfer(std::vector<cplx>& line, const std::vector<cplx>& t);

// Reverse (detection-side) solution for a wave collected at bucket_point,
// restricted to the column x = line_x: the point response propagated back
// across bucket_x - line_x, normalized to unit L2 before the object mask,
// conjugated, then multiplied by the object transmission when the line lies
// on the object line. Conjugation makes the plain product with a forward
// field an inner product, so overlap magnitudes never exceed 1. The local
// wavevector of the returned line at each transparent patch is therefore
// antiparallel to the unit vector from bucket_point toward the patch.
std::vector<cplx> time_reversed_line(Vec2 bucket_point, const SlabScene& scene,
                                     const YAxis& axis, double line_x);

// As above but without the conjugation/mask bookkeeping: the raw band-limited
// point response at distance dist (used by the full-map builder and tests).
std::vector<cplx> point_response_line(double py_offset_from_y0, const YAxis& axis,
                                      double lambda_spp, double dist);

// Full-slab reverse field: every column gets the back-propagated point
// response, columns at x <= object_x carry the object transmission, and the
// whole map is scaled so the unmasked object-line restriction has unit L2.
ComplexField2D time_reversed_field(Vec2 bucket_point, const SlabScene& scene, int nx, int ny);

}  // namespace ghostbeam
