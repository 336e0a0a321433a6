#pragma once

#include <complex>
#include <string>
#include <variant>
#include <vector>

#include "ghostbeam/field.hpp"

namespace ghostbeam {

// Two slits of width b centered at y = +d/2 and y = -d/2 (center-to-center
// separation d), unit transmission inside, opaque outside.
struct DoubleSlit {
  double separation_d = 0.0;  // nm
  double width_b = 0.0;       // nm
};

// Arbitrary sampled complex transmission T(y); resampled onto the scene grid
// by linear interpolation, zero outside its support.
struct TransmissionProfile {
  std::vector<cplx> t;
  double y0 = 0.0;
  double dy = 0.0;
};

// Concentric outcoupling rings around the scene center; ring spacing must
// equal the plasmon wavelength.
struct RingResonator {
  int n_rings = 5;
  double spacing = 0.0;  // nm
};

using ObjectSpec = std::variant<DoubleSlit, TransmissionProfile, RingResonator>;

// Planar scattering scene. The slab spans x in [0, width_x], y in
// [-width_y/2, width_y/2]. The surface wave is injected around
// injection_center, crosses the object line at x = object_x and is collected
// at a point within +-bucket_extent_dy/2 of bucket_center on the bucket line.
struct SlabScene {
  double width_x = 0.0;
  double width_y = 0.0;
  double lambda_spp = 0.0;  // nm
  Vec2 injection_center;
  double object_x = 0.0;
  Vec2 bucket_center;
  double bucket_extent_dy = 0.0;
  ObjectSpec object = DoubleSlit{};

  double wavenumber() const;  // 2 pi / lambda_spp
};

// Samples the object transmission on a y axis. |T| <= 1 everywhere (passive
// object); DoubleSlit and RingResonator produce real 0/1 masks.
std::vector<cplx> build_transfer(const SlabScene& scene, const YAxis& axis);

// Returns a list of human-readable violations; empty means the scene is
// usable. Callers in strict mode treat any entry as fatal.
std::vector<std::string> validate_scene(const SlabScene& scene);

// Throws GeometryError when validate_scene reports problems.
void require_valid_scene(const SlabScene& scene);

// Reference layout: 20 x 10 um slab, 600 nm plasmon wavelength, object line
// 5 um past the injection spot, bucket line 10 um past the object.
SlabScene default_scene();

}  // namespace ghostbeam
