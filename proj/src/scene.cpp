#include "ghostbeam/scene.hpp"

#include <cmath>
#include <sstream>

#include "ghostbeam/constants.hpp"
#include "ghostbeam/errors.hpp"

namespace ghostbeam {

double SlabScene::wavenumber() const { return 2.0 * kPi / lambda_spp; }

namespace {

cplx sample_profile(const TransmissionProfile& p, double y) {
  double u = (y - p.y0) / p.dy;
  if (u < 0.0 || u > static_cast<double>(p.t.size() - 1)) return {0.0, 0.0};
  int i = static_cast<int>(u);
  if (i >= static_cast<int>(p.t.size()) - 1) return p.t.back();
  double f = u - i;
  return p.t[i] * (1.0 - f) + p.t[i + 1] * f;
}

}  // namespace

std::vector<cplx> build_transfer(const SlabScene& scene, const YAxis& axis) {
  std::vector<cplx> t(axis.n, cplx(0.0, 0.0));
  if (const auto* ds = std::get_if<DoubleSlit>(&scene.object)) {
    double half_b = 0.5 * ds->width_b;
    double half_d = 0.5 * ds->separation_d;
    for (int i = 0; i < axis.n; ++i) {
      double y = axis.y(i);
      if (std::abs(std::abs(y) - half_d) <= half_b) t[i] = 1.0;
    }
  } else if (const auto* tp = std::get_if<TransmissionProfile>(&scene.object)) {
    for (int i = 0; i < axis.n; ++i) t[i] = sample_profile(*tp, axis.y(i));
  } else if (const auto* rr = std::get_if<RingResonator>(&scene.object)) {
    // Cross-section of thin concentric rings (width spacing/10) through the
    // object line.
    double cx = 0.5 * scene.width_x;
    double off = scene.object_x - cx;
    double half_w = 0.05 * rr->spacing;
    for (int i = 0; i < axis.n; ++i) {
      double r = std::hypot(off, axis.y(i));
      for (int m = 1; m <= rr->n_rings; ++m) {
        if (std::abs(r - m * rr->spacing) <= half_w) {
          t[i] = 1.0;
          break;
        }
      }
    }
  }
  return t;
}

std::vector<std::string> validate_scene(const SlabScene& scene) {
  std::vector<std::string> bad;
  auto complain = [&bad](const std::string& s) { bad.push_back(s); };

  if (scene.lambda_spp <= 0.0) complain("lambda_spp must be positive");
  if (scene.width_x <= 0.0 || scene.width_y <= 0.0) complain("slab dimensions must be positive");
  if (!bad.empty()) return bad;

  double half_y = 0.5 * scene.width_y;
  if (scene.injection_center.x < 0.0 || scene.injection_center.x > scene.width_x ||
      std::abs(scene.injection_center.y) > half_y)
    complain("injection_center outside slab");
  if (scene.object_x <= 0.0 || scene.object_x >= scene.width_x)
    complain("object_x outside slab");
  if (scene.bucket_center.x < 0.0 || scene.bucket_center.x > scene.width_x ||
      std::abs(scene.bucket_center.y) > half_y)
    complain("bucket_center outside slab");
  if (!(scene.injection_center.x < scene.object_x && scene.object_x < scene.bucket_center.x))
    complain("expected injection_center.x < object_x < bucket_center.x");
  if (scene.bucket_extent_dy <= 0.0)
    complain("bucket_extent_dy must be positive");
  else if (std::abs(scene.bucket_center.y) + 0.5 * scene.bucket_extent_dy > half_y)
    complain("bucket extent leaves the slab");

  if (const auto* ds = std::get_if<DoubleSlit>(&scene.object)) {
    if (ds->separation_d <= 0.0 || ds->width_b <= 0.0)
      complain("double slit: separation and width must be positive");
    else {
      if (ds->separation_d <= ds->width_b)
        complain("double slit: separation d must exceed slit width b");
      if (0.5 * ds->separation_d + 0.5 * ds->width_b >= half_y)
        complain("double slit: slits leave the slab");
    }
  } else if (const auto* tp = std::get_if<TransmissionProfile>(&scene.object)) {
    if (tp->t.empty() || tp->dy <= 0.0) complain("transmission profile: empty or bad spacing");
    for (const cplx& v : tp->t)
      if (std::abs(v) > 1.0 + 1e-12) {
        complain("transmission profile: |T| exceeds 1 (object must be passive)");
        break;
      }
  } else if (const auto* rr = std::get_if<RingResonator>(&scene.object)) {
    if (rr->n_rings < 1) complain("ring resonator: need at least one ring");
    if (std::abs(rr->spacing - scene.lambda_spp) > 1e-9) {
      std::ostringstream os;
      os << "ring resonator: spacing " << rr->spacing << " nm must equal lambda_spp "
         << scene.lambda_spp << " nm";
      complain(os.str());
    }
    if (rr->n_rings * rr->spacing >= half_y)
      complain("ring resonator: outer ring leaves the slab");
  }
  return bad;
}

void require_valid_scene(const SlabScene& scene) {
  auto bad = validate_scene(scene);
  if (bad.empty()) return;
  std::string msg = "invalid scene:";
  for (const auto& s : bad) msg += "\n  - " + s;
  throw GeometryError(msg);
}

SlabScene default_scene() {
  SlabScene s;
  s.width_x = 20000.0;
  s.width_y = 10000.0;
  s.lambda_spp = 600.0;
  s.injection_center = {2500.0, 0.0};
  s.object_x = 7500.0;
  s.bucket_center = {17500.0, 0.0};
  s.bucket_extent_dy = 8200.0;
  // Slit direction seen from the injection spot lands on the angular grid of
  // the default 33-component decomposition (3 steps of pi/33 off axis).
  double half_d = (s.object_x - s.injection_center.x) * std::tan(3.0 * kPi / 33.0);
  s.object = DoubleSlit{2.0 * half_d, 400.0};
  return s;
}

}  // namespace ghostbeam
