#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "ghostbeam/beamshape.hpp"
#include "ghostbeam/constants.hpp"
#include "ghostbeam/errors.hpp"
#include "ghostbeam/fields.hpp"
#include "ghostbeam/scene.hpp"

using namespace ghostbeam;

namespace {

SampledEz column(int nz, double dz, double z0) {
  return SampledEz(1, 1, nz, 1.0, 1.0, dz, {0.0, 0.0}, z0);
}

SlabScene ring_scene(int n_rings = 5) {
  auto s = default_scene();
  s.object = RingResonator{n_rings, s.lambda_spp};
  return s;
}

// Displaced Gaussian vortex of charge +1.
ComplexField2D offset_vortex(double cx, double cy) {
  ComplexField2D f(129, 129, 10.0, 10.0, {-640.0, -640.0});
  for (int ix = 0; ix < 129; ++ix)
    for (int iy = 0; iy < 129; ++iy) {
      double x = f.x(ix) - cx, y = f.y(iy) - cy;
      f.at(ix, iy) = cplx(x, y) * std::exp(-(x * x + y * y) / (2.0 * 200.0 * 200.0));
    }
  return f;
}

}  // namespace

TEST_CASE("zero field couples to nothing") {
  auto ez = column(101, 5.0, -250.0);
  auto map = pinem_beta(ez, 3.19e15, 1.64e8);
  CHECK(std::abs(map.values.at(0, 0)) == 0.0);
}

TEST_CASE("constant field matches the closed-form integral") {
  auto source = make_source(100.0, 2.1, 150.0);
  double omega0 = source.omega;
  double v = source.v * kSpeedOfLight_nm_per_ns;
  double kappa = omega0 / (v * 1e9);

  int nz = 65537;
  double z0 = -324.0, z1 = 324.0;
  double dz = (z1 - z0) / (nz - 1);
  auto ez = column(nz, dz, z0);
  cplx e0(0.37, -0.11);
  for (int iz = 0; iz < nz; ++iz) ez.at(0, 0, iz) = e0;

  Diagnostics diag{false, {}};
  auto map = pinem_beta(ez, omega0, v, &diag);
  // A field chopped off at the ends is exactly what the truncation warning
  // is for.
  CHECK(!diag.warnings.empty());

  cplx i_unit(0.0, 1.0);
  cplx closed = kChargeOverHbar_per_Vs / omega0 * e0 *
                (std::exp(i_unit * kappa * z1) - std::exp(i_unit * kappa * z0)) /
                (i_unit * kappa);
  CHECK(std::abs(map.values.at(0, 0) - closed) < 1e-8 * std::abs(closed));
}

TEST_CASE("phase-matched field accumulates linearly with length") {
  auto source = make_source(100.0, 2.1, 150.0);
  double omega0 = source.omega;
  double v = source.v * kSpeedOfLight_nm_per_ns;
  double kappa = omega0 / (v * 1e9);

  auto build = [&](double length, int nz) {
    double dz = length / (nz - 1);
    auto ez = column(nz, dz, -0.5 * length);
    for (int iz = 0; iz < nz; ++iz) {
      double z = ez.z(iz);
      ez.at(0, 0, iz) = 0.2 * std::exp(cplx(0.0, -kappa * z));
    }
    Diagnostics diag{false, {}};
    return pinem_beta(ez, omega0, v, &diag).values.at(0, 0);
  };

  // The matched integrand is constant, so the trapezoid is exact.
  cplx b1 = build(500.0, 2001);
  cplx b2 = build(1000.0, 4001);
  double expect1 = kChargeOverHbar_per_Vs / omega0 * 0.2 * 500.0;
  CHECK(std::abs(b1 - cplx(expect1, 0.0)) < 1e-12 * expect1);
  CHECK(std::abs(b2 - 2.0 * b1) < 1e-12 * std::abs(b2));
}

TEST_CASE("coupling is linear in the field") {
  auto ez = column(257, 2.0, -256.0);
  for (int iz = 0; iz < 257; ++iz) {
    double z = ez.z(iz);
    ez.at(0, 0, iz) = std::exp(-z * z / (2.0 * 60.0 * 60.0)) * cplx(1.0, 0.3);
  }
  auto base = pinem_beta(ez, 3.19e15, 1.64e8).values.at(0, 0);

  cplx scale(-0.7, 1.9);
  for (int iz = 0; iz < 257; ++iz) ez.at(0, 0, iz) *= scale;
  auto scaled = pinem_beta(ez, 3.19e15, 1.64e8).values.at(0, 0);
  CHECK(std::abs(scaled - scale * base) < 1e-10 * std::abs(scaled));
}

TEST_CASE("truncation warning keys on the boundary amplitude") {
  auto make_gauss = [](double half_width) {
    auto ez = column(513, half_width / 256.0, -half_width);
    for (int iz = 0; iz < 513; ++iz) {
      double z = ez.z(iz);
      ez.at(0, 0, iz) = std::exp(-z * z / (2.0 * 30.0 * 30.0));
    }
    return ez;
  };

  Diagnostics wide{false, {}};
  pinem_beta(make_gauss(8.0 * 30.0), 3.19e15, 1.64e8, &wide);
  CHECK(wide.warnings.empty());

  Diagnostics narrow{false, {}};
  pinem_beta(make_gauss(2.0 * 30.0), 3.19e15, 1.64e8, &narrow);
  CHECK(!narrow.warnings.empty());

  Diagnostics strict{true, {}};
  CHECK_THROWS_AS(pinem_beta(make_gauss(2.0 * 30.0), 3.19e15, 1.64e8, &strict),
                  NumericalError);
}

TEST_CASE("first-sideband transmission follows the Bessel series") {
  CHECK(std::abs(transmission(cplx(0.0, 0.0))) == 0.0);

  // x/2 - x^3/16 + x^5/384 at |beta| = 0.1
  double x = 0.1;
  double series = x / 2.0 - std::pow(x, 3) / 16.0 + std::pow(x, 5) / 384.0;
  CHECK(series == doctest::Approx(0.049937526036242).epsilon(1e-9));
  for (double phi : {0.0, 0.8, 2.4, -1.9}) {
    cplx beta = x * std::exp(cplx(0.0, phi));
    auto t = transmission(beta);
    CHECK(std::abs(std::abs(t) - series) < 0.002 * series);
    // Phase convention: the sideband carries arg(-beta).
    double want = std::arg(-beta);
    CHECK(std::abs(std::remainder(std::arg(t) - want, 2.0 * kPi)) < 1e-12);
  }

  double peak = 0.0;
  for (double m = 0.0; m < 10.0; m += 0.01)
    peak = std::max(peak, std::abs(transmission(cplx(m, 0.0))));
  CHECK(peak <= 0.581866);
  CHECK(peak > 0.5818);
}

TEST_CASE("azimuthal decomposition resolves synthetic charges") {
  ComplexField2D f(129, 129, 10.0, 10.0, {-640.0, -640.0});
  for (int ix = 0; ix < 129; ++ix)
    for (int iy = 0; iy < 129; ++iy) {
      double x = f.x(ix), y = f.y(iy);
      double rho2 = x * x + y * y;
      f.at(ix, iy) = cplx(x, y) * cplx(x, y) * std::exp(-rho2 / (2.0 * 180.0 * 180.0));
    }
  Diagnostics diag{false, {}};
  auto spec = oam_analyze(f, 8, &diag);
  CHECK(diag.warnings.empty());
  CHECK(spec.dominant_l == 2);
  CHECK(spec.weights.at(2) > 0.999);
  CHECK(spec.mean_l() == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(phase_winding(f, 300.0) == doctest::Approx(4.0 * kPi).epsilon(1e-6));
}

TEST_CASE("off-center fields are recentered with a warning") {
  Diagnostics diag{false, {}};
  auto spec = oam_analyze(offset_vortex(150.0, -90.0), 8, &diag);
  CHECK(!diag.warnings.empty());
  CHECK(spec.dominant_l == 1);
  CHECK(spec.weights.at(1) > 0.99);
}

TEST_CASE("ring resonator reverse solution is a clean vortex") {
  auto scene = ring_scene();
  auto source = make_source(100.0, 2.1, 150.0);

  for (int l : {1, -1}) {
    auto vortex = ring_vortex_scene(5, scene, source, l, 257);
    CHECK(vortex.l == l);

    const auto& f = vortex.reverse_field;
    double peak = 0.0;
    for (int ix = 0; ix < f.nx(); ++ix)
      for (int iy = 0; iy < f.ny(); ++iy)
        peak = std::max(peak, std::abs(f.at(ix, iy)));
    REQUIRE(peak > 0.0);
    CHECK(std::abs(f.at(f.nx() / 2, f.ny() / 2)) < 1e-9 * peak);

    double winding = phase_winding(f, 0.5 * 5 * scene.lambda_spp);
    CHECK(winding == doctest::Approx(l * 2.0 * kPi).epsilon(1e-3));

    auto spec = oam_analyze(f);
    CHECK(spec.dominant_l == l);
    CHECK(spec.weights.at(l) > 0.99);

    // Coupling is calibrated to the requested peak.
    double bpeak = 0.0;
    for (int ix = 0; ix < vortex.beta.values.nx(); ++ix)
      for (int iy = 0; iy < vortex.beta.values.ny(); ++iy)
        bpeak = std::max(bpeak, std::abs(vortex.beta.values.at(ix, iy)));
    CHECK(bpeak == doctest::Approx(0.3).epsilon(1e-9));
  }
}

TEST_CASE("mirror symmetry between the two vortex charges") {
  auto scene = ring_scene();
  auto source = make_source(100.0, 2.1, 150.0);
  auto up = ring_vortex_scene(5, scene, source, 1, 129);
  auto dn = ring_vortex_scene(5, scene, source, -1, 129);
  const auto& fu = up.reverse_field;
  const auto& fd = dn.reverse_field;
  REQUIRE(fu.nx() == fd.nx());
  REQUIRE(fu.ny() == fd.ny());
  for (int ix = 0; ix < fu.nx(); ix += 8)
    for (int iy = 0; iy < fu.ny(); ++iy)
      CHECK(std::abs(fu.at(ix, iy)) ==
            doctest::Approx(std::abs(fd.at(ix, fd.ny() - 1 - iy))).epsilon(1e-9));
}

TEST_CASE("post-selected sideband keeps the vortex charge") {
  auto scene = ring_scene();
  auto source = make_source(100.0, 2.1, 150.0);
  auto vortex = ring_vortex_scene(5, scene, source, 1, 257);

  ComplexField2D sideband = vortex.beta.values;
  for (int ix = 0; ix < sideband.nx(); ++ix)
    for (int iy = 0; iy < sideband.ny(); ++iy)
      sideband.at(ix, iy) = transmission(vortex.beta.values.at(ix, iy));

  auto spec = oam_analyze(sideband);
  CHECK(spec.dominant_l == 1);
  CHECK(spec.weights.at(1) > 0.95);
  CHECK(spec.mean_l() == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(phase_winding(sideband, 0.5 * 5 * scene.lambda_spp) ==
        doctest::Approx(2.0 * kPi).epsilon(1e-3));
}

TEST_CASE("unconditioned mixture has no net circulation") {
  auto scene = ring_scene();
  auto source = make_source(100.0, 2.1, 150.0);
  auto up = ring_vortex_scene(5, scene, source, 1, 257);
  auto dn = ring_vortex_scene(5, scene, source, -1, 257);
  auto mix = mix_spectra(oam_analyze(up.reverse_field), oam_analyze(dn.reverse_field));
  CHECK(std::abs(mix.mean_l()) < 1e-3);
  CHECK(mix.weights.at(1) == doctest::Approx(0.5).epsilon(0.02));
  CHECK(mix.weights.at(-1) == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("vortex construction guards its inputs") {
  auto scene = ring_scene();
  auto source = make_source(100.0, 2.1, 150.0);
  CHECK_THROWS_AS(ring_vortex_scene(5, scene, source, 0, 129), std::invalid_argument);

  auto flat = default_scene();
  CHECK_THROWS_AS(ring_vortex_scene(5, flat, source, 1, 129), GeometryError);
}
