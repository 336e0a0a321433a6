// Thin Python bindings over the core pipeline: enough to build a scene, run
// the imaging chain, and sanity-check results from scripts.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ghostbeam/beamshape.hpp"
#include "ghostbeam/coincidence.hpp"
#include "ghostbeam/fields.hpp"
#include "ghostbeam/joint.hpp"
#include "ghostbeam/scene.hpp"

namespace py = pybind11;
using namespace ghostbeam;

namespace {

YAxis detector_axis(double halfwidth, int points) {
  if (points < 3) throw std::invalid_argument("detector needs at least 3 points");
  return YAxis::centered(halfwidth, 2.0 * halfwidth / (points - 1));
}

}  // namespace

PYBIND11_MODULE(_ghostbeam, m) {
  m.doc() = "plasmon-mediated electron ghost imaging core";

  py::class_<Vec2>(m, "Vec2")
      .def(py::init<>())
      .def(py::init([](double x, double y) { return Vec2{x, y}; }))
      .def_readwrite("x", &Vec2::x)
      .def_readwrite("y", &Vec2::y);

  py::class_<SlabScene>(m, "SlabScene")
      .def_readwrite("width_x", &SlabScene::width_x)
      .def_readwrite("width_y", &SlabScene::width_y)
      .def_readwrite("lambda_spp", &SlabScene::lambda_spp)
      .def_readwrite("injection_center", &SlabScene::injection_center)
      .def_readwrite("object_x", &SlabScene::object_x)
      .def_readwrite("bucket_center", &SlabScene::bucket_center)
      .def_readwrite("bucket_extent_dy", &SlabScene::bucket_extent_dy)
      .def("wavenumber", &SlabScene::wavenumber);

  py::class_<SourceParams>(m, "SourceParams")
      .def_readwrite("electron_energy_kev", &SourceParams::electron_energy_kev)
      .def_readwrite("waist_s", &SourceParams::waist_s)
      .def_readonly("v", &SourceParams::v)
      .def_readonly("gamma", &SourceParams::gamma)
      .def("s0", &SourceParams::s0)
      .def("electron_wavenumber", &SourceParams::electron_wavenumber);

  py::class_<JointState>(m, "JointState")
      .def_property_readonly("n_components",
                             [](const JointState& s) { return s.components.size(); })
      .def_property_readonly("electron_k", [](const JointState& s) { return s.electron_k; });

  py::class_<PostselectedElectron>(m, "PostselectedElectron")
      .def_readonly("weights", &PostselectedElectron::weights)
      .def_readonly("overlaps", &PostselectedElectron::overlaps)
      .def("detected", &PostselectedElectron::detected);

  py::class_<ImageProfile>(m, "ImageProfile")
      .def_readonly("axis", &ImageProfile::axis)
      .def_readonly("intensity", &ImageProfile::intensity)
      .def_readonly("gated", &ImageProfile::gated)
      .def_readonly("visibility", &ImageProfile::visibility);

  m.def("default_scene", &default_scene);
  m.def("make_source", &make_source, py::arg("energy_kev"), py::arg("hbar_omega_ev"),
        py::arg("waist_s_nm"), py::arg("energy_window_mev") = 100.0);
  m.def(
      "build_joint_state",
      [](const SlabScene& scene, const SourceParams& source, int n, double line_dy) {
        return build_joint_state(scene, source, n, line_dy);
      },
      py::arg("scene"), py::arg("source"), py::arg("n_components") = 33,
      py::arg("line_dy") = 0.0);
  m.def(
      "postselect",
      [](const JointState& state, double x, double y) {
        return postselect(state, Vec2{x, y});
      },
      py::arg("state"), py::arg("bucket_x"), py::arg("bucket_y"));
  m.def(
      "electron_image",
      [](const PostselectedElectron& post, double defocus, double halfwidth, int points) {
        return electron_image(post, defocus, detector_axis(halfwidth, points));
      },
      py::arg("post"), py::arg("defocus") = 0.0, py::arg("halfwidth") = 4000.0,
      py::arg("points") = 513);
  m.def(
      "ungated_image",
      [](const JointState& state, double halfwidth, int points) {
        return ungated_image(state, 0.0, detector_axis(halfwidth, points));
      },
      py::arg("state"), py::arg("halfwidth") = 4000.0, py::arg("points") = 513);
  m.def(
      "ghost_scan",
      [](const JointState& state, int count) {
        auto scan = ghost_scan(state, bucket_scan_points(state.scene, count));
        return py::make_tuple(scan.bucket_y, scan.probability);
      },
      py::arg("state"), py::arg("count") = 129);
  m.def("fringe_visibility", &fringe_visibility);
  m.def("fringe_period", &fringe_period);
  m.def(
      "resolution_sweep",
      [](double lambda_spp, const std::vector<double>& gaps) {
        std::vector<std::tuple<double, double, double>> rows;
        for (const auto& p : resolution_sweep(lambda_spp, gaps))
          rows.emplace_back(p.gap, p.k_star, p.k_star_predicted);
        return rows;
      },
      py::arg("lambda_spp"), py::arg("gaps"));
  m.def(
      "coincidence_summary",
      [](double current_pa, double p_spp, double p_ps, double window_ns, double dead_ns,
         double dark_hz, double duration_s, std::uint64_t seed) {
        RateConfig cfg;
        cfg.current_pa = current_pa;
        cfg.p_spp = p_spp;
        cfg.p_ps = p_ps;
        cfg.window_ns = window_ns;
        cfg.dead_time_ns = dead_ns;
        cfg.dark_rate_hz = dark_hz;
        cfg.duration_s = duration_s;
        cfg.rng_seed = seed;
        require_valid_rates(cfg);
        auto log = simulate_events(cfg);
        auto sum = correlate(log, cfg.window_ns, cfg.dead_time_ns);
        py::dict d;
        d["records"] = log.records.size();
        d["true_count"] = sum.true_count;
        d["accidental_count"] = sum.accidental_count;
        d["dead_time_rejected"] = sum.dead_time_rejected;
        d["tau_e_ns"] = cfg.tau_e_ns();
        d["tau_spp_ns"] = cfg.tau_spp_ns();
        d["tau_ps_ns"] = cfg.tau_ps_ns();
        d["empirical_tau_ps_ns"] = sum.empirical_tau_ps_ns();
        return d;
      },
      py::arg("current_pa") = 10.0, py::arg("p_spp") = 1e-3, py::arg("p_ps") = 1e-3,
      py::arg("window_ns") = 10.0, py::arg("dead_ns") = 1e4, py::arg("dark_hz") = 0.0,
      py::arg("duration_s") = 1.0, py::arg("seed") = 1);
  m.def(
      "ring_oam",
      [](int l, int n_rings, int n_grid) {
        auto scene = default_scene();
        scene.object = RingResonator{n_rings, scene.lambda_spp};
        auto source = make_source(100.0, 2.1, 150.0);
        auto ring = ring_vortex_scene(n_rings, scene, source, l, n_grid | 1);
        ComplexField2D side = ring.beta.values;
        for (auto& v : side.values()) v = transmission(v);
        auto spec = oam_analyze(side);
        double winding = phase_winding(side, 0.5 * n_rings * scene.lambda_spp);
        py::dict d;
        d["dominant_l"] = spec.dominant_l;
        d["mean_l"] = spec.mean_l();
        d["weights"] = spec.weights;
        d["winding"] = winding;
        return d;
      },
      py::arg("l") = 1, py::arg("n_rings") = 5, py::arg("n_grid") = 257);
}
