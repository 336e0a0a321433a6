"""Smoke checks for the python bindings: one pass over each exposed pipeline."""

import math

import _ghostbeam as gb


def check_imaging():
    scene = gb.default_scene()
    source = gb.make_source(100.0, 2.1, 150.0)
    state = gb.build_joint_state(scene, source, 33)
    assert state.n_components == 33

    ungated = gb.ungated_image(state)
    assert not ungated.gated
    assert ungated.visibility < 0.05

    post = gb.postselect(state, scene.bucket_center.x, scene.bucket_center.y)
    assert post.detected()
    gated = gb.electron_image(post)
    assert gated.gated
    assert gated.visibility > 0.8
    period = gb.fringe_period(gated.axis, gated.intensity)
    assert 900.0 < period < 1200.0

    ys, probs = gb.ghost_scan(state, 33)
    assert len(ys) == len(probs) == 33
    assert all(0.0 <= p <= 1.0 for p in probs)


def check_coincidence():
    a = gb.coincidence_summary(duration_s=0.02, seed=11)
    b = gb.coincidence_summary(duration_s=0.02, seed=11)
    assert a == b
    assert a["records"] > 0
    assert abs(a["tau_ps_ns"] / 1.602176634e7 - 1.0) < 1e-9

    c = gb.coincidence_summary(duration_s=0.02, seed=12)
    assert c != a


def check_beamshape():
    up = gb.ring_oam(l=1)
    dn = gb.ring_oam(l=-1)
    assert up["dominant_l"] == 1
    assert dn["dominant_l"] == -1
    assert up["weights"][1] > 0.95
    assert dn["weights"][-1] > 0.95
    assert abs(up["winding"] - 2.0 * math.pi) < 1e-2
    assert abs(dn["winding"] + 2.0 * math.pi) < 1e-2
    assert abs(up["mean_l"] - 1.0) < 1e-2


def check_resolution():
    rows = gb.resolution_sweep(600.0, [40.0, 80.0, 160.0])
    k_stars = [k for (_, k, _) in rows]
    assert k_stars[0] > k_stars[1] > k_stars[2]
    for gap, _, predicted in rows:
        expect = math.hypot(2.0 * math.pi / 600.0, 1.0 / gap)
        assert abs(predicted / expect - 1.0) < 1e-9


def main():
    check_imaging()
    check_coincidence()
    check_beamshape()
    check_resolution()
    print("python smoke: ok")


if __name__ == "__main__":
    main()
