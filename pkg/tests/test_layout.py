import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fbginsole.layout import (BAND_NM, MAX_SENSORS, CapacityError, FbgSensorSpec, FiberPath, LayoutError,
                              PathBuilder, SensorLayout, TEMPERATURE_IDS, bend_radii, check_spectral_headroom,
                              circumradius, plan_spectrum, validate_layout, worst_case_shift)


def test_plan_twenty_sensors():
    plan = plan_spectrum(20)
    lams = plan.wavelengths
    assert plan.reference_peak == 808.0
    assert lams[0] == pytest.approx(812.0)
    assert lams[-1] == pytest.approx(880.0)
    assert np.allclose(np.diff(lams), 68.0 / 19.0)
    assert plan.guard_band == pytest.approx(1.789, abs=1e-3)


def test_plan_single_sensor_and_capacity():
    assert plan_spectrum(1).wavelengths.tolist() == [880.0]
    plan_spectrum(MAX_SENSORS)
    with pytest.raises(CapacityError):
        plan_spectrum(31)
    with pytest.raises(LayoutError):
        plan_spectrum(0)


@given(st.integers(1, MAX_SENSORS))
def test_plan_in_band_and_disjoint(n):
    plan = plan_spectrum(n)
    lams = np.sort(plan.wavelengths)
    assert lams.size == n
    assert lams[0] >= BAND_NM[0] and lams[-1] <= BAND_NM[1]
    # guard intervals of neighbours and of the reference never overlap
    assert np.all(np.diff(lams) >= 2 * plan.guard_band - 1e-9)
    assert lams[0] - plan.reference_peak >= 2 * plan.guard_band - 1e-9


def test_circumradius_collinear_is_unbounded():
    assert math.isinf(circumradius((0, 0), (1, 1), (2, 2)))


@given(st.floats(1.0, 500.0), st.floats(0.0, 2 * math.pi), st.floats(0.05, 1.0))
def test_circumradius_on_circle(r, phi, dphi):
    pts = [(r * math.cos(phi + k * dphi), r * math.sin(phi + k * dphi)) for k in range(3)]
    assert circumradius(*pts) == pytest.approx(r, abs=1e-6 * max(1.0, r / 100))


def test_path_builder_arc_radius():
    b = PathBuilder(0, 0).straight(10).arc(14.0, 180.0).straight(10)
    radii = bend_radii(b.points)
    assert radii.min() == pytest.approx(14.0, rel=1e-6)
    assert b.s == pytest.approx(20 + math.pi * 14.0)


def test_default_layout_valid(layout):
    rep = validate_layout(layout)
    assert rep.ok, rep.violations
    assert rep.sensor_count == 20
    assert rep.min_bend_radius >= 10.0
    assert layout.fiber.total_length == pytest.approx(1030.0, abs=10.0)
    assert len(layout.pressure_sensors) == 15
    assert tuple(s.id for s in layout.temperature_sensors) == TEMPERATURE_IDS
    assert validate_layout(layout.mirrored()).ok


def test_default_layout_wavelengths_match_plan(layout):
    plan = plan_spectrum(20)
    for s in layout.sensors:
        assert s.lambda_nominal == pytest.approx(plan.assignments[s.id])


def test_validation_reports_violations(layout):
    bad = [FbgSensorSpec(i, "pressure", (50.0, 44.0), 812.0 + i) for i in range(31)]
    bad.append(FbgSensorSpec(99, "pressure", (500.0, 44.0), 900.0))
    tight = PathBuilder(60, 44).straight(10).arc(5.0, 90.0).straight(5)
    lay = SensorLayout(layout.template, FiberPath(np.array(tight.points), 400.0, 2000.0), tuple(bad))
    rules = {v.rule for v in validate_layout(lay).violations}
    assert {"sensor count exceeds 30", "bend radius below 10 mm", "position outside outline",
            "fiber length inconsistent", "wavelength outside band"} <= rules
    # sorted, stable output
    rep = validate_layout(lay)
    assert list(rep.violations) == sorted(rep.violations, key=lambda v: (v.rule, v.element, v.detail))


def test_headroom_defaults(layout):
    plan = layout.spectral_plan()
    rep = check_spectral_headroom(plan, layout)
    assert rep.collisions == ()
    assert worst_case_shift(850.0, 0.78, 1.0248e-5, 189.0, 25.0) == pytest.approx(0.343, abs=2e-3)
    zero = check_spectral_headroom(plan, layout, 0.0, 0.0)
    assert zero.worst_excursion == 0.0 and zero.collisions == ()


def test_headroom_narrow_guard_collides(layout):
    from dataclasses import replace
    plan = replace(layout.spectral_plan(), guard_band=0.1)
    rep = check_spectral_headroom(plan, layout, 0.0, 25.0)
    assert set(rep.collisions) == {s.id for s in layout.sensors}
    assert worst_case_shift(850.0, 0.78, 1.0248e-5, 0.0, 25.0) == pytest.approx(0.218, abs=1e-3)


def test_layout_json_roundtrip(layout, tmp_path):
    p = tmp_path / "layout.json"
    layout.save(p)
    back = SensorLayout.load(p)
    assert [s.id for s in back.sensors] == [s.id for s in layout.sensors]
    for a, b in zip(back.sensors, layout.sensors):
        assert a.position == pytest.approx(b.position)
        assert a.lambda_nominal == b.lambda_nominal
    assert validate_layout(back).ok


def test_malformed_layout_document():
    with pytest.raises(LayoutError):
        SensorLayout.from_dict({"sensors": []})


def test_nearest_temperature_sensor(layout):
    for s in layout.pressure_sensors:
        ref = layout.nearest_temperature_sensor(s.id)
        d = math.dist(s.position, layout.sensor(ref).position)
        assert all(math.dist(s.position, t.position) >= d for t in layout.temperature_sensors)
