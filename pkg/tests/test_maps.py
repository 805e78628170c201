import numpy as np
import pytest
from hypothesis import given, strategies as st

from fbginsole import physics as ph
from fbginsole.layout import InsoleTemplate
from fbginsole.maps import (LEFT, PRESSURE, RIGHT, TEMPERATURE, FootMap, FootTemplate, MapError, ShapeError,
                            export_map, interpolate_map, map_filename, mirror_map, parse_csv_grid, parse_pgm,
                            pearson)

TPL = FootTemplate()
INSIDE = TPL.cell_centers()[TPL.mask]


def test_template_geometry():
    assert TPL.shape == (52, 18)
    assert TPL.nx * TPL.ny == 936
    assert TPL.origin == (-0.5, -1.0)
    assert TPL.mask.sum() == 710
    same = FootTemplate.from_insole(InsoleTemplate())
    assert np.array_equal(same.mask, TPL.mask)


def test_mirror_is_column_flip():
    centers = TPL.cell_centers()
    assert np.allclose(centers[:, ::-1, 1], TPL.width - centers[:, :, 1])
    assert np.array_equal(TPL.mirror().mirror().mask, TPL.mask)
    assert np.array_equal(TPL.mirror().mask, TPL.mask[:, ::-1])
    assert TPL.for_side(LEFT).mirrored and not TPL.for_side(RIGHT).mirrored


def test_regions_partition_mask():
    masks = TPL.region_masks()
    total = sum(m.astype(int) for m in masks.values())
    assert np.array_equal(total, TPL.mask.astype(int))


def test_single_sample_exact_and_max():
    pos = (35.0, 44.0)
    m = interpolate_map([(pos, 123.0)], TPL, PRESSURE)
    i, j = TPL.cell_of(*pos)
    assert m.values[i, j] == 123.0
    assert np.nanmax(m.values) == 123.0
    assert np.isnan(m.values[TPL.cell_of(230.0, 44.0)])  # beyond 60 mm


def test_temperature_falls_back_to_nearest():
    m = interpolate_map([((35.0, 44.0), 30.0)], TPL, TEMPERATURE)
    assert np.all(m.masked_values == 30.0)


samples = st.lists(
    st.tuples(st.integers(0, len(INSIDE) - 1), st.floats(0, 1000)), min_size=1, max_size=12,
    unique_by=lambda s: s[0])


def _pts(draw_list):
    return [((float(INSIDE[i][0]), float(INSIDE[i][1])), v) for i, v in draw_list]


@given(samples)
def test_idw_bounded_and_exact(sl):
    pts = _pts(sl)
    m = interpolate_map(pts, TPL, PRESSURE)
    vals = [v for _, v in pts]
    finite = m.values[np.isfinite(m.values)]
    assert finite.min() >= min(vals) - 1e-9 and finite.max() <= max(vals) + 1e-9
    for (x, y), v in pts:
        assert m.values[TPL.cell_of(x, y)] == v


@given(samples, st.randoms())
def test_idw_permutation_invariant(sl, rnd):
    pts = _pts(sl)
    shuffled = pts[:]
    rnd.shuffle(shuffled)
    a = interpolate_map(pts, TPL, TEMPERATURE).values
    b = interpolate_map(shuffled, TPL, TEMPERATURE).values
    assert np.allclose(a, b, equal_nan=True, rtol=0, atol=1e-9)


def test_interpolate_errors():
    with pytest.raises(MapError):
        interpolate_map([], TPL, PRESSURE)
    with pytest.raises(MapError):
        interpolate_map([((1000.0, 0.0), 1.0)], TPL, PRESSURE)
    with pytest.raises(MapError):
        interpolate_map([((1.0, 1.0), 1.0)], TPL, PRESSURE)  # corner cell outside mask
    with pytest.raises(ShapeError):
        FootMap(np.zeros((3, 3)), PRESSURE, TPL)


def test_mirror_map_roundtrip():
    m = interpolate_map([((35.0, 30.0), 5.0), ((180.0, 60.0), 9.0)], TPL, PRESSURE)
    mm = mirror_map(m)
    assert mm.side == LEFT
    assert np.array_equal(mirror_map(mm).values, m.values, equal_nan=True)


def test_csv_and_pgm_export():
    m = interpolate_map([((35.0, 44.0), 10.0), ((180.0, 44.0), 30.0)], TPL, PRESSURE, timestamp=1.25)
    grid = parse_csv_grid(export_map(m, "csv"))
    assert grid.shape == (52, 18)
    assert np.allclose(grid, m.values, equal_nan=True, atol=5e-4)
    img = parse_pgm(export_map(m, "pgm"))
    assert img.shape == (52, 18)
    finite = np.isfinite(m.values)
    assert np.all(img[~finite] == 0)
    assert img[finite].min() == 1 and img[finite].max() == 255
    assert map_filename(m, "pgm") == "right_pressure_t1250.pgm"
    flat = FootMap(np.where(TPL.mask, 2.0, np.nan), TEMPERATURE, TPL)
    assert set(np.unique(parse_pgm(export_map(flat, "pgm")))) == {0, 255}
    with pytest.raises(MapError):
        export_map(m, "png")


def test_pearson():
    a = np.arange(10.0)
    assert pearson(a, 2 * a + 1) == pytest.approx(1.0)
    assert pearson(a, -a) == pytest.approx(-1.0)
    assert -1.0 <= pearson(np.random.default_rng(0).normal(size=50), a[:1].repeat(50) + np.arange(50)) <= 1.0


def test_midstance_map_tracks_truth(layout):
    sc = ph.GaitScenario(duration=2.0)
    fld = ph.synth_gait_field(sc, ph.MIDSTANCE_PHASE)
    sampled = ph.sample_at_sensors(fld, layout)
    pts = [(s.position, sampled[s.id][0]) for s in layout.pressure_sensors]
    m = interpolate_map(pts, TPL, PRESSURE)
    truth = ph.kpa_to_grams(fld.pressure)
    assert pearson(m.values, np.where(TPL.mask, truth, np.nan)) >= 0.8
    ti, tj = np.unravel_index(np.argmax(np.where(TPL.mask, truth, -1)), truth.shape)
    centers = TPL.cell_centers()
    assert np.hypot(*(np.array(m.argmax_position()) - centers[ti, tj])) <= 20.0
