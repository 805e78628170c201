"""Acceptance checks, one per criterion, each at its stated tolerance.

Every check records a PASS/FAIL line; the lines are printed in the pytest
terminal summary and when this file is run as a script.
"""

import math
import warnings

import numpy as np
import pytest

from fbginsole import physics as ph
from fbginsole.chain import Interrogator, session_readings
from fbginsole.dsp import (FirstOrderLowpass, FramePipeline, NyquistClampWarning, assign_peaks, compensate,
                           detect_peaks, strain_to_load, strain_to_mass, wavelength_to_strain,
                           wavelength_to_temperature)
from fbginsole.gateway import Reading, TelemetryFrame, decode_frame, encode_frame, ingest_stream, ParseError
from fbginsole.harness import RunConfig, flagged, loopback_stream, run_roundtrip, run_temperature_session
from fbginsole.layout import (DEFAULT_TEMP_SENSITIVITY, CapacityError, build_default_layout, check_spectral_headroom, plan_spectrum,
                              worst_case_shift)
from fbginsole.maps import LEFT, PRESSURE, RIGHT, FootTemplate, interpolate_map, pearson

RESULTS = []


def record(num, name, ok, detail):
    RESULTS.append(f"[{'PASS' if ok else 'FAIL'}] {num:>2}. {name}: {detail}")
    return ok


LAYOUT = build_default_layout()
TPL = FootTemplate()


def _spectrum_readings(loads, temps, t_cal=25.0):
    inter = Interrogator(LAYOUT, t_cal=t_cal)
    return inter.wavelengths(loads, temps)


def test_01_cross_sensitivity():
    temps = {s.id: 26.0 for s in LAYOUT.sensors}
    lams = _spectrum_readings({}, temps)
    p = LAYOUT.sensor(9)
    t = LAYOUT.sensor(LAYOUT.nearest_temperature_sensor(9))
    raw = wavelength_to_strain(p, lams[p.id])
    apparent = strain_to_mass(p, raw)
    t_meas = wavelength_to_temperature(t, lams[t.id], 25.0)
    residual = abs(strain_to_load(p, compensate(raw, t_meas, 25.0)) - strain_to_load(p, 0.0))
    ok = abs(apparent - 14.55) <= 0.5 and residual <= 0.001
    assert record(1, "cross-sensitivity", ok, f"apparent {apparent:.3f} g at +1 C, compensated residual {residual:.2e} g")


def test_02_pressure_force_constants():
    f80, f600 = ph.pressure_to_force(80.0), ph.pressure_to_force(600.0)
    ok = abs(f80 - 10.134) <= 5e-4 and abs(f600 - 76.006) <= 5e-4 and round(f80) == 10 and round(f600) == 76
    assert record(2, "pressure-force over 126.677 mm^2", ok, f"80 kPa -> {f80:.4f} N, 600 kPa -> {f600:.4f} N")


def test_03_log_calibration_inversion():
    s = LAYOUT.sensor(0)
    masses = np.geomspace(2.0, 10_000.0, 2001)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rel = max(abs(strain_to_mass(s, ph.mass_to_strain(s, m)) - m) / m for m in masses)
    e100 = ph.mass_to_strain(s, 100.0)
    # the stated value is truncated at the third decimal (exact 64.94576)
    ok = rel <= 1e-9 and abs(e100 - 64.945) <= 1e-3
    assert record(3, "log calibration inversion", ok, f"max rel error {rel:.1e}, strain(100 g) = {e100:.5f}")


def test_04_thermistor():
    t0 = ph.thermistor_temperature(ph.THERMISTOR_R0, ph.THERMISTOR_B, ph.THERMISTOR_R0, ph.THERMISTOR_T0)
    t5k = ph.thermistor_temperature(5000.0, 4350.0, 10_000.0, 298.15)
    ok = t0 == ph.THERMISTOR_T0 and abs(t5k - 313.02) <= 0.01
    assert record(4, "thermistor B-model", ok, f"T(R0) = {t0!r} K, T(5 kOhm) = {t5k:.4f} K")


def test_05_end_to_end_recovery():
    rng = np.random.default_rng(20240)
    worst = 0.0
    for _ in range(100):
        load = float(np.exp(rng.uniform(np.log(10.0), np.log(10_000.0))))
        dT = float(rng.uniform(0.0, 25.0))
        temps = {s.id: 25.0 + dT for s in LAYOUT.sensors}
        loads = {s.id: load for s in LAYOUT.pressure_sensors}
        frame = TelemetryFrame(0, 0, tuple(Interrogator(LAYOUT).measure(loads, temps)))
        pipe = FramePipeline(LAYOUT, 40.0, 70.0, t_ref={s.id: 25.0 for s in LAYOUT.temperature_sensors})
        pipe.consume(decode_frame(encode_frame(frame)))
        got = pipe.record().loads[0]
        worst = max(worst, float(np.max(np.abs(got - load) / load)))
    assert record(5, "end-to-end load recovery", worst <= 0.01, f"worst relative error {worst:.2e} over 100 pairs")


def test_06_spectrum_integrity():
    temps = {s.id: 25.0 for s in LAYOUT.sensors}
    frame = ph.synth_spectrum(LAYOUT, ph.sensor_states(LAYOUT, {}, temps, 25.0))
    plan = LAYOUT.spectral_plan()
    peaks = detect_peaks(frame, plan)
    got = assign_peaks(peaks, plan).wavelengths
    err = max(abs(got[sid] - lam) for sid, lam in plan.assignments.items())
    ref_err = abs(next(p.center for p in peaks if p.is_reference) - plan.reference_peak)
    ok = len(peaks) == 21 and len(got) == 20 and max(err, ref_err) <= 1e-6
    assert record(6, "spectrum integrity", ok, f"{len(peaks)} peaks, max centre error {max(err, ref_err):.1e} nm")


def test_07_spectral_headroom():
    plan = LAYOUT.spectral_plan()
    rep = check_spectral_headroom(plan, LAYOUT)
    at_850 = worst_case_shift(850.0, 0.78, DEFAULT_TEMP_SENSITIVITY, 189.0, 25.0)
    try:
        plan_spectrum(31)
        rejected = False
    except CapacityError:
        rejected = True
    ok = at_850 <= 0.35 < plan.guard_band and rep.collisions == () and rejected
    assert record(7, "spectral headroom", ok,
                  f"excursion {at_850:.4f} nm at 850 nm, layout worst {rep.worst_excursion:.4f} nm, "
                  f"guard {plan.guard_band:.3f} nm, collisions {len(rep.collisions)}, 31 sensors rejected={rejected}")


@pytest.mark.xfail(strict=True, reason="the 880 nm grating shifts 0.355 nm at 189 ue and +25 C; "
                                        "0.35 nm holds at the 850 nm design point only")
def test_07_every_grating_within_035_nm():
    rep = check_spectral_headroom(LAYOUT.spectral_plan(), LAYOUT)
    assert rep.worst_excursion <= 0.35


def test_08_filter():
    f = FirstOrderLowpass(10.0, 40.0)
    dc, at_fc = f.gain(0.0), 20 * math.log10(f.gain(10.0))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        FirstOrderLowpass(20.0, 40.0)
    clamp = any(issubclass(w.category, NyquistClampWarning) for w in caught)
    ok = abs(dc - 1.0) <= 1e-9 and abs(at_fc + 3.01) <= 0.2 and clamp
    assert record(8, "first-order Butterworth", ok, f"DC gain {dc:.12f}, gain at fc {at_fc:.3f} dB, clamp warning={clamp}")


def test_09_gait_segmentation():
    sc = ph.GaitScenario(duration=60.0)
    pipe = FramePipeline(LAYOUT, sc.sample_rate, sc.body_mass)
    for k, (t, _, readings) in enumerate(session_readings(sc, LAYOUT)):
        pipe.consume(TelemetryFrame(k, round(t * 1000), tuple(readings)))
    rec = pipe.record()
    hs, to = ph.phase_marks(sc)
    hs_i, to_i = np.array(hs) * sc.sample_rate, np.array(to) * sc.sample_rate
    dev = 0.0
    for c in rec.cycles:
        dev = max(dev, np.min(np.abs(hs_i - c.heel_strike)), np.min(np.abs(to_i - c.toe_off)),
                  np.min(np.abs(hs_i - c.next_heel_strike)))
    ok = abs(len(rec.cycles) - 60) <= 1 and dev <= 1
    assert record(9, "gait segmentation", ok, f"{len(rec.cycles)} cycles in 60 s, max boundary offset {dev:.0f} sample(s)")


def _random_frame(rng):
    n = int(rng.integers(0, 31))
    ids = rng.choice(64, size=n, replace=False)
    readings = []
    for sid in ids:
        mode = "STC"[int(rng.integers(0, 3))]
        val = math.nan if mode == "C" else round(float(rng.uniform(-1e5, 1e5)), 3)
        readings.append(Reading(int(sid), mode, val))
    return TelemetryFrame(int(rng.integers(0, 2**32)), int(rng.integers(0, 2**63)), tuple(readings))


def test_10_gateway():
    rng = np.random.default_rng(10)
    failures = 0
    for _ in range(10_000):
        f = _random_frame(rng)
        if decode_frame(encode_frame(f)) != f:
            failures += 1
    data = encode_frame(TelemetryFrame(5, 125, (Reading(0, "S", 64.945), Reading(6, "T", 31.5), Reading(9, "C", math.nan))))
    false_accepts = 0
    for i in range(len(data)):
        for b in range(256):
            if b != data[i]:
                try:
                    decode_frame(data[:i] + bytes([b]) + data[i + 1:])
                    false_accepts += 1
                except ParseError:
                    pass
    _, gaps = ingest_stream([encode_frame(TelemetryFrame(s, s, ())) for s in (1, 2, 4)])
    cfg = RunConfig(scenario=ph.GaitScenario(duration=60.0), sides=(RIGHT,))
    sent, datagrams = loopback_stream(cfg, LAYOUT, RIGHT)
    frames, rep = ingest_stream(datagrams)
    ok = failures == 0 and false_accepts == 0 and gaps.missing == [3] and len(frames) == 2400 \
        and sent == 2400 and rep.parse_errors == 0
    assert record(10, "gateway", ok, f"{failures} roundtrip failures / 10^4, {false_accepts} false accepts, "
                                     f"missing {gaps.missing}, loopback {len(frames)} frames, {rep.parse_errors} parse errors")


def test_11_maps():
    sc = ph.GaitScenario(duration=2.0)
    fld = ph.synth_gait_field(sc, ph.MIDSTANCE_PHASE)
    sampled = ph.sample_at_sensors(fld, LAYOUT)
    pts = [(s.position, sampled[s.id][0]) for s in LAYOUT.pressure_sensors]
    m = interpolate_map(pts, TPL, PRESSURE)
    exact = all(m.values[TPL.cell_of(*p)] == v for p, v in pts)
    r = pearson(m.values, np.where(TPL.mask, ph.kpa_to_grams(fld.pressure), np.nan))
    single = interpolate_map([((35.0, 44.0), 500.0)], TPL, PRESSURE)
    cell = TPL.cell_of(35.0, 44.0)
    at_sample = single.values[cell] == 500.0 and np.nanmax(single.values) == single.values[cell]
    ok = exact and r >= 0.8 and at_sample
    assert record(11, "maps", ok, f"exact at sample cells={exact}, midstance r = {r:.3f}, single-sample max at sample={at_sample}")


def test_12_asymmetry(tmp_path):
    hot = ph.GaitScenario(duration=600.0, left_offsets={"medial_heel": 3.0, "lateral_heel": 3.0})
    regions = tuple(TPL.regions)
    warm = ph.GaitScenario(duration=600.0, left_offsets={k: 1.0 for k in regions})
    cfg = dict(out=str(tmp_path), temperature_rate=0.1, map_interval=300.0)
    s_hot = run_temperature_session(RunConfig(scenario=hot, **cfg), write=False)
    s_warm = run_temperature_session(RunConfig(scenario=warm, **cfg), write=False)
    worst_warm = max(abs(d) for _, rep in s_warm.asymmetry for d in rep.deltas.values())
    ok = flagged(s_hot) and not flagged(s_warm)
    assert record(12, "temperature asymmetry", ok,
                  f"+3 C left heel flagged={flagged(s_hot)}, +1 C uniform flagged={flagged(s_warm)} (max |delta| {worst_warm:.2f} C)")


def test_13_determinism(tmp_path):
    scen = ph.GaitScenario(duration=10.0, noise_rms=1.0)
    for d in ("a", "b"):
        run_roundtrip(RunConfig(scenario=scen, out=str(tmp_path / d), seed=1234))
    names = sorted(p.name for p in (tmp_path / "a").glob("*.csv"))
    same = all((tmp_path / "a" / n).read_bytes() == (tmp_path / "b" / n).read_bytes() for n in names)
    ok = same and len(names) == 4
    assert record(13, "determinism", ok, f"{len(names)} CSV logs byte-identical={same}")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
