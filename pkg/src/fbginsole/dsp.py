"""Decode physics out of spectra and telemetry: peaks, calibration, filtering, gait events."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .layout import CROSS_SENSITIVITY_UE_PER_C, SensorLayout, SpectralPlan
from .maps import FootMap, FootTemplate, ShapeError, mirror_map
from .physics import FSR_ACTIVE_AREA_MM2

ASYMMETRY_THRESHOLD_C = 2.22
INDIVIDUAL_CUTOFF_HZ = 20.0
COMBINED_CUTOFF_HZ = 10.0
NYQUIST_CLAMP = 0.45
STRAIN_DEADBAND_UE = 0.05


class DspError(ValueError):
    pass


class InterrogatorAbsentError(DspError):
    pass


class AmbiguousAssignmentError(DspError):
    def __init__(self, sensor_id, wavelengths):
        self.sensor_id = sensor_id
        super().__init__(f"sensor {sensor_id} claimed by peaks at "
                         + ", ".join(f"{w:.4f}" for w in wavelengths) + " nm")


class CalibrationError(DspError):
    pass


class NyquistClampWarning(UserWarning):
    pass


class ExtrapolationWarning(UserWarning):
    pass


# -- peaks ----------------------------------------------------------------

@dataclass(frozen=True)
class PeakEstimate:
    center: float
    amplitude: float
    assigned_sensor: int | None = None
    is_reference: bool = False


def _refine(wl: np.ndarray, logamp: np.ndarray, i: int) -> tuple[float, float]:
    n = len(wl)
    m = min(max(i, 1), n - 2)
    l0, l1, l2 = logamp[m - 1], logamp[m], logamp[m + 1]
    h = wl[m + 1] - wl[m]
    den = l0 - 2.0 * l1 + l2
    if den >= 0:
        return float(wl[i]), float(math.exp(logamp[i]))
    delta = 0.5 * (l0 - l2) / den
    center = wl[m] + delta * h
    return float(center), float(math.exp(l1 - 0.25 * (l0 - l2) * delta))


def detect_peaks(frame, plan: SpectralPlan, threshold: float = 0.3) -> list:
    """Local maxima above ``threshold`` refined by a log-amplitude parabola.

    A sampled Gaussian has an exactly parabolic log, so noiseless centres are
    recovered to rounding error. The reference marker is flagged and never
    assigned to a sensor.
    """
    wl = np.asarray(frame.wavelengths, dtype=float)
    amp = np.asarray(frame.amplitudes, dtype=float)
    if wl.size < 3:
        raise DspError("spectrum needs at least three samples")
    if wl[0] > plan.band[0] or wl[-1] < plan.band[1]:
        raise DspError("spectrum grid does not cover the plan band")
    logamp = np.log(np.clip(amp, 1e-300, None))
    left = np.concatenate([[-np.inf], amp[:-1]])
    right = np.concatenate([amp[1:], [-np.inf]])
    idx = np.flatnonzero((amp > threshold) & (amp >= left) & (amp > right))
    peaks = [PeakEstimate(*_refine(wl, logamp, int(i))) for i in idx]

    ref_i = None
    best = plan.guard_band
    for k, p in enumerate(peaks):
        d = abs(p.center - plan.reference_peak)
        if d <= best:
            ref_i, best = k, d
    if ref_i is None:
        raise InterrogatorAbsentError(
            f"no reference peak near {plan.reference_peak:.3f} nm: verify the presence of the interrogator")
    peaks[ref_i] = PeakEstimate(peaks[ref_i].center, peaks[ref_i].amplitude, None, True)
    return peaks


@dataclass(frozen=True)
class PeakAssignment:
    wavelengths: dict
    unassigned: tuple = ()


def assign_peaks(peaks, plan: SpectralPlan) -> PeakAssignment:
    ids = np.array(sorted(plan.assignments))
    nominal = np.array([plan.assignments[i] for i in ids])
    claims: dict = {}
    unassigned = []
    for p in peaks:
        if p.is_reference:
            continue
        k = int(np.argmin(np.abs(nominal - p.center)))
        if abs(nominal[k] - p.center) <= plan.guard_band:
            claims.setdefault(int(ids[k]), []).append(p.center)
        else:
            unassigned.append(p.center)
    for sid, lams in claims.items():
        if len(lams) > 1:
            raise AmbiguousAssignmentError(sid, lams)
    return PeakAssignment({sid: lams[0] for sid, lams in sorted(claims.items())}, tuple(unassigned))


# -- calibration inversion ------------------------------------------------

def wavelength_to_strain(sensor, wavelength: float) -> float:
    """Apparent microstrain, thermal term included."""
    return (wavelength / sensor.lambda_nominal - 1.0) / sensor.strain_sensitivity * 1e6


def wavelength_to_temperature(sensor, wavelength: float, t_cal: float) -> float:
    """Temperature of an unstrained grating whose nominal wavelength holds at ``t_cal``."""
    return t_cal + (wavelength / sensor.lambda_nominal - 1.0) / sensor.temp_sensitivity


def compensate(raw_strain: float, t_now: float, t_ref: float,
               k: float = CROSS_SENSITIVITY_UE_PER_C) -> float:
    return raw_strain - k * (t_now - t_ref)


def strain_to_mass(sensor, strain: float) -> float:
    mass = math.exp((strain - sensor.calib_b) / sensor.calib_a)
    if not 2.0 * (1 - 1e-9) <= mass <= 10_000.0 * (1 + 1e-9):
        warnings.warn(f"{mass:.3f} g extrapolates the calibration range", ExtrapolationWarning, stacklevel=2)
    return mass


def strain_to_load(sensor, strain: float, deadband: float = STRAIN_DEADBAND_UE) -> float:
    """Load for a compensated reading; an unstrained grating carries no load.

    Readings within ``deadband`` of zero count as unstrained, so wire rounding
    cannot flip an idle sensor onto the calibration curve's 8.9 g intercept.
    """
    if not strain > deadband:
        return 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ExtrapolationWarning)
        return strain_to_mass(sensor, strain)


# -- filtering ------------------------------------------------------------

class FirstOrderLowpass:
    """First-order Butterworth low-pass, bilinear transform with prewarped cutoff."""

    def __init__(self, fc: float, fs: float):
        if fs <= 0 or fc <= 0:
            raise DspError("cutoff and sample rate must be positive")
        if fc >= fs / 2.0:
            clamped = NYQUIST_CLAMP * fs
            warnings.warn(f"cutoff {fc:g} Hz is not below Nyquist ({fs / 2:g} Hz); clamped to {clamped:g} Hz",
                          NyquistClampWarning, stacklevel=2)
            fc = clamped
        self.fc, self.fs = fc, fs
        k = math.tan(math.pi * fc / fs)
        self.b0 = self.b1 = k / (1.0 + k)
        self.a1 = (k - 1.0) / (k + 1.0)
        self.reset()

    def reset(self) -> None:
        self._x1 = 0.0
        self._y1 = 0.0

    def step(self, x: float) -> float:
        y = self.b0 * x + self.b1 * self._x1 - self.a1 * self._y1
        self._x1, self._y1 = x, y
        return y

    def run(self, series) -> np.ndarray:
        return np.array([self.step(float(v)) for v in series])

    def gain(self, f: float) -> float:
        z = np.exp(-2j * math.pi * f / self.fs)
        return float(abs((self.b0 + self.b1 * z) / (1.0 + self.a1 * z)))


def lowpass(series, fc: float, fs: float) -> np.ndarray:
    return FirstOrderLowpass(fc, fs).run(series)


# -- gait segmentation ----------------------------------------------------

@dataclass(frozen=True)
class GaitCycle:
    heel_strike: int
    toe_off: int
    next_heel_strike: int


@dataclass(frozen=True)
class Segmentation:
    cycles: tuple
    cadence: float
    open_stance: bool = False


def segment_gait(combined, fs: float, body_mass: float, on_fraction: float = 0.05,
                 hysteresis: float = 0.02, min_stance: float = 0.2) -> Segmentation:
    """Heel strike on rising through ``on_fraction`` of body weight, toe off on
    falling below ``on_fraction - hysteresis``. Series in grams-force."""
    x = np.asarray(combined, dtype=float)
    bw = body_mass * 1000.0
    on, off = on_fraction * bw, (on_fraction - hysteresis) * bw
    cycles = []
    in_stance = False
    strike = None
    pending = None
    for i, v in enumerate(x):
        if not in_stance:
            if v >= on:
                in_stance = True
                if i == 0:
                    strike = None
                    continue
                if pending is not None:
                    cycles.append(GaitCycle(pending[0], pending[1], i))
                pending = None
                strike = i
        elif v < off:
            in_stance = False
            if strike is not None and (i - strike) / fs >= min_stance:
                pending = (strike, i)
            strike = None
    # mean strike-to-strike interval; robust to partial cycles at either end
    cadence = 0.0
    if cycles:
        span = (cycles[-1].next_heel_strike - cycles[0].heel_strike) / fs
        cadence = len(cycles) / span if span > 0 else 0.0
    return Segmentation(tuple(cycles), cadence, in_stance)


# -- calibration fitting --------------------------------------------------

LOG_MASS_STRAIN = "log"
LINEAR = "linear"


@dataclass(frozen=True)
class CalibrationFit:
    model: str
    coefficients: tuple
    r_squared: float

    def predict(self, x):
        a, b = self.coefficients
        x = np.asarray(x, dtype=float)
        return a * np.log(x) + b if self.model == LOG_MASS_STRAIN else a * x + b

    def to_dict(self) -> dict:
        return {"model": self.model, "coefficients": list(self.coefficients), "r_squared": self.r_squared}


def fit_calibration(points, model: str = LOG_MASS_STRAIN) -> CalibrationFit:
    """Least-squares ``y = a ln x + b`` (log) or ``y = a x + b`` (linear)."""
    pts = np.asarray(list(points), dtype=float).reshape(-1, 2)
    if len(pts) < 2:
        raise CalibrationError("at least two points are required")
    x, y = pts[:, 0], pts[:, 1]
    if model == LOG_MASS_STRAIN:
        if np.any(x <= 0):
            raise CalibrationError("log model needs positive abscissae")
        u = np.log(x)
    elif model == LINEAR:
        u = x
    else:
        raise CalibrationError(f"unknown model {model!r}")
    if np.ptp(u) == 0:
        raise CalibrationError("abscissae are all equal")
    design = np.column_stack([u, np.ones_like(u)])
    (a, b), *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - (a * u + b)
    ss_res = float(resid @ resid)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    if ss_tot > 0 and ss_res <= 1e-24 * ss_tot:
        r2 = 1.0
    return CalibrationFit(model, (float(a), float(b)), float(min(max(r2, 0.0), 1.0)))


# -- asymmetry ------------------------------------------------------------

@dataclass(frozen=True)
class AsymmetryReport:
    deltas: dict
    flagged: tuple
    threshold: float

    def to_dict(self) -> dict:
        return {"threshold_C": self.threshold, "flagged": list(self.flagged),
                "deltas_C": dict(self.deltas)}


def asymmetry_analysis(left: FootMap, right: FootMap,
                       threshold: float = ASYMMETRY_THRESHOLD_C) -> AsymmetryReport:
    """Region means of left minus right, the right map reflected onto the left foot."""
    if not left.template.compatible(right.template):
        raise ShapeError("left and right maps use different templates")
    if left.kind != right.kind:
        raise ShapeError("maps carry different quantities")
    if right.side != left.side:
        right = mirror_map(right)
    deltas = {}
    for name, sel in left.template.region_masks().items():
        ok = sel & np.isfinite(left.values) & np.isfinite(right.values)
        if not ok.any():
            continue
        deltas[name] = float(left.values[ok].mean() - right.values[ok].mean())
    flagged = tuple(k for k, d in deltas.items() if abs(d) >= threshold)
    return AsymmetryReport(deltas, flagged, threshold)


# -- telemetry consumer ---------------------------------------------------

def tributary_weights(layout: SensorLayout, template: FootTemplate | None = None) -> np.ndarray:
    """Plantar area each pressure sensor stands for, in units of its own sensing area.

    Every cell inside the template goes to its nearest pressure sensor. Scaling
    a sensor load by this weight turns it into that patch's share of vGRF.
    """
    tpl = template if template is not None else FootTemplate()
    centers = tpl.cell_centers()[tpl.mask]
    pos = np.array([s.position for s in layout.pressure_sensors], dtype=float).reshape(-1, 2)
    if not len(pos):
        return np.zeros(0)
    nearest = np.argmin(((centers[:, None, :] - pos[None]) ** 2).sum(-1), axis=1)
    counts = np.bincount(nearest, minlength=len(pos))
    return counts * tpl.cell_area / FSR_ACTIVE_AREA_MM2


@dataclass
class GaitRecord:
    t_ms: np.ndarray
    sensor_ids: tuple
    loads: np.ndarray               # decoded per-sensor load, g
    raw: np.ndarray                 # per-sensor vGRF share, gf
    filtered: np.ndarray            # per-sensor vGRF after the individual filter
    combined_raw: np.ndarray
    combined: np.ndarray
    temperature_ids: tuple
    temperatures: np.ndarray
    cycles: tuple = ()
    cadence: float = 0.0


@dataclass
class FramePipeline:
    """Single consumer turning ordered telemetry frames into load and temperature series.

    Pressure readings are compensated against the nearest temperature sensor;
    its first reading in the session is the reference.
    """

    layout: SensorLayout
    fs: float
    body_mass: float
    software_compensation: bool = True
    template: FootTemplate | None = None
    t_ref: dict = field(default_factory=dict)
    _rows: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        self._pressure = tuple(s.id for s in self.layout.pressure_sensors)
        self._temps = tuple(s.id for s in self.layout.temperature_sensors)
        self._nearest = {sid: self.layout.nearest_temperature_sensor(sid) for sid in self._pressure}
        self._spec = {s.id: s for s in self.layout.sensors}
        self.weights = tributary_weights(self.layout, self.template)

    def consume(self, frame) -> None:
        by_id = {r.sensor_id: r for r in frame.readings}
        temps = {}
        for sid in self._temps:
            r = by_id.get(sid)
            if r is not None and r.mode == "T" and math.isfinite(r.value):
                temps[sid] = r.value
                self.t_ref.setdefault(sid, r.value)
        loads = []
        for sid in self._pressure:
            r = by_id.get(sid)
            if r is None or r.mode != "S":
                loads.append(math.nan)
                continue
            strain = r.value
            ref = self._nearest[sid]
            if self.software_compensation and ref in temps:
                strain = compensate(strain, temps[ref], self.t_ref[ref])
            loads.append(strain_to_load(self._spec[sid], strain))
        self._rows.append((frame.t_ms, loads, [temps.get(sid, math.nan) for sid in self._temps]))

    def record(self) -> GaitRecord:
        n = len(self._rows)
        t_ms = np.array([r[0] for r in self._rows], dtype=np.int64)
        loads = np.array([r[1] for r in self._rows], dtype=float).reshape(n, len(self._pressure))
        temps = np.array([r[2] for r in self._rows], dtype=float).reshape(n, len(self._temps))
        clean = np.nan_to_num(loads, nan=0.0) * self.weights
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NyquistClampWarning)
            filt = np.column_stack([lowpass(clean[:, k], INDIVIDUAL_CUTOFF_HZ, self.fs)
                                    for k in range(clean.shape[1])]) if n else clean
        combined_raw = clean.sum(axis=1)
        combined = lowpass(combined_raw, COMBINED_CUTOFF_HZ, self.fs)
        seg = segment_gait(combined, self.fs, self.body_mass)
        return GaitRecord(t_ms, self._pressure, loads, clean, filt, combined_raw, combined,
                          self._temps, temps, seg.cycles, seg.cadence)
