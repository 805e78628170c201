"""Forward models: Bragg response, gait field synthesis, electronic-insole transducers."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .layout import BAND_NM, LayoutError, SensorLayout
from .maps import LEFT, RIGHT, FootTemplate

G = 9.80665
FSR_ACTIVE_AREA_MM2 = 126.677
THERMISTOR_B = 4350.0
THERMISTOR_R0 = 10_000.0
THERMISTOR_T0 = 298.15
KELVIN = 273.15

CALIBRATION_RANGE_G = (2.0, 10_000.0)
PEAK_FWHM_NM = 0.2
SPECTRUM_BINS = 4096
SPECTRUM_MARGIN_NM = 2.0

# Half-sine stance lobes, as cycle-phase windows.
HEEL_WINDOW = (0.0, 0.4)
FOREFOOT_WINDOW = (0.3, 0.6)
STANCE_END = 0.6
MIDSTANCE_PHASE = 0.35
LOBE_PEAK_BW = 1.1
FOREFOOT_TOE_SHARE = 0.25

# Load blobs in right-insole coordinates: centre (x, y), sigma (x, y), mm.
HEEL_BLOB = ((35.0, 44.0), (22.0, 16.0))
METATARSAL_BLOB = ((180.0, 48.0), (18.0, 24.0))
HALLUX_BLOB = ((222.0, 70.0), (12.0, 11.0))

MAX_PRESSURE_KPA = 600.0


class PhysicsError(ValueError):
    pass


class CalibrationRangeWarning(UserWarning):
    pass


# -- Bragg grating --------------------------------------------------------

def bragg_wavelength(sensor, strain: float, dT: float) -> float:
    """Reflected wavelength (nm) for ``strain`` in microstrain and ``dT`` in degrees C."""
    return sensor.lambda_nominal * (1.0 + sensor.strain_sensitivity * strain * 1e-6
                                    + sensor.temp_sensitivity * dT)


def mass_to_strain(sensor, mass: float) -> float:
    """Logarithmic load calibration: grams to microstrain."""
    if mass <= 0:
        raise PhysicsError(f"mass must be positive, got {mass}")
    lo, hi = CALIBRATION_RANGE_G
    if not lo <= mass <= hi:
        warnings.warn(f"mass {mass:g} g outside calibration range [{lo:g}, {hi:g}] g",
                      CalibrationRangeWarning, stacklevel=2)
    return sensor.calib_a * math.log(mass) + sensor.calib_b


def rest_mass(sensor) -> float:
    """Load at which the calibration curve crosses zero strain."""
    return math.exp(-sensor.calib_b / sensor.calib_a)


def load_to_strain(sensor, mass: float) -> float:
    """Sensor strain for any non-negative load.

    Below the zero-strain load of the log curve the grating is taken as
    unstrained; the curve's negative branch is never produced.
    """
    if mass <= rest_mass(sensor):
        return 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CalibrationRangeWarning)
        return mass_to_strain(sensor, mass)


# -- spectrum -------------------------------------------------------------

@dataclass(frozen=True)
class SpectrumFrame:
    wavelengths: np.ndarray = field(repr=False)
    amplitudes: np.ndarray = field(repr=False)
    timestamp: float = 0.0


@dataclass(frozen=True)
class SensorState:
    sensor_id: int
    true_load: float
    true_temp: float
    strain: float
    wavelength: float


def spectrum_grid(band=BAND_NM, bins: int = SPECTRUM_BINS, margin: float = SPECTRUM_MARGIN_NM) -> np.ndarray:
    return np.linspace(band[0] - margin, band[1] + margin, bins)


def synth_spectrum(layout: SensorLayout, states, grid=None, fwhm: float = PEAK_FWHM_NM,
                   snr_db: float | None = None, rng=None, include_reference: bool = True,
                   timestamp: float = 0.0) -> SpectrumFrame:
    """Sum of unit Gaussians at each reflected wavelength plus the reference marker."""
    if grid is None:
        grid = spectrum_grid(layout.band)
    grid = np.asarray(grid, dtype=float)
    centers = [s.wavelength for s in states]
    if include_reference:
        centers.append(layout.reference_peak)
    sigma = fwhm / (2.0 * math.sqrt(2.0 * math.log(2.0)))
    amp = np.zeros_like(grid)
    half = 12.0 * sigma
    for c in centers:
        lo, hi = np.searchsorted(grid, [c - half, c + half])
        seg = grid[lo:hi]
        amp[lo:hi] += np.exp(-0.5 * ((seg - c) / sigma) ** 2)
    if snr_db is not None:
        rng = rng if rng is not None else np.random.default_rng(0)
        noise_rms = 10.0 ** (-snr_db / 20.0)
        amp = amp + rng.normal(0.0, noise_rms, size=amp.shape)
    return SpectrumFrame(grid, amp, timestamp)


def sensor_states(layout: SensorLayout, loads: dict, temps: dict, t_cal: float,
                  strain_noise=None) -> list:
    """Per-sensor strain and reflected wavelength from load (g) and temperature (C).

    Temperature sensors are treated as unloaded.
    """
    states = []
    for s in layout.sensors:
        load = loads.get(s.id, 0.0) if s.is_pressure else 0.0
        temp = temps[s.id]
        eps = load_to_strain(s, load) if s.is_pressure else 0.0
        if strain_noise is not None and s.is_pressure:
            eps += strain_noise.get(s.id, 0.0)
        states.append(SensorState(s.id, load, temp, eps, bragg_wavelength(s, eps, temp - t_cal)))
    return states


# -- gait scenario --------------------------------------------------------

@dataclass(frozen=True)
class GaitScenario:
    body_mass: float = 70.0
    cadence: float = 1.0
    duration: float = 60.0
    sample_rate: float = 40.0
    ambient_temp: float = 25.0
    steady_foot_temp: float = 32.0
    warmup_time_constant: float = 900.0
    temp_spatial_amplitude: float = 1.0
    left_offsets: dict = field(default_factory=dict)
    right_offsets: dict = field(default_factory=dict)
    noise_rms: float = 0.0
    seated: bool = False

    def __post_init__(self):
        if not 1.0 <= self.sample_rate <= 100.0:
            raise PhysicsError(f"sample_rate {self.sample_rate} outside [1, 100] Hz")
        if self.duration < 0:
            raise PhysicsError("duration must be non-negative")
        if self.cadence <= 0:
            raise PhysicsError("cadence must be positive")
        if self.body_mass <= 0:
            raise PhysicsError("body_mass must be positive")

    @property
    def n_samples(self) -> int:
        return int(round(self.duration * self.sample_rate))

    def offsets(self, side: str) -> dict:
        return self.left_offsets if side == LEFT else self.right_offsets

    def phase(self, t: float, side: str = RIGHT) -> float:
        shift = 0.5 if side == LEFT else 0.0
        return (t * self.cadence + shift) % 1.0

    @classmethod
    def from_dict(cls, doc: dict) -> "GaitScenario":
        known = set(cls.__dataclass_fields__)
        unknown = set(doc) - known
        if unknown:
            raise PhysicsError(f"unknown scenario fields: {sorted(unknown)}")
        return cls(**doc)

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def _half_sine(phase: float, window) -> float:
    a, b = window
    if a <= phase <= b:
        return math.sin(math.pi * (phase - a) / (b - a))
    return 0.0


def stance_factor(phase: float) -> tuple[float, float]:
    """Heel and forefoot force as fractions of body weight."""
    return (LOBE_PEAK_BW * _half_sine(phase, HEEL_WINDOW),
            LOBE_PEAK_BW * _half_sine(phase, FOREFOOT_WINDOW))


def total_vgrf(scenario: GaitScenario, t: float, side: str = RIGHT) -> float:
    """Analytic whole-foot vertical load, grams-force."""
    if scenario.seated:
        return 0.0
    h, f = stance_factor(scenario.phase(t, side))
    return scenario.body_mass * 1000.0 * (h + f)


def phase_marks(scenario: GaitScenario, side: str = RIGHT) -> tuple[list, list]:
    """Heel-strike and toe-off times (s) within the scenario duration."""
    shift = 0.5 if side == LEFT else 0.0
    period = 1.0 / scenario.cadence
    strikes, offs = [], []
    k = 0
    while True:
        t0 = (k - shift) * period
        if t0 > scenario.duration + 1e-12:
            break
        if t0 >= -1e-12:
            strikes.append(t0)
        t1 = t0 + STANCE_END * period
        if 0 <= t1 <= scenario.duration + 1e-12:
            offs.append(t1)
        k += 1
    return strikes, offs


@dataclass(frozen=True)
class PlantarField:
    pressure: np.ndarray = field(repr=False)
    temperature: np.ndarray = field(repr=False)
    timestamp: float
    template: FootTemplate = field(repr=False)
    side: str = RIGHT


class GaitFieldSynth:
    """Dense plantar pressure and temperature fields for one foot."""

    def __init__(self, scenario: GaitScenario, template: FootTemplate | None = None, side: str = RIGHT):
        base = template if template is not None else FootTemplate()
        self.scenario = scenario
        self.side = side
        self.template = base.for_side(side)
        centers = self.template.cell_centers()
        self._x = centers[..., 0]
        self._y = centers[..., 1]
        if side == LEFT:
            self._yr = self.template.width - self._y
        else:
            self._yr = self._y
        mask = self.template.mask
        self._heel = self._kernel(HEEL_BLOB, mask)
        meta = self._kernel(METATARSAL_BLOB, mask)
        hallux = self._kernel(HALLUX_BLOB, mask)
        self._fore = (1.0 - FOREFOOT_TOE_SHARE) * meta + FOREFOOT_TOE_SHARE * hallux
        self._steady = self._steady_pattern()
        self._offset = self._offset_map(scenario.offsets(side))

    def _kernel(self, blob, mask) -> np.ndarray:
        (cx, cy), (sx, sy) = blob
        k = np.exp(-0.5 * (((self._x - cx) / sx) ** 2 + ((self._yr - cy) / sy) ** 2))
        k = np.where(mask, k, 0.0)
        # unit total force spread over the cells, N/mm^2 per N
        return k / (k.sum() * self.template.cell_area)

    def _steady_pattern(self) -> np.ndarray:
        sc = self.scenario
        bump = np.exp(-(((self._x - 170.0) / 80.0) ** 2)) - 0.5
        return sc.steady_foot_temp + sc.temp_spatial_amplitude * bump

    def _offset_map(self, offsets: dict) -> np.ndarray:
        out = np.zeros(self.template.shape)
        if not offsets:
            return out
        fx = self._x / self.template.length
        fy = self._y / self.template.width
        for name, delta in offsets.items():
            if name not in self.template.regions:
                raise PhysicsError(f"unknown region {name!r}")
            x0, x1, y0, y1 = self.template.regions[name]
            sel = (fx >= x0) & ((fx < x1) | (x1 >= 1.0)) & (fy >= y0) & ((fy < y1) | (y1 >= 1.0))
            out[sel] += delta
        return out

    def pressure_kpa(self, t: float) -> np.ndarray:
        sc = self.scenario
        if sc.seated:
            return np.zeros(self.template.shape)
        h, f = stance_factor(sc.phase(t, self.side))
        weight_n = sc.body_mass * G
        p = weight_n * (h * self._heel + f * self._fore) * 1000.0
        return np.minimum(p, MAX_PRESSURE_KPA)

    def temperature_c(self, t: float) -> np.ndarray:
        sc = self.scenario
        warm = 1.0 - math.exp(-t / sc.warmup_time_constant)
        return sc.ambient_temp + (self._steady - sc.ambient_temp) * warm + self._offset

    def field(self, t: float) -> PlantarField:
        if not 0.0 <= t <= self.scenario.duration + 1e-9:
            raise PhysicsError(f"t={t} outside [0, {self.scenario.duration}]")
        return PlantarField(self.pressure_kpa(t), self.temperature_c(t), t, self.template, self.side)


def synth_gait_field(scenario: GaitScenario, t: float, side: str = RIGHT,
                     template: FootTemplate | None = None) -> PlantarField:
    return GaitFieldSynth(scenario, template, side).field(t)


# -- sampling -------------------------------------------------------------

def pressure_to_force(pressure_kpa: float, area_mm2: float = FSR_ACTIVE_AREA_MM2) -> float:
    """Force (N) on an active area (mm^2) under a pressure (kPa)."""
    return pressure_kpa * 1000.0 * area_mm2 / 1e6


def force_to_pressure(force_n: float, area_mm2: float = FSR_ACTIVE_AREA_MM2) -> float:
    return force_n * 1e6 / area_mm2 / 1000.0


def newton_to_grams(force_n):
    return force_n / G * 1000.0


def kpa_to_grams(pressure_kpa, area_mm2: float = FSR_ACTIVE_AREA_MM2):
    return newton_to_grams(pressure_to_force(pressure_kpa, area_mm2))


def bilinear(grid: np.ndarray, template: FootTemplate, x: float, y: float) -> float:
    ox, oy = template.origin
    fi = (x - ox) / template.cell_size - 0.5
    fj = (y - oy) / template.cell_size - 0.5
    fi = min(max(fi, 0.0), template.nx - 1.0)
    fj = min(max(fj, 0.0), template.ny - 1.0)
    i0, j0 = min(int(fi), template.nx - 2), min(int(fj), template.ny - 2)
    di, dj = fi - i0, fj - j0
    return float((1 - di) * (1 - dj) * grid[i0, j0] + di * (1 - dj) * grid[i0 + 1, j0]
                 + (1 - di) * dj * grid[i0, j0 + 1] + di * dj * grid[i0 + 1, j0 + 1])


def sample_at_sensors(fld: PlantarField, layout: SensorLayout) -> dict:
    """``{sensor_id: (load_grams, temp_C)}`` read off a dense field."""
    out = {}
    tpl = fld.template
    for s in layout.sensors:
        x, y = s.position
        try:
            i, j = tpl.cell_of(x, y)
        except ValueError as exc:
            raise LayoutError(f"sensor {s.id}: {exc}") from None
        load = kpa_to_grams(float(fld.pressure[i, j]))
        out[s.id] = (load, bilinear(fld.temperature, tpl, x, y))
    return out


# -- electronic insole transducers ---------------------------------------

def fsr_output_voltage(r_fsr: float, r_ext: float, vcc: float) -> float:
    if r_fsr <= 0 or r_ext <= 0:
        raise PhysicsError("resistances must be positive")
    return vcc * r_ext / (r_ext + r_fsr)


def fsr_resistance(v_out: float, r_ext: float, vcc: float) -> float:
    if r_ext <= 0:
        raise PhysicsError("resistances must be positive")
    if not 0 < v_out <= vcc:
        raise PhysicsError(f"output voltage {v_out} outside (0, {vcc}]")
    return r_ext * (vcc - v_out) / v_out


def fsr_resistance_for_mass(mass_g: float) -> float:
    """Inverse law anchored at 10 kOhm under 100 g."""
    if mass_g <= 0:
        return math.inf
    return 10_000.0 * 100.0 / mass_g


def fsr_mass_for_resistance(r: float) -> float:
    if math.isinf(r):
        return 0.0
    return 10_000.0 * 100.0 / r


def thermistor_temperature(r: float, b: float = THERMISTOR_B, r0: float = THERMISTOR_R0,
                           t0: float = THERMISTOR_T0) -> float:
    """B-parameter NTC model, Kelvin."""
    if min(r, b, r0, t0) <= 0:
        raise PhysicsError("thermistor arguments must be positive")
    arg = r / (r0 * math.exp(-b / t0))
    if arg <= 1.0:
        raise PhysicsError(f"ln argument {arg:g} <= 1: temperature undefined")
    return b / math.log(arg)


def thermistor_resistance(t_kelvin: float, b: float = THERMISTOR_B, r0: float = THERMISTOR_R0,
                          t0: float = THERMISTOR_T0) -> float:
    return r0 * math.exp(-b / t0) * math.exp(b / t_kelvin)


def adc_to_temperature_literal(a: float, opt_in: bool = False) -> float:
    """Literal ADC-count temperature formula (degrees C) for a 10 kOhm divider.

    Returns physically implausible values over most of the ADC range; it is
    gated behind ``opt_in`` so that callers opt in knowingly.
    Use :func:`thermistor_temperature` for real conversions.
    """
    if not opt_in:
        raise PhysicsError("pass opt_in=True to use the literal ADC formula")
    if not 0 < a < 4095:
        raise PhysicsError(f"ADC count {a} outside (0, 4095)")
    return (math.log((40_950_000 - 10_000 * a) / a) - 3.10) / -0.048
