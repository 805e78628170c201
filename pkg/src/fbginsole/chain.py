"""Acquisition chains: emulated FBG interrogator and the electronic reference insole."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import physics as ph
from .dsp import assign_peaks, detect_peaks, wavelength_to_strain, wavelength_to_temperature
from .gateway import Reading
from .layout import CROSS_SENSITIVITY_UE_PER_C, SensorLayout
from .maps import LEFT, RIGHT, FootTemplate

T_CAL = 25.0

GAIT = "gait"
TEMPERATURE_SESSION = "temperature"
SOFTWARE = "software"
HARDWARE = "hardware"


class Interrogator:
    """Spectrum-level emulation: synthesise the reflection, detect peaks, report per-sensor values.

    ``compensation='hardware'`` subtracts the thermal strain on board and
    reports temperature gratings as compensation channels (NaN); ``'software'``
    reports them in temperature mode and leaves compensation downstream.
    """

    def __init__(self, layout: SensorLayout, t_cal: float = T_CAL, snr_db: float | None = None,
                 rng=None, compensation: str = SOFTWARE):
        if compensation not in (SOFTWARE, HARDWARE):
            raise ValueError(f"unknown compensation mode {compensation!r}")
        self.layout = layout
        self.plan = layout.spectral_plan()
        self.grid = ph.spectrum_grid(layout.band)
        self.t_cal = t_cal
        self.snr_db = snr_db
        self.rng = rng
        self.compensation = compensation
        self._nearest = {s.id: layout.nearest_temperature_sensor(s.id) for s in layout.pressure_sensors}

    def wavelengths(self, loads: dict, temps: dict, strain_noise=None) -> dict:
        states = ph.sensor_states(self.layout, loads, temps, self.t_cal, strain_noise)
        frame = ph.synth_spectrum(self.layout, states, self.grid, snr_db=self.snr_db, rng=self.rng)
        peaks = detect_peaks(frame, self.plan)
        return assign_peaks(peaks, self.plan).wavelengths

    def measure(self, loads: dict, temps: dict, strain_noise=None, session: str = GAIT) -> list:
        lams = self.wavelengths(loads, temps, strain_noise)
        temp_c = {}
        for s in self.layout.temperature_sensors:
            if s.id in lams:
                temp_c[s.id] = wavelength_to_temperature(s, lams[s.id], self.t_cal)
        readings = []
        for s in self.layout.sensors:
            if s.id not in lams:
                continue
            if s.is_pressure:
                if session == TEMPERATURE_SESSION:
                    readings.append(Reading(s.id, "C", math.nan))
                    continue
                strain = wavelength_to_strain(s, lams[s.id])
                if self.compensation == HARDWARE:
                    ref = self._nearest[s.id]
                    if ref in temp_c:
                        strain -= CROSS_SENSITIVITY_UE_PER_C * (temp_c[ref] - self.t_cal)
                readings.append(Reading(s.id, "S", round(strain, 3)))
            elif session == GAIT and self.compensation == HARDWARE:
                readings.append(Reading(s.id, "C", math.nan))
            else:
                readings.append(Reading(s.id, "T", round(temp_c[s.id], 3)))
        return readings


def side_layout(layout: SensorLayout, side: str) -> SensorLayout:
    return layout.mirrored() if side == LEFT else layout


def session_readings(scenario: ph.GaitScenario, layout: SensorLayout, side: str = RIGHT,
                     rng=None, session: str = GAIT, compensation: str = SOFTWARE,
                     rate: float | None = None, template: FootTemplate | None = None):
    """Yield ``(t, field, readings)`` at the scenario sample rate for one foot."""
    lay = side_layout(layout, side)
    synth = ph.GaitFieldSynth(scenario, template, side)
    inter = Interrogator(lay, compensation=compensation)
    rate = scenario.sample_rate if rate is None else rate
    n = int(round(scenario.duration * rate))
    pressure_ids = [s.id for s in lay.pressure_sensors]
    for k in range(n):
        t = k / rate
        fld = synth.field(t)
        sampled = ph.sample_at_sensors(fld, lay)
        loads = {sid: v[0] for sid, v in sampled.items()}
        temps = {sid: v[1] for sid, v in sampled.items()}
        noise = None
        if rng is not None and scenario.noise_rms > 0:
            noise = dict(zip(pressure_ids, rng.normal(0.0, scenario.noise_rms, len(pressure_ids))))
        yield t, fld, inter.measure(loads, temps, noise, session)


# -- electronic reference insole -----------------------------------------

ELECTRONIC_FSR = (
    (25.0, 44.0), (45.0, 30.0), (45.0, 58.0), (65.0, 44.0),
    (110.0, 25.0), (110.0, 60.0), (140.0, 44.0),
    (170.0, 20.0), (175.0, 44.0), (180.0, 68.0), (200.0, 30.0), (200.0, 60.0),
    (225.0, 25.0), (228.0, 45.0), (222.0, 68.0), (240.0, 58.0),
)
ELECTRONIC_THERMISTORS = (
    (30.0, 44.0), (60.0, 25.0), (110.0, 44.0), (165.0, 25.0),
    (165.0, 65.0), (195.0, 44.0), (225.0, 65.0), (230.0, 30.0),
)


@dataclass(frozen=True)
class ElectronicInsole:
    """16 force-sensitive resistors and 8 NTC thermistors behind 12-bit ADCs."""

    fsr_positions: tuple = ELECTRONIC_FSR
    thermistor_positions: tuple = ELECTRONIC_THERMISTORS
    vcc: float = 3.3
    r_ext_fsr: float = 1000.0
    r_ext_thermistor: float = 10_000.0
    adc_full_scale: int = 4095

    def for_side(self, side: str, width: float = 88.0) -> "ElectronicInsole":
        if side == RIGHT:
            return self
        flip = lambda pts: tuple((x, width - y) for x, y in pts)
        return ElectronicInsole(flip(self.fsr_positions), flip(self.thermistor_positions),
                                self.vcc, self.r_ext_fsr, self.r_ext_thermistor, self.adc_full_scale)

    def _adc(self, v: float) -> int:
        return int(min(max(round(v / self.vcc * self.adc_full_scale), 0), self.adc_full_scale))

    def _volts(self, counts: int) -> float:
        return counts / self.adc_full_scale * self.vcc

    def read_load(self, mass_g: float) -> float:
        r = ph.fsr_resistance_for_mass(mass_g)
        v = 0.0 if math.isinf(r) else ph.fsr_output_voltage(r, self.r_ext_fsr, self.vcc)
        counts = self._adc(v)
        if counts == 0:
            return 0.0
        if counts >= self.adc_full_scale:
            counts = self.adc_full_scale - 1
        r_meas = ph.fsr_resistance(self._volts(counts), self.r_ext_fsr, self.vcc)
        return ph.fsr_mass_for_resistance(r_meas)

    def read_temperature(self, temp_c: float) -> float:
        r = ph.thermistor_resistance(temp_c + ph.KELVIN)
        counts = self._adc(ph.fsr_output_voltage(r, self.r_ext_thermistor, self.vcc))
        counts = min(max(counts, 1), self.adc_full_scale - 1)
        r_meas = ph.fsr_resistance(self._volts(counts), self.r_ext_thermistor, self.vcc)
        return ph.thermistor_temperature(r_meas) - ph.KELVIN

    def measure(self, fld: ph.PlantarField) -> tuple[list, list]:
        """Pressure and temperature samples as ``[((x, y), value), ...]``."""
        tpl = fld.template
        loads = []
        for x, y in self.fsr_positions:
            i, j = tpl.cell_of(x, y)
            loads.append(((x, y), self.read_load(ph.kpa_to_grams(float(fld.pressure[i, j])))))
        temps = [((x, y), self.read_temperature(ph.bilinear(fld.temperature, tpl, x, y)))
                 for x, y in self.thermistor_positions]
        return loads, temps


def electronic_in_outline(insole: ElectronicInsole, layout: SensorLayout) -> np.ndarray:
    pts = list(insole.fsr_positions) + list(insole.thermistor_positions)
    return layout.template.contains(pts)
