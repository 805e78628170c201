"""Run orchestration: configs, loopback roundtrip, comparisons and temperature sessions."""

from __future__ import annotations

import json
import math
import threading
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import physics as ph
from .chain import (GAIT, HARDWARE, SOFTWARE, TEMPERATURE_SESSION, ElectronicInsole, Interrogator,
                    session_readings, side_layout)
from .dsp import AsymmetryReport, FramePipeline, GaitRecord, asymmetry_analysis
from .gateway import (DEFAULT_HOST, DEFAULT_PORT, MAX_DATAGRAM, REORDER_WINDOW, ConfigError, GapReport,
                      TelemetryFrame, UdpReceiver, check_rate, decode_frame, emit_stream,
                      encode_frame, ingest_stream, nominal_t_ms)
from .layout import SensorLayout, build_default_layout
from .maps import (FORMATS, LEFT, PRESSURE, RIGHT, SIDES, TEMPERATURE, FootMap, FootTemplate,
                   export_map, interpolate_map, map_filename, pearson)

MODES = ("simulate", "serve", "process", "roundtrip", "compare", "validate-layout", "fit",
         "temperature")
DEFAULT_MAP_PHASES = (0.1, 0.2, 0.35, 0.45, 0.55)


class InputError(ValueError):
    """Missing or unusable input data."""


def _endpoint(value, default_port: int) -> tuple[str, int]:
    if isinstance(value, (list, tuple)):
        host, port = value
    else:
        text = str(value)
        host, _, port = text.rpartition(":")
        if not host:
            host, port = text, default_port
    try:
        port = int(port)
    except ValueError:
        raise ConfigError(f"bad port in endpoint {value!r}") from None
    if not 0 <= port <= 65535:
        raise ConfigError(f"port {port} out of range")
    return str(host), port


@dataclass
class RunConfig:
    mode: str = "roundtrip"
    scenario: ph.GaitScenario = field(default_factory=ph.GaitScenario)
    layout_path: str | None = None
    bind: tuple = (DEFAULT_HOST, 0)
    dest: tuple = (DEFAULT_HOST, DEFAULT_PORT)
    out: str = "out"
    seed: int = 0
    sides: tuple = SIDES
    compensation: str = SOFTWARE
    window: int = REORDER_WINDOW
    stamp: bool = False
    realtime: bool = False
    idle_timeout: float = 0.5
    map_phases: tuple = DEFAULT_MAP_PHASES
    map_formats: tuple = FORMATS
    temperature_rate: float = 1.0
    map_interval: float = 600.0

    def __post_init__(self):
        self.bind = _endpoint(self.bind, 0)
        self.dest = _endpoint(self.dest, DEFAULT_PORT)
        self.sides = tuple(self.sides)
        self.map_phases = tuple(self.map_phases)
        self.map_formats = tuple(self.map_formats)
        self.validate()

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be an integer in [0, 2**64)")
        if not self.sides or any(s not in SIDES for s in self.sides) or len(set(self.sides)) != len(self.sides):
            raise ConfigError(f"sides must be a non-empty subset of {SIDES}")
        if self.compensation not in (SOFTWARE, HARDWARE):
            raise ConfigError(f"compensation must be {SOFTWARE!r} or {HARDWARE!r}")
        if self.window < 1:
            raise ConfigError("reorder window must be at least 1")
        if any(not 0.0 <= p < 1.0 for p in self.map_phases):
            raise ConfigError("map phases must lie in [0, 1)")
        if any(f not in FORMATS for f in self.map_formats):
            raise ConfigError(f"map formats must be drawn from {FORMATS}")
        if self.temperature_rate <= 0 or self.map_interval <= 0:
            raise ConfigError("temperature rate and map interval must be positive")
        check_rate(self.scenario.sample_rate)

    @property
    def rate(self) -> float:
        return self.scenario.sample_rate

    def layout(self) -> SensorLayout:
        if self.layout_path is None:
            return build_default_layout()
        try:
            return SensorLayout.load(self.layout_path)
        except OSError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid layout file {self.layout_path}: {exc}") from None

    def rng(self, *stream: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, *stream])

    def output_dir(self) -> Path:
        out = Path(self.out)
        if self.stamp:
            out = out / time.strftime("run_%Y%m%dT%H%M%SZ", time.gmtime())
        return out

    @classmethod
    def from_dict(cls, doc: dict, **overrides) -> "RunConfig":
        doc = dict(doc)
        doc.update({k: v for k, v in overrides.items() if v is not None})
        known = set(cls.__dataclass_fields__)
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        scen = doc.get("scenario", {})
        try:
            if isinstance(scen, dict):
                doc["scenario"] = ph.GaitScenario.from_dict(scen)
            return cls(**doc)
        except (TypeError, ph.PhysicsError) as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def load(cls, path, **overrides) -> "RunConfig":
        try:
            with open(path) as fh:
                doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
        if not isinstance(doc, dict):
            raise ConfigError(f"{path}: top level must be an object")
        return cls.from_dict(doc, **overrides)

    def to_dict(self) -> dict:
        doc = {k: getattr(self, k) for k in self.__dataclass_fields__}
        doc["scenario"] = self.scenario.to_dict()
        doc["bind"] = list(self.bind)
        doc["dest"] = list(self.dest)
        for k in ("sides", "map_phases", "map_formats"):
            doc[k] = list(doc[k])
        return doc


# -- file output ----------------------------------------------------------

def _fmt(v: float) -> str:
    if not math.isfinite(v):
        return ""
    s = f"{v:.3f}"
    return "0.000" if s == "-0.000" else s


def _write_table(path: Path, header: list, t_ms, columns: np.ndarray) -> None:
    lines = [",".join(header)]
    for k, t in enumerate(t_ms):
        lines.append(",".join([str(int(t))] + [_fmt(float(v)) for v in columns[k]]))
    path.write_text("\n".join(lines) + "\n")


def write_pressure_csv(path: Path, rec: GaitRecord) -> None:
    header = ["t_ms"] + [f"sensor_{sid}" for sid in rec.sensor_ids] + ["combined"]
    cols = np.column_stack([rec.filtered, rec.combined]) if len(rec.t_ms) else np.zeros((0, 0))
    _write_table(path, header, rec.t_ms, cols)


def write_temperature_csv(path: Path, t_ms, ids, temps: np.ndarray) -> None:
    _write_table(path, ["t_ms"] + [f"sensor_{sid}" for sid in ids], t_ms, temps)


def write_json(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def write_maps(out: Path, maps, formats) -> list:
    out.mkdir(parents=True, exist_ok=True)
    names = []
    for m in maps:
        for fmt in formats:
            name = map_filename(m, fmt)
            (out / name).write_bytes(export_map(m, fmt))
            names.append(name)
    return names


# -- map construction -----------------------------------------------------

def pressure_samples(layout: SensorLayout, loads) -> list:
    return [(s.position, float(v)) for s, v in zip(layout.pressure_sensors, loads) if math.isfinite(v)]


def temperature_samples(layout: SensorLayout, temps) -> list:
    return [(s.position, float(v)) for s, v in zip(layout.temperature_sensors, temps) if math.isfinite(v)]


def record_maps(rec: GaitRecord, layout: SensorLayout, template: FootTemplate, side: str,
                phases=DEFAULT_MAP_PHASES) -> list:
    """Pressure maps at stance phases of the middle cycle, temperature maps at first and last frames."""
    maps = []
    if rec.cycles:
        cyc = rec.cycles[len(rec.cycles) // 2]
        span = cyc.next_heel_strike - cyc.heel_strike
        for phi in phases:
            k = cyc.heel_strike + int(round(phi * span))
            samples = pressure_samples(layout, rec.loads[k])
            if samples:
                maps.append(interpolate_map(samples, template, PRESSURE, side, rec.t_ms[k] / 1000.0))
    if len(rec.t_ms):
        for k in sorted({0, len(rec.t_ms) - 1}):
            samples = temperature_samples(layout, rec.temperatures[k])
            if samples:
                maps.append(interpolate_map(samples, template, TEMPERATURE, side, rec.t_ms[k] / 1000.0))
    return maps


# -- roundtrip ------------------------------------------------------------

@dataclass
class SideResult:
    side: str
    frames_sent: int
    record: GaitRecord
    gaps: GapReport
    maps: list

    def summary(self) -> dict:
        return {"frames_sent": self.frames_sent, "frames_processed": int(len(self.record.t_ms)),
                "cycles": len(self.record.cycles), "cadence_hz": round(self.record.cadence, 6),
                "gaps": self.gaps.to_dict()}


@dataclass
class RoundtripResult:
    out_dir: Path
    sides: dict

    def summary(self) -> dict:
        return {side: r.summary() for side, r in self.sides.items()}


def telemetry_source(cfg: RunConfig, layout: SensorLayout, side: str, session: str = GAIT,
                     scenario: ph.GaitScenario | None = None, rate: float | None = None):
    idx = SIDES.index(side)
    return (r for _, _, r in session_readings(scenario or cfg.scenario, layout, side, cfg.rng(idx),
                                              session, cfg.compensation, rate))


def loopback_stream(cfg: RunConfig, layout: SensorLayout, side: str) -> tuple[int, list]:
    """Emit one foot's telemetry over UDP from a worker thread; collect datagrams here."""
    host, port = cfg.bind
    bind = (host, port + SIDES.index(side) if port else 0)
    with UdpReceiver(bind) as rx:
        result: dict = {}

        def sender():
            try:
                result["sent"] = emit_stream(telemetry_source(cfg, layout, side), cfg.rate,
                                             rx.address, realtime=cfg.realtime)
            except BaseException as exc:  # surfaced in the caller
                result["error"] = exc
            finally:
                rx.stop.set()

        worker = threading.Thread(target=sender, name=f"emit-{side}", daemon=True)
        worker.start()
        buf = list(rx.datagrams(idle_timeout=cfg.idle_timeout))
        worker.join()
    if "error" in result:
        raise result["error"]
    return result["sent"], buf


def process_frames(frames, layout: SensorLayout, cfg: RunConfig) -> GaitRecord:
    pipe = FramePipeline(layout, cfg.rate, cfg.scenario.body_mass,
                         software_compensation=cfg.compensation == SOFTWARE)
    for f in frames:
        pipe.consume(f)
    return pipe.record()


def write_side_outputs(out: Path, side: str, rec: GaitRecord, gaps: GapReport, maps, cfg: RunConfig,
                       frames_sent: int | None = None) -> None:
    write_pressure_csv(out / f"{side}_pressure.csv", rec)
    write_temperature_csv(out / f"{side}_temperature.csv", rec.t_ms, rec.temperature_ids, rec.temperatures)
    write_json(out / f"{side}_gait.json", {
        "side": side, "frames_sent": frames_sent, "frames_processed": int(len(rec.t_ms)),
        "cadence_hz": rec.cadence,
        "cycles": [[c.heel_strike, c.toe_off, c.next_heel_strike] for c in rec.cycles],
        "gaps": gaps.to_dict()})
    write_maps(out / "maps", maps, cfg.map_formats)


def run_roundtrip(cfg: RunConfig) -> RoundtripResult:
    """Simulate, stream over loopback UDP, ingest, process and persist, one stream per foot."""
    base = cfg.layout()
    template = FootTemplate()
    out = cfg.output_dir()
    out.mkdir(parents=True, exist_ok=True)
    results = {}
    for side in cfg.sides:
        lay = side_layout(base, side)
        sent, datagrams = loopback_stream(cfg, base, side)
        frames, gaps = ingest_stream(datagrams, cfg.window)
        rec = process_frames(frames, lay, cfg)
        maps = record_maps(rec, lay, template.for_side(side), side, cfg.map_phases)
        write_side_outputs(out, side, rec, gaps, maps, cfg, sent)
        results[side] = SideResult(side, sent, rec, gaps, maps)
    res = RoundtripResult(out, results)
    write_json(out / "summary.json", {"config": cfg.to_dict(), "sides": res.summary()})
    return res


# -- simulate / serve / process as separate steps -------------------------

def simulate(cfg: RunConfig) -> Path:
    """Write encoded telemetry (one datagram per line) plus ground-truth sensor loads per foot."""
    base = cfg.layout()
    out = cfg.output_dir()
    out.mkdir(parents=True, exist_ok=True)
    for side in cfg.sides:
        lay = side_layout(base, side)
        ids = [s.id for s in lay.sensors]
        truth_rows = []
        with open(out / f"{side}.fbgx", "wb") as fh:
            src = session_readings(cfg.scenario, base, side, cfg.rng(SIDES.index(side)), GAIT,
                                   cfg.compensation)
            for seq, (t, fld, readings) in enumerate(src):
                fh.write(encode_frame(TelemetryFrame(seq, nominal_t_ms(seq, cfg.rate), tuple(readings))))
                sampled = ph.sample_at_sensors(fld, lay)
                row = [sampled[i][0] if lay.sensor(i).is_pressure else sampled[i][1] for i in ids]
                truth_rows.append(row + [ph.total_vgrf(cfg.scenario, t, side)])
        n = len(truth_rows)
        header = ["t_ms"] + [f"sensor_{i}" for i in ids] + ["total_vgrf"]
        _write_table(out / f"{side}_truth.csv", header, [nominal_t_ms(k, cfg.rate) for k in range(n)],
                     np.array(truth_rows, dtype=float).reshape(n, len(ids) + 1))
    write_json(out / "simulate.json", {"config": cfg.to_dict()})
    return out


def read_telemetry_file(path) -> list:
    data = Path(path).read_bytes()
    return [line + b"\n" for line in data.split(b"\n") if line]


def serve(cfg: RunConfig, side: str = RIGHT) -> int:
    return emit_stream(telemetry_source(cfg, cfg.layout(), side), cfg.rate, cfg.dest,
                       realtime=cfg.realtime)


def first_then_idle(rx: UdpReceiver, idle_timeout: float, max_wait: float | None = None) -> list:
    """Block for the first datagram (up to ``max_wait``), then read until the stream idles."""
    rx.sock.settimeout(max_wait)
    try:
        first, _ = rx.sock.recvfrom(MAX_DATAGRAM)
    except TimeoutError:
        return []
    rx.stop.set()
    return [first] + list(rx.datagrams(idle_timeout=idle_timeout))


def process(cfg: RunConfig, side: str = RIGHT, input_path=None, max_wait: float | None = None) -> SideResult:
    """Ingest a telemetry file, or listen on ``cfg.bind`` until the stream goes idle."""
    base = cfg.layout()
    lay = side_layout(base, side)
    if input_path is not None:
        datagrams = read_telemetry_file(input_path)
    else:
        with UdpReceiver(cfg.bind) as rx:
            datagrams = first_then_idle(rx, cfg.idle_timeout, max_wait)
    frames, gaps = ingest_stream(datagrams, cfg.window)
    rec = process_frames(frames, lay, cfg)
    maps = record_maps(rec, lay, FootTemplate().for_side(side), side, cfg.map_phases)
    out = cfg.output_dir()
    out.mkdir(parents=True, exist_ok=True)
    write_side_outputs(out, side, rec, gaps, maps, cfg)
    return SideResult(side, len(datagrams), rec, gaps, maps)


# -- comparison against dense truth ---------------------------------------

SYSTEMS = ("FBG-20", "Electronic-24", "DenseTruth")


@dataclass
class FrameScore:
    system: str
    t: float
    kind: str
    rmse: float = math.nan
    r: float = math.nan
    mae: float = math.nan


@dataclass
class ComparisonReport:
    frames: list

    def rows(self) -> dict:
        out = {}
        for sys_name in SYSTEMS:
            fs = [f for f in self.frames if f.system == sys_name]
            p = [f for f in fs if f.kind == PRESSURE]
            t = [f for f in fs if f.kind == TEMPERATURE]
            out[sys_name] = {
                "pressure_rmse_gf": float(np.mean([f.rmse for f in p])) if p else math.nan,
                "pressure_r": float(np.mean([f.r for f in p])) if p else math.nan,
                "temperature_mae_c": float(np.mean([f.mae for f in t])) if t else math.nan,
                "sensors": {"FBG-20": 20, "Electronic-24": 24, "DenseTruth": None}[sys_name],
            }
        return out

    def to_dict(self) -> dict:
        return {"systems": self.rows(),
                "frames": [f.__dict__ for f in self.frames]}

    def to_csv(self) -> str:
        lines = ["system,kind,t_s,rmse,r,mae"]
        for f in self.frames:
            lines.append(f"{f.system},{f.kind},{f.t:.3f},{_fmt(f.rmse)},{_fmt(f.r)},{_fmt(f.mae)}")
        return "\n".join(lines) + "\n"


def score_pressure(m: FootMap, truth: np.ndarray) -> tuple[float, float]:
    ok = m.template.mask & np.isfinite(m.values) & np.isfinite(truth)
    if not ok.any():
        return math.nan, math.nan
    d = m.values[ok] - truth[ok]
    return float(np.sqrt(np.mean(d * d))), pearson(m.values[ok], truth[ok])


def score_temperature(m: FootMap, truth: np.ndarray) -> float:
    ok = m.template.mask & np.isfinite(m.values)
    return float(np.mean(np.abs(m.values[ok] - truth[ok])))


def compare_times(scenario: ph.GaitScenario, side: str, phases) -> list:
    """Times at the given stance phases of the middle full cycle inside the scenario."""
    period = 1.0 / scenario.cadence
    shift = scenario.phase(0.0, side)
    cycles = int(math.floor((scenario.duration + shift * period) / period + 1e-9))
    k = max(cycles // 2, 1) if cycles else 0
    times = [(k + phi - shift) * period for phi in phases]
    return [t for t in times if 0.0 <= t <= scenario.duration]


def run_compare(cfg: RunConfig, write: bool = True) -> ComparisonReport:
    """Score the FBG and electronic reconstructions against the dense synthetic field."""
    base = cfg.layout()
    template = FootTemplate()
    frames: list = []
    for side in cfg.sides:
        idx = SIDES.index(side)
        lay = side_layout(base, side)
        synth = ph.GaitFieldSynth(cfg.scenario, template, side)
        inter = Interrogator(lay, compensation=cfg.compensation)
        elec = ElectronicInsole().for_side(side, template.width)
        rng = cfg.rng(idx)
        tpl = synth.template
        p_times = [] if cfg.scenario.seated else compare_times(cfg.scenario, side, cfg.map_phases)
        t_times = [cfg.scenario.duration]
        if not p_times and not t_times:
            raise InputError("scenario holds no frame to score")
        ref = synth.field(0.0)

        def fbg_record(fld):
            pipe = FramePipeline(lay, cfg.rate, cfg.scenario.body_mass,
                                 software_compensation=cfg.compensation == SOFTWARE)
            for k, f in enumerate((ref, fld)):
                sampled = ph.sample_at_sensors(f, lay)
                noise = None
                if cfg.scenario.noise_rms > 0:
                    noise = {s.id: rng.normal(0.0, cfg.scenario.noise_rms) for s in lay.pressure_sensors}
                readings = inter.measure({i: v[0] for i, v in sampled.items()},
                                         {i: v[1] for i, v in sampled.items()}, noise)
                pipe.consume(decode_frame(encode_frame(TelemetryFrame(k, k, tuple(readings)))))
            return pipe.record()

        for t in p_times:
            fld = synth.field(t)
            truth = np.where(tpl.mask, ph.kpa_to_grams(fld.pressure), np.nan)
            rec = fbg_record(fld)
            fbg = interpolate_map(pressure_samples(lay, rec.loads[-1]), tpl, PRESSURE, side, t)
            loads, _ = elec.measure(fld)
            em = interpolate_map(loads, tpl, PRESSURE, side, t)
            dense = FootMap(truth, PRESSURE, tpl, side, t)
            for name, m in zip(SYSTEMS, (fbg, em, dense)):
                rmse, r = score_pressure(m, truth)
                frames.append(FrameScore(name, t, PRESSURE, rmse=rmse, r=r))
        for t in t_times:
            fld = synth.field(t)
            truth = np.where(tpl.mask, fld.temperature, np.nan)
            rec = fbg_record(fld)
            fbg = interpolate_map(temperature_samples(lay, rec.temperatures[-1]), tpl, TEMPERATURE, side, t)
            _, temps = elec.measure(fld)
            em = interpolate_map(temps, tpl, TEMPERATURE, side, t)
            dense = FootMap(truth, TEMPERATURE, tpl, side, t)
            for name, m in zip(SYSTEMS, (fbg, em, dense)):
                frames.append(FrameScore(name, t, TEMPERATURE, mae=score_temperature(m, truth)))
    report = ComparisonReport(frames)
    if write:
        out = cfg.output_dir()
        out.mkdir(parents=True, exist_ok=True)
        write_json(out / "comparison.json", report.to_dict())
        (out / "comparison.csv").write_text(report.to_csv())
    return report


# -- seated temperature session -------------------------------------------

@dataclass
class TemperatureSession:
    maps: dict                       # side -> [FootMap, ...] in time order
    asymmetry: list                  # [(t, AsymmetryReport), ...]
    readings: dict = field(default_factory=dict)   # side -> (t_ms, temps)

    def to_dict(self) -> dict:
        return {"asymmetry": [{"t_s": t, **rep.to_dict()} for t, rep in self.asymmetry],
                "maps": {s: [map_filename(m, "csv") for m in ms] for s, ms in self.maps.items()}}


def export_times(duration: float, interval: float) -> list:
    n = int(math.floor(duration / interval + 1e-9))
    times = [k * interval for k in range(n + 1)]
    if duration - times[-1] > 1e-9:
        times.append(duration)
    return times


def run_temperature_session(cfg: RunConfig, write: bool = True) -> TemperatureSession:
    """Seated session: pressure channels off, temperature maps at fixed intervals, left-right check."""
    scenario = replace(cfg.scenario, seated=True)
    base = cfg.layout()
    template = FootTemplate()
    rate = cfg.temperature_rate
    wanted = {nominal_t_ms(int(round(t * rate)), rate) for t in export_times(scenario.duration, cfg.map_interval)}
    maps: dict = {}
    logs: dict = {}
    for side in cfg.sides:
        lay = side_layout(base, side)
        tids = [s.id for s in lay.temperature_sensors]
        sc_n = int(round(scenario.duration * rate)) + 1
        rows_t, rows = [], []
        side_maps = []
        # include the final instant so the last export time is covered
        tail = replace(scenario, duration=scenario.duration + 1.0 / rate)
        src = telemetry_source(cfg, base, side, TEMPERATURE_SESSION, tail, rate)
        for seq, readings in zip(range(sc_n), src):
            frame = decode_frame(encode_frame(TelemetryFrame(seq, nominal_t_ms(seq, rate), tuple(readings))))
            by_id = {r.sensor_id: r.value for r in frame.readings if r.mode == "T"}
            temps = [by_id.get(i, math.nan) for i in tids]
            rows_t.append(frame.t_ms)
            rows.append(temps)
            if frame.t_ms in wanted:
                side_maps.append(interpolate_map(temperature_samples(lay, temps), template.for_side(side),
                                                 TEMPERATURE, side, frame.t_ms / 1000.0))
        maps[side] = side_maps
        logs[side] = (np.array(rows_t, dtype=np.int64), np.array(rows, dtype=float).reshape(-1, len(tids)))
    asym = []
    if LEFT in maps and RIGHT in maps:
        for lm, rm in zip(maps[LEFT], maps[RIGHT]):
            asym.append((lm.timestamp, asymmetry_analysis(lm, rm)))
    session = TemperatureSession(maps, asym, logs)
    if write:
        out = cfg.output_dir()
        out.mkdir(parents=True, exist_ok=True)
        for side in cfg.sides:
            ids = [s.id for s in side_layout(base, side).temperature_sensors]
            write_temperature_csv(out / f"{side}_temperature.csv", logs[side][0], ids, logs[side][1])
            write_maps(out / "maps", maps[side], cfg.map_formats)
        write_json(out / "temperature_session.json", session.to_dict())
    return session


def flagged(session: TemperatureSession) -> bool:
    return any(rep.flagged for _, rep in session.asymmetry)


__all__ = [
    "RunConfig", "InputError", "run_roundtrip", "run_compare", "run_temperature_session",
    "simulate", "serve", "process", "ComparisonReport", "TemperatureSession", "AsymmetryReport",
]
