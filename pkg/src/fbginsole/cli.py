"""Command-line entry point.

Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 protocol error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from . import physics as ph
from .dsp import DspError, fit_calibration
from .gateway import ConfigError, ParseError
from .harness import (InputError, RunConfig, process, run_compare, run_roundtrip,
                      run_temperature_session, serve, simulate, write_json)
from .layout import LayoutError, SensorLayout, build_default_layout, check_spectral_headroom, validate_layout
from .maps import SIDES

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_PROTOCOL = 4

log = logging.getLogger("fbginsole")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON run configuration; flags override its fields")
    p.add_argument("--layout", help="sensor layout JSON (default: built-in 20-grating layout)")
    p.add_argument("--out", help="output directory (default: out)")
    p.add_argument("--seed", type=int, help="64-bit seed; fixes every random draw")
    p.add_argument("--stamp", action="store_true", default=None,
                   help="write into a UTC-timestamped subdirectory of --out")
    p.add_argument("--duration", type=float, help="scenario duration, s")
    p.add_argument("--rate", type=float, help="sample and frame rate, Hz (1..100)")
    p.add_argument("--body-mass", type=float, help="subject mass, kg")
    p.add_argument("--cadence", type=float, help="strides per second")
    p.add_argument("--noise", type=float, help="strain noise RMS, microstrain")
    p.add_argument("--sides", nargs="+", choices=SIDES, help="feet to run (default: both)")
    p.add_argument("--compensation", choices=("software", "hardware"),
                   help="where thermal strain is removed (default: software)")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fbginsole", description="FBG smart-insole acquisition chain.")
    sub = parser.add_subparsers(dest="mode", required=True)

    p = sub.add_parser("simulate", help="write encoded telemetry and ground truth to files")
    _common(p)

    p = sub.add_parser("serve", help="stream simulated telemetry over UDP")
    _common(p)
    p.add_argument("--dest", help="host:port to send to (default 127.0.0.1:9750)")
    p.add_argument("--side", choices=SIDES, default="right")
    p.add_argument("--fast", action="store_true", help="send as fast as possible instead of in real time")

    p = sub.add_parser("process", help="ingest telemetry from UDP or a file and write logs and maps")
    _common(p)
    p.add_argument("--bind", help="host:port to listen on (default 127.0.0.1:9750)")
    p.add_argument("--input", help="telemetry file written by 'simulate' instead of a socket")
    p.add_argument("--side", choices=SIDES, default="right")
    p.add_argument("--max-wait", type=float, default=None, help="give up if nothing arrives within this many s")
    p.add_argument("--idle", type=float, help="stop after the stream is silent this long, s")

    p = sub.add_parser("roundtrip", help="simulate, stream over loopback UDP, process and persist")
    _common(p)
    p.add_argument("--bind", help="host:port for the receivers; port 0 picks free ports")

    p = sub.add_parser("compare", help="score FBG and electronic reconstructions against dense truth")
    _common(p)

    p = sub.add_parser("temperature", help="seated temperature session with left/right asymmetry check")
    _common(p)
    p.add_argument("--interval", type=float, help="map export interval, s")
    p.add_argument("--temperature-rate", type=float, help="frame rate of the session, Hz")
    p.add_argument("--offset", action="append", default=[], metavar="SIDE:REGION:DELTA",
                   help="regional temperature offset, e.g. left:medial_heel:3")

    p = sub.add_parser("validate-layout", help="check layout geometry and spectral headroom")
    p.add_argument("--layout", help="layout JSON (default: built-in)")
    p.add_argument("--write-default", metavar="PATH", help="save the built-in layout as JSON and exit")
    p.add_argument("--out", help="write the validation report JSON here")

    p = sub.add_parser("fit", help="least-squares calibration fit from a two-column CSV (mass_g, strain)")
    p.add_argument("input", help="CSV with mass and strain columns; a non-numeric header row is skipped")
    p.add_argument("--model", choices=("log", "linear"), default="log")
    p.add_argument("--out", help="write the fit JSON here")
    return parser


def _scenario_overrides(args) -> dict:
    names = {"duration": "duration", "rate": "sample_rate", "body_mass": "body_mass",
             "cadence": "cadence", "noise": "noise_rms"}
    return {dst: getattr(args, src) for src, dst in names.items() if getattr(args, src, None) is not None}


def _offsets(specs) -> dict:
    out: dict = {"left_offsets": {}, "right_offsets": {}}
    for spec in specs:
        try:
            side, region, delta = spec.split(":")
            out[f"{side}_offsets"][region] = float(delta)
        except (ValueError, KeyError):
            raise ConfigError(f"bad --offset {spec!r}; expected SIDE:REGION:DELTA") from None
    return {k: v for k, v in out.items() if v}


def make_config(args) -> RunConfig:
    doc: dict = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{args.config}: {exc}") from None
        if not isinstance(doc, dict):
            raise ConfigError(f"{args.config}: top level must be an object")
    scen = dict(doc.get("scenario", {}))
    scen.update(_scenario_overrides(args))
    scen.update(_offsets(getattr(args, "offset", [])))
    doc["scenario"] = scen
    doc["mode"] = args.mode
    return RunConfig.from_dict(
        doc, layout_path=args.layout, out=args.out, seed=args.seed, stamp=args.stamp,
        sides=getattr(args, "sides", None), compensation=getattr(args, "compensation", None),
        bind=getattr(args, "bind", None), dest=getattr(args, "dest", None),
        idle_timeout=getattr(args, "idle", None), map_interval=getattr(args, "interval", None),
        temperature_rate=getattr(args, "temperature_rate", None))


def _validate_layout(args) -> int:
    if args.write_default:
        build_default_layout().save(args.write_default)
        print(f"wrote {args.write_default}")
        return EXIT_OK
    layout = SensorLayout.load(args.layout) if args.layout else build_default_layout()
    report = validate_layout(layout)
    head = check_spectral_headroom(layout.spectral_plan(), layout)
    doc = {"validation": report.to_dict(),
           "headroom": {"guard_band_nm": head.guard_band, "worst_excursion_nm": head.worst_excursion,
                        "collisions": [list(c) for c in head.collisions]}}
    if args.out:
        write_json(Path(args.out), doc)
    print(json.dumps(doc, indent=2, sort_keys=True))
    return EXIT_OK if report.ok and not head.collisions else EXIT_CONFIG


def _fit(args) -> int:
    pts = []
    with open(args.input, newline="") as fh:
        for row in csv.reader(fh):
            if not row:
                continue
            try:
                pts.append((float(row[0]), float(row[1])))
            except (ValueError, IndexError):
                if pts:
                    raise ConfigError(f"{args.input}: malformed row {row!r}") from None
    fit = fit_calibration(pts, args.model)
    if args.out:
        write_json(Path(args.out), fit.to_dict())
    print(json.dumps(fit.to_dict(), indent=2))
    return EXIT_OK


def run(args) -> int:
    if args.mode == "validate-layout":
        return _validate_layout(args)
    if args.mode == "fit":
        return _fit(args)
    cfg = make_config(args)
    if args.mode == "simulate":
        print(f"wrote {simulate(cfg)}")
    elif args.mode == "serve":
        cfg.realtime = not args.fast
        print(f"sent {serve(cfg, args.side)} frames to {cfg.dest[0]}:{cfg.dest[1]}")
    elif args.mode == "process":
        res = process(cfg, args.side, args.input, args.max_wait)
        print(json.dumps(res.summary(), indent=2, sort_keys=True))
        if res.gaps.parse_errors and not res.gaps.delivered:
            return EXIT_PROTOCOL
    elif args.mode == "roundtrip":
        res = run_roundtrip(cfg)
        print(json.dumps(res.summary(), indent=2, sort_keys=True))
    elif args.mode == "compare":
        print(json.dumps(run_compare(cfg).rows(), indent=2, sort_keys=True))
    elif args.mode == "temperature":
        session = run_temperature_session(cfg)
        print(json.dumps(session.to_dict()["asymmetry"], indent=2, sort_keys=True))
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return run(args)
    except ParseError as exc:
        print(f"protocol error: {exc}", file=sys.stderr)
        return EXIT_PROTOCOL
    except (ConfigError, LayoutError, ph.PhysicsError, DspError, InputError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
