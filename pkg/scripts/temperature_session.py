"""Seated warm-up session with an optional hot spot on one foot; prints the left-right check over time."""

import argparse

from fbginsole import physics as ph
from fbginsole.harness import RunConfig, run_temperature_session


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--duration", type=float, default=3600.0)
    ap.add_argument("--interval", type=float, default=600.0)
    ap.add_argument("--hot-heel", type=float, default=3.0, help="left heel offset, C (0 for a healthy subject)")
    ap.add_argument("--out", default="out/temperature")
    args = ap.parse_args()

    offsets = {"medial_heel": args.hot_heel, "lateral_heel": args.hot_heel} if args.hot_heel else {}
    sc = ph.GaitScenario(duration=args.duration, left_offsets=offsets, seated=True)
    s = run_temperature_session(RunConfig(scenario=sc, out=args.out, map_interval=args.interval))
    for (t, rep), lm, rm in zip(s.asymmetry, s.maps["left"], s.maps["right"]):
        worst = max(rep.deltas.items(), key=lambda kv: abs(kv[1]))
        print(f"t={t:7.0f} s  left mean {lm.masked_values.mean():6.2f} C  right mean {rm.masked_values.mean():6.2f} C  "
              f"largest delta {worst[0]} {worst[1]:+.2f} C  flagged {list(rep.flagged) or '-'}")


if __name__ == "__main__":
    main()
