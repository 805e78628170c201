"""Walk both feet through the full chain over loopback UDP and summarise the gait record."""

import argparse

import numpy as np

from fbginsole import physics as ph
from fbginsole.harness import RunConfig, run_roundtrip


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--duration", type=float, default=60.0)
    ap.add_argument("--mass", type=float, default=70.0)
    ap.add_argument("--cadence", type=float, default=1.0)
    ap.add_argument("--noise", type=float, default=0.0, help="strain noise RMS, microstrain")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="out/gait")
    ap.add_argument("--plot", action="store_true", help="save combined vGRF plots (needs matplotlib)")
    args = ap.parse_args()

    sc = ph.GaitScenario(body_mass=args.mass, cadence=args.cadence, duration=args.duration, noise_rms=args.noise)
    res = run_roundtrip(RunConfig(scenario=sc, out=args.out, seed=args.seed))
    for side, r in res.sides.items():
        rec = r.record
        peak = rec.combined.max() / (sc.body_mass * 1000.0) if len(rec.combined) else 0.0
        stance = [(c.toe_off - c.heel_strike) / sc.sample_rate for c in rec.cycles]
        print(f"{side:>5}: {len(rec.t_ms)} frames, {len(rec.cycles)} cycles, cadence {rec.cadence:.3f} Hz, "
              f"stance {np.mean(stance) if stance else float('nan'):.3f} s, peak combined {peak:.2f} BW, "
              f"gaps {r.gaps.to_dict()['missing']}")

    if args.plot:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
        fig, axes = plt.subplots(len(res.sides), 1, sharex=True, figsize=(9, 5))
        for ax, (side, r) in zip(np.atleast_1d(axes), res.sides.items()):
            t = r.record.t_ms / 1000.0
            ax.plot(t, r.record.combined / 1000.0, lw=1)
            for c in r.record.cycles:
                ax.axvline(t[c.heel_strike], color="g", lw=0.5)
                ax.axvline(t[c.toe_off], color="r", lw=0.5)
            ax.set_ylabel(f"{side} vGRF (kgf)")
            ax.set_xlim(0, min(5.0, sc.duration))
        fig.savefig(f"{args.out}/combined_vgrf.png", dpi=120)
        print(f"wrote {args.out}/combined_vgrf.png")


if __name__ == "__main__":
    main()
