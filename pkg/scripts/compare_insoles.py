"""Score FBG and electronic reconstructions against the dense field over several seeded scenarios."""

import argparse

import numpy as np

from fbginsole import physics as ph
from fbginsole.harness import SYSTEMS, RunConfig, run_compare


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scenarios", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="out/compare")
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    rows = {k: [] for k in SYSTEMS}
    for i in range(args.scenarios):
        sc = ph.GaitScenario(body_mass=float(rng.uniform(50, 100)), duration=float(rng.uniform(300, 1800)),
                             ambient_temp=float(rng.uniform(18, 28)), steady_foot_temp=float(rng.uniform(29, 34)),
                             temp_spatial_amplitude=float(rng.uniform(0, 2)), noise_rms=0.5)
        rep = run_compare(RunConfig(scenario=sc, seed=args.seed + i, out=f"{args.out}/s{i:02d}"))
        for k, v in rep.rows().items():
            rows[k].append(v)

    print(f"{'system':<14}{'pressure RMSE (gf)':>20}{'pressure r':>12}{'temp MAE (C)':>14}")
    for k, vs in rows.items():
        rmse = np.mean([v["pressure_rmse_gf"] for v in vs])
        r = np.mean([v["pressure_r"] for v in vs])
        mae = np.mean([v["temperature_mae_c"] for v in vs])
        print(f"{k:<14}{rmse:>20.1f}{r:>12.3f}{mae:>14.4f}")


if __name__ == "__main__":
    main()
