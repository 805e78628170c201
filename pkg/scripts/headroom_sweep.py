"""Worst-case Bragg excursion against guard band as sensor count and temperature swing grow."""

import argparse

from fbginsole.layout import (DEFAULT_MAX_STRAIN_UE, DEFAULT_STRAIN_SENSITIVITY, DEFAULT_TEMP_SENSITIVITY,
                              MAX_SENSORS, plan_spectrum, worst_case_shift)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-strain", type=float, default=DEFAULT_MAX_STRAIN_UE)
    ap.add_argument("--dts", type=float, nargs="+", default=[0.0, 25.0, 50.0, 100.0])
    args = ap.parse_args()

    print(f"{'n':>3}{'guard (nm)':>12}" + "".join(f"{f'dT={dt:g}':>12}" for dt in args.dts))
    for n in (5, 10, 15, 20, 25, MAX_SENSORS):
        plan = plan_spectrum(n)
        top = max(plan.assignments.values())
        cells = []
        for dt in args.dts:
            d = worst_case_shift(top, DEFAULT_STRAIN_SENSITIVITY, DEFAULT_TEMP_SENSITIVITY, args.max_strain, dt)
            cells.append(f"{d:8.3f}{'*' if d > plan.guard_band else ' ':<4}")
        print(f"{n:>3}{plan.guard_band:>12.3f}" + "".join(f"{c:>12}" for c in cells))
    print("* excursion exceeds the guard band (collision risk)")


if __name__ == "__main__":
    main()
