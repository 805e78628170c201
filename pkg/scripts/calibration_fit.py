"""Recover the logarithmic load calibration from noisy synthetic bench weights."""

import argparse

import numpy as np

from fbginsole.dsp import fit_calibration
from fbginsole.layout import CALIB_A, CALIB_B


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--noise", type=float, default=1.0, help="strain noise RMS, microstrain")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    masses = np.array([20, 50, 100, 200, 500, 1000, 2000, 5000, 10000.0])
    strain = CALIB_A * np.log(masses) + CALIB_B + rng.normal(0, args.noise, masses.size)
    log_fit = fit_calibration(zip(masses, strain), "log")
    lin_fit = fit_calibration(zip(masses, strain), "linear")
    print(f"true      : a={CALIB_A:.3f} b={CALIB_B:.3f}")
    print(f"log fit   : a={log_fit.coefficients[0]:.3f} b={log_fit.coefficients[1]:.3f} R2={log_fit.r_squared:.5f}")
    print(f"linear fit: a={lin_fit.coefficients[0]:.5f} b={lin_fit.coefficients[1]:.3f} R2={lin_fit.r_squared:.5f}")


if __name__ == "__main__":
    main()
