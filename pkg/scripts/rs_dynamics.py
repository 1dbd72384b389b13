"""Zeros of the tau-function moving as Ruijsenaars-Schneider particles.

Tracks the zeros over a t_1 window, reports the equation-of-motion residual and
the drift of the integrals for a sequence of step sizes.

    python scripts/rs_dynamics.py --multiplicities 1 1 1 --seed 3
"""
import argparse

import numpy as np

from qcduality.duality.rs import RootTrackingLostError, initial_velocity_check, rs_eom_check, rs_from_krichever
from qcduality.mkp.krichever import random_krichever


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--multiplicities", type=int, nargs="+", default=[1, 1])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--window", type=float, default=0.02)
    args = ap.parse_args()
    rs = rs_from_krichever(random_krichever(np.random.default_rng(args.seed), args.multiplicities))
    print("x(0)    =", np.round(np.array(rs.X0), 6))
    print("xdot(0) =", np.round(rs.xdot0, 6))
    print("Spec L  =", np.round(np.sort_complex(np.linalg.eigvals(rs.L0)), 6))
    print(f"initial velocity check residual {initial_velocity_check(rs).residual:.2e}")
    print(f"{'h':>8}  {'eom':>9}  {'drift':>9}")
    for h in (2e-3, 1e-3, 5e-4, 2.5e-4):
        try:
            res = rs_eom_check(rs, h=h, window=args.window)
        except RootTrackingLostError as exc:
            print(f"{h:8.1e}  tracking lost: {exc}")
            continue
        print(f"{h:8.1e}  {res.residual:9.2e}  {res.details['integral_drift']:9.2e}")


if __name__ == "__main__":
    main()
