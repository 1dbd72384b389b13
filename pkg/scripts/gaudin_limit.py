"""First-order approach of (H_i - 1)/eta to the Gaudin Hamiltonians as eta -> 0 with g = exp(eta h).

    python scripts/gaudin_limit.py
"""
import argparse

import numpy as np

from qcduality.quantum.chain import ChainSpec, gaudin_hamiltonians, hamiltonians


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--x", type=float, nargs="+", default=[0.0, 1.3, -2.1])
    ap.add_argument("--h", type=float, nargs="+", default=[0.7, -0.4])
    args = ap.parse_args()
    n, N = len(args.h), len(args.x)
    G = gaudin_hamiltonians(ChainSpec(n, N, 1.0, tuple(args.x), tuple(np.exp(args.h))), args.h)
    prev = None
    print(f"{'eta':>8}  {'error':>10}  {'ratio':>6}")
    for eta in (1e-1, 1e-2, 1e-3, 1e-4):
        spec = ChainSpec(n, N, eta, tuple(args.x), tuple(np.exp(eta * v) for v in args.h))
        eye = np.eye(n ** N)
        err = max(np.abs((np.asarray(H, dtype=complex) - eye) / eta - np.asarray(g, dtype=complex)).max()
                  for H, g in zip(hamiltonians(spec), G))
        ratio = f"{prev / err:6.2f}" if prev else ""
        print(f"{eta:8.0e}  {err:10.3e}  {ratio}")
        prev = err


if __name__ == "__main__":
    main()
