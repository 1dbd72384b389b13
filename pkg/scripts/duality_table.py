"""Joint spectrum of a chain and the duality residual of every state.

    python scripts/duality_table.py --n 2 --x 0 1 5/2 --p 2 5 --eta 1/3
"""
import argparse
import time

import numpy as np

from qcduality.duality.lax import duality_verify, eig3_eval
from qcduality.mkp.tq import bethe_verify, q_functions_from_record
from qcduality.quantum.chain import ChainSpec
from qcduality.quantum.spectrum import joint_spectrum


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--x", nargs="+", default=["0", "1", "5/2"])
    ap.add_argument("--p", nargs="+", default=["2", "5"])
    ap.add_argument("--eta", default="1/3")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    spec = ChainSpec(args.n, len(args.x), args.eta, tuple(args.x), tuple(args.p))
    start = time.perf_counter()
    records = joint_spectrum(spec, seed=args.seed)
    print(f"n={spec.n} N={spec.N} states={len(records)}")
    print(f"{'sector':>12}  {'duality':>9}  {'bethe':>9}  {'eig3':>9}  H")
    for r in records:
        dual = duality_verify(spec, r).residual
        bethe = eig3 = float("nan")
        if spec.n <= 3:
            qs, sols = q_functions_from_record(spec, r)
            if all(s.status == "ok" for s in sols):
                bethe = bethe_verify(qs).max_residual if spec.n > 1 else 0.0
                if spec.n == 2:
                    eig3 = float(np.max(np.abs(eig3_eval(spec, qs[0].roots()) - r.H)))
        H = " ".join(f"{h.real:+.6f}" for h in r.H)
        print(f"{str(r.weights):>12}  {dual:9.2e}  {bethe:9.2e}  {eig3:9.2e}  {H}")
    print(f"elapsed {time.perf_counter() - start:.2f} s")


if __name__ == "__main__":
    main()
