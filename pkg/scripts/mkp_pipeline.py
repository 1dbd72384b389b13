"""Krichever data through tau, the undressing chain, Q-functions and Bethe equations.

    python scripts/mkp_pipeline.py --multiplicities 2 1 1 --seed 3
"""
import argparse

import numpy as np

from qcduality.exact import mpq
from qcduality.mkp.chain import factorization_check, kernel_check, q_functions, undress_chain
from qcduality.mkp.krichever import krichever_residuals, random_krichever, tau_quasipoly
from qcduality.mkp.tq import bethe_verify
from qcduality.symfun import TimeVector


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--multiplicities", type=int, nargs="+", default=[1, 2])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    data = random_krichever(np.random.default_rng(args.seed), args.multiplicities)
    print(f"eta = {data.eta}, points = {[str(p) for p in data.points]}")
    print(f"coefficients = {[[str(a) for a in row] for row in data.coeffs]}")
    t = TimeVector((mpq(1, 3), mpq(-1, 4)))
    print("Krichever conditions exact:", all(r == 0 for r in krichever_residuals(data, mpq(5, 13), t)))
    tau = tau_quasipoly(data, TimeVector.zeros(1))
    print(f"tau(x, 0) = ({tau.base})^(x/eta) * poly of degree {tau.degree}")
    chain = undress_chain(data)
    print("chain degrees:", chain.report["degrees"])
    print("wave operator factorization:", factorization_check(chain).passed)
    k = kernel_check(data, chain, seed=args.seed)
    print(f"kernel check: {k.passed} (residual {k.residual:.2e})")
    qs = q_functions(chain)
    for m, q in enumerate(qs, start=1):
        roots = ", ".join(f"{complex(r):.5f}" for r in q.roots())
        print(f"Q_{m} = ({q.base})^(x/eta) prod(x - r), r in [{roots}]")
    try:
        report = bethe_verify(qs)
        print(f"Bethe residual {report.max_residual:.2e}")
    except ArithmeticError as exc:
        print(f"Bethe equations not checked: {exc}")


if __name__ == "__main__":
    main()
