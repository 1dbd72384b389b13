"""Acceptance criteria, one test per criterion.

A one-line PASS/FAIL summary per criterion is printed at the end of the run
(see ``pytest_terminal_summary`` in conftest).  Run standalone with
``python tests/test_acceptance.py``.
"""
import time

import numpy as np
import pytest

from conftest import random_exact_spec, spec
from qcduality.duality.lax import duality_verify, eig3_eval
from qcduality.duality.rs import rs_eom_check, rs_from_krichever, rs_from_record, rs_tau, rs_wave
from qcduality.duality.solve import match_multisets, solve_all_sectors
from qcduality.exact import mpq, pshift, pscale
from qcduality.mkp.chain import factorization_check, kernel_check, undress_chain
from qcduality.mkp.krichever import (KricheverData, adjoint_wave, krichever_residuals, krichever_residuals_series,
                                     krichever_scales, random_krichever, tau, wave)
from qcduality.mkp.tq import bethe_verify, q_functions_from_record
from qcduality.quantum.chain import ChainSpec, gaudin_hamiltonians, hamiltonians
from qcduality.quantum.coderivative import transfer_lambda
from qcduality.quantum.identities import cbr_verify, hirota_3term_verify
from qcduality.quantum.operators import OperatorPolynomial
from qcduality.quantum.spectrum import joint_spectrum, spectrum_from_records
from qcduality.symfun import Partition, TimeVector, partitions_up_to, schur, schur_dual

pytestmark = pytest.mark.acceptance


def test_criterion_1_exact_cbr_suite():
    rng = np.random.default_rng(2024)
    for n in (2, 3):
        for _ in range(2):
            s = random_exact_spec(rng, n, 3)
            for lam in partitions_up_to(4):
                if lam.size == 0:
                    continue
                r = cbr_verify(s, lam)
                assert r.passed and r.residual == 0, (s, lam)
                if len(lam.parts) <= n:
                    for key in ("row_coefficients", "column_coefficients"):
                        assert r.details[key], (s, lam, key)
            qdet = pscale(pshift(s.phi(), s.eta), s.det_g())
            assert transfer_lambda(s, Partition((1,) * n)).equals(OperatorPolynomial.scalar(qdet, s.dim))
            for lam in [(1,) * (n + 1), (2,) + (1,) * n]:
                assert transfer_lambda(s, Partition(lam)).is_zero()


def test_criterion_2_hirota_operator_identity():
    rng = np.random.default_rng(77)
    for n, N in ((2, 2), (3, 3)):
        for s in (random_exact_spec(rng, n, N), spec(n, N, "1/3", ["0", "1", "5/2"][:N], ["2", "5", "-3"][:n])):
            r = hirota_3term_verify(s)
            assert r.passed and r.residual == 0, s


def test_criterion_3_duality_theorem():
    start = time.perf_counter()
    cases = [(spec(2, 3, "1/3", ["0", "1", "5/2"], ["2", "5"]), 8),
             (spec(3, 3, "1/3", ["0", "1", "5/2"], ["2", "5", "-3"]), 27)]
    for s, count in cases:
        records = joint_spectrum(s, seed=0)
        assert len(records) == count
        for r in records:
            res = duality_verify(s, r, tol=1e-8)
            assert res.passed and res.residual < 1e-8, (r.weights, res.residual)
    assert time.perf_counter() - start < 60


def test_criterion_4_bethe_free_solve():
    for s, total in [(spec(2, 2, "1/3", ["0", "1"], ["2", "5"]), 4),
                     (spec(2, 3, "1/3", ["0", "1", "5/2"], ["2", "5"]), 8)]:
        res = solve_all_sectors(s)
        assert sum(r.count for r in res.values()) == total == s.n ** s.N
        ref = spectrum_from_records(joint_spectrum(s, seed=1))
        for M, r in res.items():
            assert match_multisets(r.solutions, ref.get(M, [])) < 1e-8, M


def test_criterion_5_tq_and_bethe():
    s = spec(2, 3, "1/3", ["0", "1", "5/2"], ["2", "5"])
    for r in joint_spectrum(s, seed=0):
        qs, sols = q_functions_from_record(s, r)
        assert sols[0].status == "ok"
        assert qs[0].degree == r.weights[0]
        report = bethe_verify(qs)
        assert report.max_residual < 1e-9
        H = eig3_eval(s, qs[0].roots())
        assert np.max(np.abs(H - r.H)) < 1e-9 * max(1.0, float(np.max(np.abs(r.H))))


KRICHEVER_PATTERNS = [(1,), (4,), (1, 1), (2, 1), (1, 3), (2, 2), (1, 1, 1), (2, 1, 1), (1, 2, 1), (0, 2, 2)]


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_criterion_6_mkp_pipeline(seed):
    t_exact = TimeVector((mpq(1, 3), mpq(-1, 4)))
    t_num = TimeVector((0.1, 0.2))
    for M in KRICHEVER_PATTERNS:
        data = random_krichever(np.random.default_rng(1000 * seed + sum(M) + 10 * len(M)), M)
        assert all(v == 0 for v in krichever_residuals(data, mpq(5, 13), t_exact))
        # floating route: residual relative to the largest term of each condition
        res = krichever_residuals_series(data, 0.31, t_num)
        scales = krichever_scales(data, 0.31, t_num)
        assert max(abs(complex(v)) / max(sc, 1.0) for v, sc in zip(res, scales)) < 1e-10
        for z in (3.7 + 0.4j, -2.3 + 1.1j):
            a, b = wave(data, 0.31, t_num, z, "det"), wave(data, 0.31, t_num, z, "tau")
            assert abs(a - b) <= 1e-12 * abs(b)
        chain = undress_chain(data, residue_check=False)
        assert chain.core(0, mpq(2, 7)) == 1
        assert chain.report["degrees"][0] == 0
        assert factorization_check(chain).passed
        k = kernel_check(data, chain, seed=seed)
        assert k.passed and k.residual < 1e-10


def test_criterion_7_classical_dynamics():
    for M in ((1, 1), (2, 1), (1, 1, 1)):
        rs = rs_from_krichever(random_krichever(np.random.default_rng(0), M))
        res = rs_eom_check(rs, h=1e-3)
        assert res.residual < 1e-5 and res.details["integral_drift"] < 1e-6, M
    s = spec(2, 3, "1/3", ["0", "1", "5/2"], ["2", "5"])
    for r in joint_spectrum(s, seed=0):
        res = rs_eom_check(rs_from_record(s, r), h=1e-3)
        assert res.residual < 1e-5 and res.details["integral_drift"] < 1e-6, r.weights
    # matched n = 2, N = 2 data: tau up to a constant, wave functions pointwise
    data = KricheverData("1/3", ("2", "5"), (("1", "3/2"), ("1", "-1/2")))
    rs = rs_from_krichever(data)
    samples = [(0.37, (0.1, 0.05)), (1.3 + 0.2j, (0.02, -0.03, 0.01)), (-0.8, (0.0,))]
    ratios = np.array([rs_tau(rs, x, t) / tau(data, x, t) for x, t in samples])
    assert np.max(np.abs(ratios - ratios[0])) <= 1e-9 * abs(ratios[0])
    for x, t in samples:
        psi, psi_star = rs_wave(rs, x, t, 2.7 + 0.4j)
        assert abs(psi - wave(data, x, t, 2.7 + 0.4j)) <= 1e-9 * abs(psi)
        assert abs(psi_star - adjoint_wave(data, x, t, 2.7 + 0.4j)) <= 1e-9 * abs(psi_star)


def test_criterion_8_gaudin_limit():
    h = [0.7, -0.4]
    x = [0.0, 1.3, -2.1]
    G = gaudin_hamiltonians(ChainSpec(2, 3, 1.0, tuple(x), (2.0, 3.0)), h)
    errs = []
    for eta in (1e-3, 1e-4):
        s = ChainSpec(2, 3, eta, tuple(x), tuple(np.exp(eta * v) for v in h))
        errs.append(max(np.abs((np.asarray(Hi, dtype=complex) - np.eye(8)) / eta - np.asarray(Gi, dtype=complex)).max()
                        for Hi, Gi in zip(hamiltonians(s), G)))
    assert 8 <= errs[0] / errs[1] <= 12, errs


def test_criterion_9_symmetric_function_kernel():
    rng = np.random.default_rng(9)
    for _ in range(200):
        t = TimeVector(tuple(mpq(int(rng.integers(-5, 6)), int(rng.integers(1, 4))) for _ in range(6)))
        u = TimeVector(tuple(mpq(int(rng.integers(-5, 6)), int(rng.integers(1, 4))) for _ in range(6)))
        D = int(rng.integers(0, 6))
        for lam in partitions_up_to(D):
            if lam.size == D:
                assert schur(lam, t) == schur_dual(lam, t)
        lhs = sum((schur(lam, t) * schur(lam, u) for lam in partitions_up_to(D)), mpq(0))
        assert lhs == _cauchy_littlewood_rhs(t, u, D)


def _cauchy_littlewood_rhs(t, u, D):
    """Degree <= D part of ``exp(sum_k k t_k u_k)`` by direct power-series exponentiation."""
    c = [mpq(0)] + [k * t.values[k - 1] * u.values[k - 1] for k in range(1, D + 1)]
    out = [mpq(1)] + [mpq(0)] * D
    term = list(out)
    for j in range(1, D + 1):
        new = [mpq(0)] * (D + 1)
        for a, ta in enumerate(term):
            for b in range(1, D + 1 - a):
                new[a + b] += ta * c[b]
        term = [v / j for v in new]
        out = [p + q for p, q in zip(out, term)]
    return sum(out, mpq(0))


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
