import numpy as np
import pytest

from conftest import spec
from qcduality.duality.lax import eig3_eval
from qcduality.exact import mpq, pfrom_roots, pscale, pshift
from qcduality.mkp.chain import undress_chain
from qcduality.mkp.krichever import KricheverData, QuasiPolynomial, interpolate_core, random_krichever
from qcduality.mkp.tq import (RootCollisionError, bethe_verify, chain_to_spin_labels,
                              factorization_from_q_check, nested_bethe_residuals,
                              q_functions_from_record, regularity_check, tq_residual, tq_solve_q1,
                              tq_solve_qn1, tq_verify_q1, tq_verify_qn1)
from qcduality.quantum.spectrum import joint_spectrum

ETA = mpq(1, 3)
PHI = [mpq(0), mpq(-1), mpq(1)]                   # x (x - 1)
T2 = pscale(pshift(PHI, ETA), mpq(10))            # det g phi(x + eta), p = (2, 5)


def transfer_list(const, linear):
    return [PHI, [const, linear, mpq(7)], T2]


def test_highest_weight_has_no_roots():
    # weights (0, 2): H = (10/3, 20/3), T^1 = 7x^2 - 11/3 x - 10/9
    sol = tq_solve_q1(transfer_list(mpq(-10, 9), mpq(-11, 3)), 0, mpq(2), ETA)
    assert sol.status == "ok" and sol.q.poly == (1,) and sol.q.base == 2


@pytest.mark.parametrize("const,root", [(mpq(-5, 9), mpq(-2, 3)), (mpq(-16, 9), mpq(5, 9))])
def test_single_root_sector(const, root):
    # the root solves p_1 phi(v) = p_2 phi(v + eta), i.e. 27 v^2 + 3 v - 10 = 0
    assert 27 * root ** 2 + 3 * root - 10 == 0
    T = transfer_list(const, mpq(-14, 3))
    sol = tq_solve_q1(T, 1, mpq(2), ETA)
    assert sol.status == "ok"
    assert sol.q.poly == (-root, 1)
    assert tq_verify_q1(T, sol.q) and tq_verify_qn1(T, sol.q)
    # n = 2: the adjoint relation selects the same Q
    alt = tq_solve_qn1(T, 1, mpq(2), ETA)
    assert alt.status == "ok" and alt.q.poly == sol.q.poly


def test_eig3_from_single_root(spec_n2_N2):
    H = eig3_eval(spec_n2_N2, [-2 / 3])
    assert np.allclose(H, [5 / 3, 16 / 3], atol=1e-12)
    H = eig3_eval(spec_n2_N2, [])
    assert np.allclose(H, [10 / 3, 20 / 3], atol=1e-12)


def test_wrong_degree_and_ambiguous_kernel():
    assert tq_solve_q1(transfer_list(mpq(-5, 9), mpq(-14, 3)), 0, mpq(2), ETA).status == "none"
    sol = tq_solve_q1([[0], [0], [0]], 1, mpq(2), ETA)
    assert sol.status == "ambiguous" and sol.kernel_dimension == 2


def test_rank_one_relation():
    x = [mpq(0), mpq(2), mpq(-3, 2)]
    phi = pfrom_roots(x, one=mpq(1))
    p = mpq(7, 2)
    T = [phi, pscale(pshift(phi, ETA), p)]
    sol = tq_solve_q1(T, 3, p, ETA)
    assert sol.status == "ok"
    assert sol.q.poly == tuple(phi)
    # for n = 1 the adjoint relation involves Q_0 = 1
    assert tq_verify_qn1(T, QuasiPolynomial(mpq(1), (mpq(1),), ETA))


def test_tq_from_krichever_chain():
    # the column minors of tau are the transfer eigenvalues of the Krichever state
    data = KricheverData("1/2", ("2", "-1", "3/2"), (("1", "1/3"), ("1", "-2", "1/2"), ("1",)))
    chain = undress_chain(data, residue_check=False)
    T = [interpolate_core(lambda x, k=k: chain.column_core(k, x), data.N, True) for k in range(data.n + 1)]
    sol = tq_solve_q1(T, chain.degree(1), data.p(1), data.eta)
    assert sol.status == "ok"
    expected = QuasiPolynomial(data.p(1), tuple(chain.core_poly(1)), data.eta).monic()
    assert sol.q.poly == expected.poly
    value, size = tq_residual(T, sol.q, mpq(3, 7))
    assert value == 0


@pytest.fixture(scope="module")
def records_n2_N3():
    s = spec(2, 3, "1/3", ["0", "1", "5/2"], ["2", "5"])
    return s, joint_spectrum(s, seed=2)


def test_bethe_from_spectrum(records_n2_N3):
    s, records = records_n2_N3
    for r in records:
        qs, sols = q_functions_from_record(s, r)
        assert sols[0].status == "ok"
        assert qs[0].degree == r.weights[0]
        assert np.allclose(sorted(qs[-1].roots().real), sorted(float(v) for v in s.x), atol=1e-12)
        report = bethe_verify(qs)
        assert report.passed(1e-9), report
        H = eig3_eval(s, qs[0].roots())
        assert np.max(np.abs(H - r.H)) < 1e-9 * max(1, np.max(np.abs(r.H)))
        assert factorization_from_q_check(transfer_list_from(qs, s, r), qs).passed


def transfer_list_from(qs, s, r):
    from qcduality.mkp.tq import transfer_eigenvalues
    return transfer_eigenvalues(s, r)


def test_vacuous_bethe_for_empty_levels(records_n2_N3):
    s, records = records_n2_N3
    r = next(r for r in records if r.weights[0] == 0)
    qs, _ = q_functions_from_record(s, r)
    report = bethe_verify(qs)
    assert report.max_residual == 0.0 and report.passed(1e-12)


def test_rank_three_adjoint_relation(spec_n3_N3):
    for r in joint_spectrum(spec_n3_N3, seed=4):
        qs, sols = q_functions_from_record(spec_n3_N3, r)
        assert [sol.status for sol in sols] == ["ok", "ok"]
        T = transfer_list_from(qs, spec_n3_N3, r)
        assert tq_verify_qn1(T, qs[1], tol=1e-10)
        assert bethe_verify(qs).passed(1e-9)
        g, w = chain_to_spin_labels(qs)
        res = [float(np.max(np.abs(v))) for v in nested_bethe_residuals(g, w, complex(spec_n3_N3.eta)) if len(v)]
        assert max(res, default=0.0) < 1e-8


@pytest.mark.parametrize("M", [(1, 1), (2, 1), (1, 1, 1), (1, 2, 1)])
def test_bethe_and_regularity_on_krichever_chains(M):
    data = random_krichever(np.random.default_rng(17 + len(M)), M)
    chain = undress_chain(data, residue_check=False)
    assert bethe_verify(chain).passed(1e-9)
    assert regularity_check(chain).passed


def test_root_collision_is_reported():
    eta = mpq(1, 2)
    q1 = QuasiPolynomial(mpq(2), (mpq(1), mpq(-2), mpq(1)), eta)      # double root at 1
    q2 = QuasiPolynomial(mpq(6), (mpq(0), mpq(1)), eta)
    with pytest.raises(RootCollisionError):
        bethe_verify([q1, q2])
