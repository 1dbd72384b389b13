import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcduality.exact import mpq
from qcduality.mkp.chain import (DifferenceOperator, RatFunc, dressing_recurrence_check,
                                 factorization_check, first_order_factor, kernel_check, plucker_check,
                                 q_functions, swapped_chain_check, u_coefficient, undress_chain,
                                 wave_operator, wave_operator_expanded)
from qcduality.mkp.krichever import (KricheverData, PoleError, _column_entry, a_function,
                                     random_krichever, tau_core)
from qcduality.symfun import TimeVector


@pytest.fixture
def data_n2():
    return KricheverData("1/3", ("2", "5"), (("1", "1/2"), ("1", "-1", "2/3")))


@pytest.fixture
def data_n3():
    return KricheverData("1/2", ("2", "-1", "3/2"), (("1", "1/3"), ("1", "-2", "1/2"), ("1",)))


# difference operators ---------------------------------------------------------

def test_composition_law():
    eta = mpq(1, 3)
    c = RatFunc((mpq(1), mpq(2)))
    d = RatFunc((mpq(0), mpq(1)), (mpq(3), mpq(1)))
    A = DifferenceOperator({2: c}, eta)
    B = DifferenceOperator({-1: d}, eta)
    AB = A @ B
    assert set(k for k in AB.terms) == {1}
    assert AB.coefficient(1).equals(c * d.shift(2 * eta))


def test_adjoint_is_involution_and_reverses_products():
    eta = mpq(1, 2)
    A = DifferenceOperator({0: RatFunc((mpq(1),)), -1: RatFunc((mpq(2), mpq(1)))}, eta)
    B = DifferenceOperator({1: RatFunc((mpq(0), mpq(1)), (mpq(1), mpq(1)))}, eta)
    assert A.adjoint().adjoint().equals(A)
    assert (A @ B).adjoint().equals(B.adjoint() @ A.adjoint())


def test_apply_first_order_factor():
    eta = mpq(1, 4)
    u = RatFunc((mpq(1), mpq(1)))
    op = first_order_factor(u, eta)
    f = lambda y: y * y
    x = mpq(3, 5)
    assert op.apply(f, x) == f(x) - (1 + x) * f(x - eta)


def test_ratfunc_pole():
    with pytest.raises(PoleError):
        RatFunc((mpq(1),), (mpq(-2), mpq(1)))(2)
    assert RatFunc((mpq(-4), mpq(0), mpq(1)), (mpq(-2), mpq(1))).is_polynomial()


# the chain ------------------------------------------------------------------

def test_chain_ends(data_n3):
    t = TimeVector((mpq(1, 5),))
    chain = undress_chain(data_n3, t)
    x = mpq(2, 11)
    assert chain.core(data_n3.n, x) == tau_core(data_n3, x, t)
    assert chain.core(0, x) == 1
    assert chain.core(1, x) == _column_entry(data_n3, 1, x, 1, t, ())
    num = a_function(data_n3, 1, complex(x) - 0.5, t)
    pref = complex(data_n3.p(1)) ** (complex(x) / 0.5) * np.exp(complex(t.xi(2)))
    assert abs(complex(chain.core(1, x)) * pref - num) < 1e-12 * abs(num)


@pytest.mark.parametrize("M", [(2,), (1, 1), (2, 1), (1, 2, 1), (0, 3, 1), (2, 2)])
def test_chain_degrees_bases_and_residues(M):
    data = random_krichever(np.random.default_rng(sum(M) * 7 + len(M)), M)
    chain = undress_chain(data)
    assert chain.report["degrees"] == [sum(M[:m]) for m in range(len(M) + 1)]
    for m in range(1, len(M) + 1):
        assert chain.base(m) == np.prod([data.p(r) for r in range(1, m + 1)])
    for r in chain.report["residue_ratios"]:
        assert abs(r - 1) < 1e-10


def test_residue_ratio_independent_of_time(data_n2):
    ratios = []
    for t in (TimeVector((mpq(0),)), TimeVector((mpq(1, 5), mpq(-1, 7)))):
        for x in (mpq(2, 7), mpq(-3, 4)):
            chain = undress_chain(data_n2, t, residue_check=True, sample=x)
            ratios.append(chain.report["residue_ratios"])
    ratios = np.array(ratios, dtype=complex)
    assert np.max(np.abs(ratios - ratios[0])) < 1e-10


def test_q_functions(data_n3):
    chain = undress_chain(data_n3)
    qs = q_functions(chain)
    assert [q.degree for q in qs] == [1, 3, 3]
    assert [q.base for q in qs] == [mpq(2), mpq(-2), mpq(-3)]
    assert all(q.poly[-1] == 1 for q in qs)
    with pytest.raises(ValueError):
        q_functions(undress_chain(data_n3, TimeVector((mpq(1),))))


def test_q_functions_rank_one():
    data = KricheverData("1/3", ("3",), (("1", "2", "1/2"),))
    (q,) = q_functions(undress_chain(data))
    assert q.degree == 2 and q.base == 3


def test_wave_operator_coefficients(data_n3):
    chain = undress_chain(data_n3)
    W = wave_operator(chain)
    assert W.coefficient(0).equals(RatFunc.constant(1))
    k1 = u_coefficient(chain, 1)
    for m in range(2, 4):
        k1 = k1 + u_coefficient(chain, m)
    assert (-W.coefficient(-1)).equals(k1)
    assert W.equals(wave_operator(chain, "factored"))


def test_wave_operator_kills_first_function(data_n2):
    chain = undress_chain(data_n2)
    W = wave_operator_expanded(chain)
    # on the core scale of A_1 at x: Abar_1(x - k eta) p_1^{-k}
    for x in (mpq(1, 7), mpq(-5, 3)):
        total = sum(W.coefficient(-k)(x) * _column_entry(data_n2, 1, x, k, chain.t, ()) for k in range(3))
        assert total == 0


@pytest.mark.parametrize("M", [(2,), (1, 1), (2, 1), (1, 2, 1), (2, 2)])
def test_factorization_and_kernel(M):
    data = random_krichever(np.random.default_rng(101 + sum(M)), M)
    chain = undress_chain(data, residue_check=False)
    f = factorization_check(chain)
    assert f.passed and f.details["first_coefficient_sum_rule"]
    k = kernel_check(data, chain, seed=3)
    assert k.passed, k.details
    assert k.residual < 1e-10


def test_swapped_chain(data_n3):
    s = swapped_chain_check(undress_chain(data_n3, residue_check=False))
    assert s.passed and all(s.details.values())


def test_dressing_recurrence(data_n2, data_n3):
    for data in (data_n2, data_n3):
        chain = undress_chain(data, TimeVector((mpq(1, 4),)), residue_check=False)
        r = dressing_recurrence_check(chain, mpq(3, 7), mpq(11, 5))
        assert r.passed and r.residual == 0
    with pytest.raises(PoleError):
        dressing_recurrence_check(chain, mpq(3, 7), 0)


def test_dressing_recurrence_numeric(data_n2):
    chain = undress_chain(KricheverData(0.3 + 0.1j, (2.0, -1.5), ((1, 0.5), (1, -1, 0.25))), residue_check=False)
    r = dressing_recurrence_check(chain, 0.41, 1.7 - 0.2j)
    assert r.passed and r.residual < 1e-10


# Pluecker ---------------------------------------------------------------------

def test_plucker_small_cases(rng):
    with pytest.raises(ValueError):
        plucker_check([[1, 2, 3]], 1, 2, 3, 3)
    for m in (2, 4):
        mat = [[mpq(int(rng.integers(-9, 10)), int(rng.integers(1, 4))) for _ in range(m + 2)] for _ in range(m)]
        assert plucker_check(mat, 1, 2, 3, 4)
        assert plucker_check(mat, m - 1, m, m + 1, m + 2)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 4))
def test_plucker_random(seed, m):
    rng = np.random.default_rng(seed)
    mat = [[mpq(int(rng.integers(-9, 10)), int(rng.integers(1, 4))) for _ in range(m + 2)] for _ in range(m)]
    cols = sorted(int(c) + 1 for c in rng.choice(m + 2, size=4, replace=False))
    assert plucker_check(mat, *cols)
