import cmath

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcduality.exact import mpq, pdegree
from qcduality.mkp.krichever import (KricheverData, PoleError, a_function, adjoint_residue,
                                     adjoint_wave, adjoint_wave_reduced, diff3_residual, dtau_core,
                                     hirota_mkp_residual, krichever_residuals,
                                     krichever_residuals_series, miwa_polynomial, random_krichever,
                                     adjoint_residue_formula, tau, tau_core, tau_quasipoly, wave, wave_coefficients,
                                     wave_reduced)
from qcduality.symfun import TimeVector


def times(*v):
    return TimeVector(tuple(mpq(a) for a in v))


@pytest.fixture
def data_n2():
    return KricheverData("1/3", ("2", "5"), (("1", "1/2"), ("1", "-1", "2/3")))


@pytest.fixture
def data_n3():
    return KricheverData("1/2", ("2", "-1", "3/2"), (("1", "1/3"), ("1", "-2", "1/2"), ("1",)))


def test_data_validation():
    with pytest.raises(ValueError):
        KricheverData("1/3", ("2", "2"), (("1",), ("1",)))
    with pytest.raises(ValueError):
        KricheverData("1/3", ("2",), (("2",),))
    with pytest.raises(ValueError):
        KricheverData("0", ("2",), (("1",),))
    d = KricheverData("1/3", ("2", "5"), (("1", "1/2"), ("1", "-1", "2/3")))
    assert d.multiplicities == (1, 2) and d.N == 3 and d.exact


def test_a_without_multiplicity():
    d = KricheverData("1/3", ("5/2",), (("1",),))
    t = TimeVector((0.2, -0.1))
    x = 0.7
    xi = 0.2 * 2.5 - 0.1 * 2.5 ** 2
    assert abs(a_function(d, 1, x, t) - 2.5 ** (x * 3) * cmath.exp(xi)) < 1e-12 * abs(2.5 ** (x * 3))


def test_a_at_origin(data_n2):
    for i in (1, 2):
        assert abs(a_function(data_n2, i, 0, TimeVector.zeros(2)) - 1) < 1e-15


def test_a_miwa_identity(data_n3):
    t = times("1/5", "-1/3")
    x, z = mpq(2, 7), mpq(9, 4)
    eta = data_n3.eta
    for k in (1, 2, 3):
        lhs = a_function(data_n3, k, x, t, ((z, -1),))
        rhs = a_function(data_n3, k, x, t) - a_function(data_n3, k, x + eta, t) / complex(z)
        assert abs(lhs - rhs) < 1e-12 * max(abs(rhs), 1)


def test_a_time_derivative(data_n2):
    x, h = 0.3, 1e-5
    for k in (1, 2):
        f = lambda s: a_function(data_n2, k, x, TimeVector((s, 0.1)))
        deriv = (f(h) - f(-h)) / (2 * h)
        assert abs(deriv - a_function(data_n2, k, x + 1 / 3, TimeVector((0.0, 0.1)))) < 1e-7 * abs(deriv)


def test_tau_single_point():
    d = KricheverData("1/3", ("5/2",), (("1",),))
    t = TimeVector((0.3,))
    x = 0.45
    expected = 2.5 ** ((x - 1 / 3) * 3) * cmath.exp(0.3 * 2.5)
    assert abs(tau(d, x, t) - expected) < 1e-12 * abs(expected)


def test_tau_degree(rng):
    for M in [(2,), (1, 1), (2, 0, 1), (0, 3), (1, 2, 1)]:
        d = random_krichever(rng, M)
        q = tau_quasipoly(d, TimeVector.zeros(1))
        assert q.degree == sum(M)


def test_tau_quasipolynomial_values(data_n3):
    q0 = tau_quasipoly(data_n3, TimeVector.zeros(1))
    for x in (mpq(1, 3), mpq(-7, 5)):
        assert q0.polynomial(x) == tau_core(data_n3, x, TimeVector.zeros(1))
    # nonzero times: the polynomial part absorbs exp(sum_i xi(t, p_i))
    t = times("1/4")
    q = tau_quasipoly(data_n3, t)
    scale = cmath.exp(sum(complex(t.xi(complex(p))) for p in data_n3.points))
    for x in (mpq(1, 3), mpq(-7, 5)):
        assert abs(complex(q.polynomial(x)) - scale * complex(tau_core(data_n3, x, t))) < 1e-12 * abs(scale)
        assert abs(q(x) - tau(data_n3, x, t)) < 1e-12 * abs(q(x))


def test_shift_ratio_and_last_coefficient(data_n2, data_n3):
    for d in (data_n2, data_n3):
        t = TimeVector((0.1,))
        x = 0.37
        ratio = tau(d, x + complex(d.eta), t) / tau(d, x, t)
        w = wave_coefficients(d, x, t)
        assert abs(ratio - (-1) ** d.n * complex(w[-1])) < 1e-10 * abs(ratio)


def test_wave_single_point():
    d = KricheverData("1/3", ("3",), (("1",),))
    x, z = 0.4, 1.7 + 0.3j
    t = TimeVector((0.2,))
    expected = z ** (3 * x) * cmath.exp(0.2 * z) * (1 - 3 / z)
    assert abs(wave(d, x, t, z) - expected) < 1e-12 * abs(expected)


@pytest.mark.parametrize("z", [mpq(7, 3), mpq(-11, 4)])
def test_wave_forms_agree(data_n3, z):
    t = times("1/5")
    x = mpq(3, 11)
    assert wave_reduced(data_n3, x, t, z, "tau") == wave_reduced(data_n3, x, t, z, "det")
    a = wave(data_n3, x, t, complex(z), "tau")
    b = wave(data_n3, x, t, complex(z), "det")
    assert abs(a - b) < 1e-12 * abs(a)


def test_wave_truncates(data_n3):
    # psi / plane wave is a polynomial of degree n in 1/z
    x, t = mpq(1, 7), times("1/3")
    w = wave_coefficients(data_n3, x, t)
    assert len(w) == data_n3.n + 1 and w[0] == 1
    for z in (mpq(5), mpq(-2, 9)):
        assert wave_reduced(data_n3, x, t, z) == sum(c / z ** k for k, c in enumerate(w))


def test_krichever_conditions(data_n2, data_n3):
    for d in (data_n2, data_n3):
        t = times("1/4", "-1/2")
        assert all(r == 0 for r in krichever_residuals(d, mpq(2, 9), t))
        num = krichever_residuals_series(d, 0.31, TimeVector((0.1, 0.2)))
        assert max(abs(complex(r)) for r in num) < 1e-10


def test_first_coefficient_is_log_derivative(data_n2):
    x, h = 0.29, 1e-5
    f = lambda s: tau(data_n2, x, TimeVector((s,)))
    dlog = (cmath.log(f(h)) - cmath.log(f(-h))) / (2 * h)
    w1 = complex(wave_coefficients(data_n2, x, TimeVector((0.0,)))[1])
    assert abs(w1 + dlog) < 1e-7 * abs(w1)
    assert abs(complex(dtau_core(data_n2, x, TimeVector((0.0,)))) / complex(tau_core(data_n2, x, TimeVector((0.0,))))
               - dlog) < 1e-7 * abs(dlog)


def test_adjoint_forms_agree(data_n3):
    t, x, z = times("1/6"), mpq(2, 5), mpq(13, 3)
    assert adjoint_wave_reduced(data_n3, x, t, z, "tau") == adjoint_wave_reduced(data_n3, x, t, z, "det")


def test_adjoint_single_point():
    d = KricheverData("1/3", ("3",), (("1",),))
    x, z = 0.4, 1.7 + 0.3j
    t = TimeVector((0.2,))
    expected = z ** (-3 * x) * cmath.exp(-0.2 * z) / (1 - 3 / z)
    assert abs(adjoint_wave(d, x, t, z) - expected) < 1e-12 * abs(expected)


def test_adjoint_zero_at_origin(data_n3):
    t, x = TimeVector((0.1,)), 0.3
    r1 = adjoint_wave_reduced(data_n3, x, t, 1e-3)
    r2 = adjoint_wave_reduced(data_n3, x, t, 1e-4)
    assert abs(abs(r1 / r2) - 10 ** data_n3.n) < 1e-2 * 10 ** data_n3.n


def test_adjoint_pole_order(data_n2):
    t, x = TimeVector((0.1,)), 0.3
    for k, M in enumerate(data_n2.multiplicities, start=1):
        p = complex(data_n2.p(k))
        r1 = adjoint_wave_reduced(data_n2, x, t, p + 1e-3)
        r2 = adjoint_wave_reduced(data_n2, x, t, p + 1e-4)
        assert abs(abs(r2 / r1) - 10 ** (M + 1)) < 1e-2 * 10 ** (M + 1)
    with pytest.raises(PoleError):
        adjoint_wave_reduced(data_n2, x, t, data_n2.p(1))


def test_adjoint_residues(data_n3):
    t, x = times("1/5"), mpq(3, 7)
    for k, M in enumerate(data_n3.multiplicities, start=1):
        for m in range(M + 1):
            a = complex(adjoint_residue(data_n3, k, m, x, t))
            b = complex(adjoint_residue_formula(data_n3, k, m, x, t))
            assert abs(a - b) < 1e-10 * max(abs(b), 1e-12)


def test_hirota_and_diff3(data_n3):
    t = times("1/5", "1/7")
    res, size = hirota_mkp_residual(data_n3, mpq(1, 3), t, mpq(7, 2), mpq(-5, 3))
    assert res == 0 and size > 0
    res, size = diff3_residual(data_n3, 0.27, TimeVector((0.1, 0.05)), 2.9)
    assert abs(complex(res)) < 1e-10 * size


def test_miwa_polynomial_degree(data_n3):
    u = miwa_polynomial(data_n3, mpq(2, 9), times("1/3"))
    assert pdegree(u) == data_n3.n


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.lists(st.integers(0, 2), min_size=1, max_size=3))
def test_random_krichever_identities(seed, M):
    d = random_krichever(np.random.default_rng(seed), M)
    t = times("1/3", "-1/4")
    x = mpq(5, 13)
    try:
        assert all(r == 0 for r in krichever_residuals(d, x, t))
        z1, z2 = mpq(17, 3), mpq(-23, 5)
        res, _ = hirota_mkp_residual(d, x, t, z1, z2)
        assert res == 0
    except PoleError:
        pass
