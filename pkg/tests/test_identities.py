import numpy as np
import pytest

from conftest import random_exact_spec
from qcduality.exact import mpq
from qcduality.quantum.chain import BudgetError, transfer_poly
from qcduality.quantum.coderivative import fundamental_transfer, transfer_lambda
from qcduality.quantum.identities import (cbr_verify, extract_lambda, hirota_3term_residual,
                                          hirota_3term_verify, master_t_series, master_t_truncated,
                                          time_variables)
from qcduality.quantum.operators import OperatorPolynomial
from qcduality.symfun import Partition, TimeVector, miwa_point


def test_cbr_trivial_row(spec_n2_N2):
    r = cbr_verify(spec_n2_N2, (1,))
    assert r.passed and r.residual == 0


def test_cbr_hook_random(rng):
    s = random_exact_spec(rng, 2, 3)
    r = cbr_verify(s, (2, 1))
    assert r.passed
    for key in ("row_divisible", "column_divisible", "row_coefficients", "column_coefficients"):
        assert r.details[key]


def test_cbr_beyond_rank(spec_n2_N2):
    r = cbr_verify(spec_n2_N2, (1, 1, 1))
    assert r.passed
    assert transfer_lambda(spec_n2_N2, Partition((1, 1, 1))).is_zero()


def test_cbr_budget(spec_n2_N2):
    with pytest.raises(BudgetError):
        cbr_verify(spec_n2_N2, (4, 3), max_size=6)


@pytest.mark.parametrize("lam", [(2,), (1, 1), (3,), (2, 2), (3, 1)])
def test_cbr_rank_three(spec_n3_N3, lam):
    assert cbr_verify(spec_n3_N3, lam).passed


def test_master_t_at_zero(spec_n2_N2):
    T = master_t_truncated(spec_n2_N2, TimeVector.zeros(3), 3)
    assert T.equals(OperatorPolynomial.scalar(spec_n2_N2.phi(), 4))


def test_master_t_first_derivative(spec_n2_N2):
    series = master_t_series(spec_n2_N2, time_variables(3), 3)
    assert extract_lambda(series, Partition((1,)), 3).equals(transfer_poly(spec_n2_N2))


@pytest.mark.parametrize("lam", [(), (2,), (1, 1), (2, 1)])
def test_master_t_orthogonality(spec_n2_N2, lam):
    series = master_t_series(spec_n2_N2, time_variables(3), 3)
    assert extract_lambda(series, Partition(lam), 3).equals(transfer_lambda(spec_n2_N2, Partition(lam)))


@pytest.mark.parametrize("fixture", ["spec_n2_N2", "spec_n3_N3"])
def test_master_t_miwa_generating_series(fixture, request):
    s = request.getfixturevalue(fixture)
    z = mpq(7, 3)
    D = s.n + 2
    T = master_t_truncated(s, miwa_point(z, D, -1), D)
    expected = OperatorPolynomial.scalar(s.phi(), s.dim)
    for a in range(1, s.n + 1):
        expected = expected + fundamental_transfer(s, a).scale((-z) ** -a)
    assert T.equals(expected)


def test_master_t_requires_times(spec_n2_N2):
    with pytest.raises(ValueError):
        master_t_truncated(spec_n2_N2, TimeVector((mpq(1),)), 3)


def test_hirota_equal_spectral_parameters(spec_n2_N2):
    z = mpq(5, 2)
    res = hirota_3term_residual(spec_n2_N2, z, z, mpq(1, 7))
    assert not np.any(res != 0)


def test_hirota_n2_random(rng):
    s = random_exact_spec(rng, 2, 2)
    r = hirota_3term_verify(s)
    assert r.passed and r.residual == 0


def test_hirota_n3(spec_n3_N3):
    assert hirota_3term_verify(spec_n3_N3).passed


def test_hirota_point_values(spec_n2_N2):
    res = hirota_3term_residual(spec_n2_N2, mpq(3), mpq(-2, 5), mpq(4, 9))
    assert not np.any(res != 0)
