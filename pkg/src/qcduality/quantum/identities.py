"""Exact operator identities: quantum Jacobi-Trudi (CBR) relations, the
master T-operator and its 3-term bilinear (Hirota) equation."""
from __future__ import annotations

import time
from typing import Any, Sequence

import numpy as np

from ..checks import CheckResult
from ..exact import det_laplace, mpq, pmul, pshift
from ..mpoly import MPoly
from ..symfun import (Partition, TimeVector, as_partition, as_times, conjugate,
                      partitions_up_to, schur)
from .chain import BudgetError, ChainSpec, sample_points
from .coderivative import fundamental_transfer, row_transfer, transfer_lambda
from .operators import OperatorPolynomial, block_matmul, identity, is_zero_op, max_abs, zeros

DEFAULT_MAX_SIZE = 6


# ---------------------------------------------------------------------------
# quantum Jacobi-Trudi identities
# ---------------------------------------------------------------------------

def _phi_product(spec: ChainSpec, shifts: Sequence[int]) -> list:
    """``prod_k phi(x + k eta)`` over the given integer shifts."""
    out: list = [mpq(1)]
    for k in shifts:
        out = pmul(out, pshift(spec.phi(), k * spec.eta))
    return out


def cbr_matrices(spec: ChainSpec, lam: Partition, form: str):
    """Entries ``(operator polynomial, argument shift)`` of the CBR determinant.

    ``form="row"``: ``det T_{lam_i - i + j}(x - (j-1) eta)`` of size ``lam'_1``;
    ``form="column"``: ``det T^{lam'_i - i + j}(x + (j-1) eta)`` of size ``lam_1``.
    Also returns the scalar prefactor polynomial multiplying ``T_lam``.  The
    empty partition uses the 1 x 1 determinant ``[T_0] = [phi]``.
    """
    lam = as_partition(lam)
    lamc = conjugate(lam)
    if form == "row":
        size = max(lamc.part(1), 1)
        entries = [[(row_transfer(spec, lam.part(i) - i + j), -(j - 1))
                    for j in range(1, size + 1)] for i in range(1, size + 1)]
        prefactor = _phi_product(spec, [-k for k in range(1, size)])
    elif form == "column":
        size = max(lam.part(1), 1)
        entries = [[(fundamental_transfer(spec, lamc.part(i) - i + j), j - 1)
                    for j in range(1, size + 1)] for i in range(1, size + 1)]
        prefactor = _phi_product(spec, list(range(1, size)))
    else:
        raise ValueError(f"unknown CBR form {form!r}")
    return entries, prefactor


def _det_at_point(spec: ChainSpec, entries, x: Any) -> np.ndarray:
    sectors = spec.sectors()
    mats = [[op(x + shift * spec.eta) for op, shift in row] for row in entries]
    dim = spec.dim
    return det_laplace(mats, mul=lambda a, b: block_matmul(a, b, sectors),
                       zero=zeros(dim, True), one=identity(dim, True))


def _det_polynomial(spec: ChainSpec, entries) -> OperatorPolynomial:
    shifted = [[op.shift(shift * spec.eta) for op, shift in row] for row in entries]
    dim = spec.dim
    return det_laplace(shifted, mul=lambda a, b: a @ b,
                       zero=OperatorPolynomial.zero(dim, True, spec.sectors()),
                       one=OperatorPolynomial.scalar([1], dim, True, spec.sectors()))


def cbr_verify(spec: ChainSpec, lam: Partition | Sequence[int],
               max_size: int = DEFAULT_MAX_SIZE, method: str = "both") -> CheckResult:
    """Check both CBR forms for ``T_lam`` exactly.

    ``method`` selects sample-point certification (``"points"``), coefficientwise
    comparison with exact division by the phi-prefactor (``"coefficients"``) or
    both.  The residual is the largest absolute entry of any difference.
    """
    lam = as_partition(lam)
    if lam.size > max_size:
        raise BudgetError(f"|lambda| = {lam.size} exceeds the configured budget {max_size}")
    start = time.perf_counter()
    target = transfer_lambda(spec, lam)
    details: dict[str, Any] = {"lambda": list(lam.parts)}
    residual = 0.0
    passed = True
    for form in ("row", "column"):
        entries, prefactor = cbr_matrices(spec, lam, form)
        size = len(entries)
        if method in ("points", "both"):
            count = spec.N * max(size, 1) + 1
            ok = True
            for x in sample_points(spec, count):
                lhs = target(x) * _eval(prefactor, x)
                rhs = _det_at_point(spec, entries, x)
                diff = lhs - rhs
                if not is_zero_op(diff):
                    ok = False
                    residual = max(residual, max_abs(diff))
            details[f"{form}_points"] = ok
            passed &= ok
        if method in ("coefficients", "both"):
            det_poly = _det_polynomial(spec, entries)
            quotient, remainder = det_poly.divmod_scalar(prefactor)
            divisible = remainder.is_zero()
            same = quotient.equals(target)
            if not divisible:
                residual = max(residual, remainder.max_abs_coefficient())
            if not same:
                residual = max(residual, (quotient - target).max_abs_coefficient())
            details[f"{form}_divisible"] = divisible
            details[f"{form}_coefficients"] = same
            passed &= divisible and same
    return CheckResult(f"cbr{lam}", passed, residual, time.perf_counter() - start, details)


def _eval(poly: Sequence[Any], x: Any) -> Any:
    acc = 0
    for c in reversed(poly):
        acc = acc * x + c
    return acc


# ---------------------------------------------------------------------------
# master T-operator
# ---------------------------------------------------------------------------

def master_t_truncated(spec: ChainSpec, t: TimeVector | Sequence[Any], D: int) -> OperatorPolynomial:
    """``sum_{|lam| <= D, l(lam) <= n} s_lam(t) T_lam(x)`` for scalar times."""
    t = as_times(t)
    t.require(D)
    out = OperatorPolynomial.zero(spec.dim, True, spec.sectors())
    for lam in partitions_up_to(D, max_length=spec.n):
        s = schur(lam, TimeVector(t.values[:max(lam.size, 1)]))
        if s == 0:
            continue
        out = out + transfer_lambda(spec, lam).scale(s)
    return out


def master_t_series(spec: ChainSpec, t: TimeVector, D: int) -> dict[tuple[int, ...], OperatorPolynomial]:
    """Master T-operator for polynomial valued times (``MPoly`` entries).

    Returns the expansion ``monomial -> OperatorPolynomial`` in the variables of
    the times.
    """
    t.require(D)
    out: dict[tuple[int, ...], OperatorPolynomial] = {}
    for lam in partitions_up_to(D, max_length=spec.n):
        s = schur(lam, TimeVector(t.values[:max(lam.size, 1)]))
        if not isinstance(s, MPoly):
            nv = next(v.nvars for v in t.values if isinstance(v, MPoly))
            s = MPoly.constant(nv, s)
        if s.is_zero():
            continue
        op = transfer_lambda(spec, lam)
        for mono, c in s.terms.items():
            term = op.scale(c)
            out[mono] = out[mono] + term if mono in out else term
    return out


def time_variables(D: int) -> TimeVector:
    """Independent formal times ``t_1..t_D`` as polynomial variables."""
    return TimeVector(tuple(MPoly.variable(D, k) for k in range(D)))


def extract_lambda(series: dict[tuple[int, ...], OperatorPolynomial], lam: Partition,
                   D: int) -> OperatorPolynomial:
    """Apply ``s_lam(d~)`` at ``t = 0`` with ``d~ = (d_{t1}, d_{t2}/2, ...)``."""
    lam = as_partition(lam)
    s = schur(lam, time_variables(D)) if lam.size else MPoly.constant(D, 1)
    if not isinstance(s, MPoly):
        s = MPoly.constant(D, s)
    result = None
    for mono, c in s.terms.items():
        weight = mpq(c)
        for k, a in enumerate(mono, start=1):
            for j in range(1, a + 1):
                weight = weight * j / k
        if mono in series:
            term = series[mono].scale(weight)
            result = term if result is None else result + term
    if result is None:
        any_op = next(iter(series.values()))
        return OperatorPolynomial.zero(any_op.dim, True, any_op.sectors)
    return result


# ---------------------------------------------------------------------------
# 3-term bilinear equation
# ---------------------------------------------------------------------------

def _series_product(a: dict, b: dict, extra: tuple[int, ...]) -> dict:
    out: dict = {}
    for ma, pa in a.items():
        for mb, pb in b.items():
            mono = tuple(x + y + z for x, y, z in zip(ma, mb, extra))
            term = pa @ pb
            out[mono] = out[mono] + term if mono in out else term
    return out


def _series_add(acc: dict, other: dict, sign: int = 1) -> dict:
    for mono, op in other.items():
        term = op if sign > 0 else -op
        acc[mono] = acc[mono] + term if mono in acc else term
    return acc


def hirota_series(spec: ChainSpec) -> dict[tuple[int, int], OperatorPolynomial]:
    """Left side of the 3-term equation at ``t = 0`` times ``w1 w2`` (``w = 1/z``).

    ``w1 T(x+eta; -[w2]) T(x; -[w1]) - w2 T(x+eta; -[w1]) T(x; -[w2])
    + (w2 - w1) T(x+eta; 0) T(x; -[w1]-[w2])``, expanded in ``w1^i w2^j``.
    """
    D = 2 * spec.n
    w1, w2 = MPoly.variable(2, 0), MPoly.variable(2, 1)
    t1 = TimeVector(tuple(-(w1 ** k) / k for k in range(1, D + 1)))
    t2 = TimeVector(tuple(-(w2 ** k) / k for k in range(1, D + 1)))
    t12 = TimeVector(tuple(-(w1 ** k + w2 ** k) / k for k in range(1, D + 1)))
    a1 = master_t_series(spec, t1, D)
    a2 = master_t_series(spec, t2, D)
    b12 = master_t_series(spec, t12, D)
    a1s = {m: op.shift(spec.eta) for m, op in a1.items()}
    a2s = {m: op.shift(spec.eta) for m, op in a2.items()}
    total: dict = {}
    _series_add(total, _series_product(a2s, a1, (1, 0)))
    _series_add(total, _series_product(a1s, a2, (0, 1)), sign=-1)
    phi_next = pshift(spec.phi(), spec.eta)
    for mono, op in b12.items():
        term = op.times_scalar_poly(phi_next)
        _series_add(total, {(mono[0], mono[1] + 1): term})
        _series_add(total, {(mono[0] + 1, mono[1]): term}, sign=-1)
    return total


def hirota_3term_verify(spec: ChainSpec) -> CheckResult:
    """Coefficientwise exact check of the 3-term equation in ``1/z_1, 1/z_2``."""
    start = time.perf_counter()
    total = hirota_series(spec)
    residual = 0.0
    bad = []
    for mono, op in sorted(total.items()):
        if not op.is_zero():
            residual = max(residual, op.max_abs_coefficient())
            bad.append(mono)
    return CheckResult("hirota_3term", not bad, residual, time.perf_counter() - start,
                       {"monomials": len(total), "nonzero": bad})


def hirota_3term_residual(spec: ChainSpec, z1: Any, z2: Any, x: Any) -> np.ndarray:
    """The 3-term combination (times ``1/(z1 z2)``) at concrete ``z1, z2, x``."""
    w = (mpq(1) / z1, mpq(1) / z2)
    out = zeros(spec.dim, True)
    for (i, j), op in hirota_series(spec).items():
        out = out + op(x) * (w[0] ** i * w[1] ** j)
    return out
