"""Polynomial mKP solutions built from Krichever data.

Every function ``A_r(y, t)`` is ``p_r^{y/eta} e^{xi(t, p_r)}`` times a
*core* ``Abar_r(y, t)`` that is a polynomial in ``y`` with coefficients
rational in the data.  Tau-functions, wave functions and their Miwa shifted
versions are determinants of cores, so all identities are checked exactly
over the rationals.  Miwa shifts ``t -> t + s [1/z]`` are never truncated:
they enter the cores through the exact factor ``(1 - zeta/z)^{-s}``.

Indices of Krichever points are 1-based, as ``p_1 .. p_n``.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass
from math import comb, factorial
from typing import Any, Sequence

import numpy as np

from ..exact import (det_bareiss, is_exact, mpq, parse_rational, pdegree, peval,
                     pinterp, pmul, pshift, ptrim)
from ..symfun import TimeVector, as_times

Shift = tuple[Any, int]          # (z, s) meaning t -> t + s [1/z]


class PoleError(ZeroDivisionError):
    """Evaluation at a pole (z equal to a Krichever point, or a zero tau)."""


# ---------------------------------------------------------------------------
# data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KricheverData:
    """Points ``p_i``, coefficients ``a_{i0} = 1, a_{i1} .. a_{iM_i}`` and ``eta``."""

    eta: Any
    points: tuple[Any, ...]
    coeffs: tuple[tuple[Any, ...], ...]

    def __post_init__(self):
        conv = _convert
        object.__setattr__(self, "eta", conv(self.eta))
        object.__setattr__(self, "points", tuple(conv(p) for p in self.points))
        object.__setattr__(self, "coeffs", tuple(tuple(conv(a) for a in row) for row in self.coeffs))
        if self.eta == 0:
            raise ValueError("eta must be nonzero")
        if len(self.points) < 1 or len(self.points) != len(self.coeffs):
            raise ValueError("need one coefficient row per Krichever point")
        if any(p == 0 for p in self.points):
            raise ValueError("Krichever points must be nonzero")
        if len(set(self.points)) != len(self.points):
            raise ValueError("Krichever points must be pairwise distinct")
        for i, row in enumerate(self.coeffs, start=1):
            if len(row) < 1 or row[0] != 1:
                raise ValueError(f"a_{{{i}0}} must equal 1")
            if len(row) > 1 and row[-1] == 0:
                raise ValueError(f"top coefficient a_{{{i},{len(row) - 1}}} must be nonzero")

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def multiplicities(self) -> tuple[int, ...]:
        return tuple(len(row) - 1 for row in self.coeffs)

    @property
    def N(self) -> int:
        return sum(self.multiplicities)

    @property
    def exact(self) -> bool:
        return is_exact(self.eta) and all(is_exact(p) for p in self.points) and all(
            is_exact(a) for row in self.coeffs for a in row)

    def p(self, i: int) -> Any:
        return self.points[i - 1]

    def reordered(self, order: Sequence[int]) -> "KricheverData":
        """Data with the points relabeled as ``p_{order[0]}, p_{order[1]}, ...`` (1-based)."""
        return KricheverData(self.eta, tuple(self.points[i - 1] for i in order),
                             tuple(self.coeffs[i - 1] for i in order))

    def truncated(self, m: int) -> "KricheverData":
        """The first ``m`` points only."""
        return KricheverData(self.eta, self.points[:m], self.coeffs[:m])


def _convert(v: Any) -> Any:
    if isinstance(v, (str,)) or is_exact(v):
        return parse_rational(v)
    return complex(v)


def random_krichever(rng: np.random.Generator, multiplicities: Sequence[int],
                     eta: Any = None, span: int = 5) -> KricheverData:
    """Random rational data with distinct nonzero points and small coefficients."""
    n = len(multiplicities)
    pts: list = []
    while len(pts) < n:
        v = mpq(int(rng.integers(-span, span + 1)), int(rng.integers(1, 4)))
        if v != 0 and v not in pts:
            pts.append(v)
    coeffs = []
    for M in multiplicities:
        row = [mpq(1)]
        for m in range(1, M + 1):
            a = mpq(int(rng.integers(-span, span + 1)), int(rng.integers(1, 4)))
            if m == M and a == 0:
                a = mpq(1)
            row.append(a)
        coeffs.append(tuple(row))
    if eta is None:
        eta = mpq(int(rng.integers(1, 4)), int(rng.integers(2, 6)))
    return KricheverData(eta, tuple(pts), tuple(coeffs))


# ---------------------------------------------------------------------------
# quasipolynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuasiPolynomial:
    """``rho^{x/eta} poly(x)``; ``poly`` is an ascending coefficient tuple."""

    base: Any
    poly: tuple[Any, ...]
    eta: Any

    def __post_init__(self):
        object.__setattr__(self, "poly", tuple(ptrim(list(self.poly))))

    @property
    def degree(self) -> int:
        return pdegree(list(self.poly))

    def polynomial(self, x: Any) -> Any:
        return peval(list(self.poly), x)

    def __call__(self, x: Any) -> complex:
        """Numeric value with the principal branch of ``rho^{x/eta}``."""
        return _power(complex(self.base), complex(x) / complex(self.eta)) * complex(self.polynomial(x))

    def shifted(self, k: int) -> "QuasiPolynomial":
        """``x -> x + k eta``; the base part contributes the constant ``rho^k``."""
        poly = pshift(list(self.poly), k * self.eta)
        scale = self.base ** k if k >= 0 else 1 / (self.base ** (-k))
        return QuasiPolynomial(self.base, tuple(c * scale for c in poly), self.eta)

    def __mul__(self, other: "QuasiPolynomial") -> "QuasiPolynomial":
        return QuasiPolynomial(self.base * other.base, tuple(pmul(list(self.poly), list(other.poly))), self.eta)

    def monic(self) -> "QuasiPolynomial":
        lead = self.poly[-1]
        return QuasiPolynomial(self.base, tuple(c / lead for c in self.poly), self.eta)

    def roots(self) -> np.ndarray:
        """Roots of the polynomial part (companion matrix eigenvalues)."""
        if self.degree <= 0:
            return np.zeros(0, dtype=complex)
        coeffs = np.array([complex(c) for c in reversed(self.poly)])
        return np.roots(coeffs).astype(complex)

    def shift_ratio(self, x: Any, k: int) -> Any:
        """``Q(x + k eta) / Q(x)`` with the base part taken exactly."""
        num = peval(list(self.poly), x + k * self.eta)
        den = peval(list(self.poly), x)
        return (self.base ** k) * num / den if k >= 0 else num / den / (self.base ** (-k))


def _power(base: complex, exponent: complex) -> complex:
    if base == 0:
        raise PoleError("zero base in a quasipolynomial")
    return cmath.exp(exponent * cmath.log(base))


# ---------------------------------------------------------------------------
# Taylor series of the reduced generating function at a Krichever point
# ---------------------------------------------------------------------------

def _binomial_series(alpha: Any, scale: Any, order: int) -> list:
    """Coefficients of ``(1 + scale h)^alpha`` up to ``h^order``."""
    out = [alpha * 0 + 1]
    c = out[0]
    for k in range(1, order + 1):
        c = c * scale * (alpha - (k - 1)) / k
        out.append(c)
    return out


def _exp_series(g: Sequence[Any], order: int) -> list:
    """Coefficients of ``exp(g(h))`` where ``g(0) = 0``."""
    f = [g[0] * 0 + 1 if g else 1]
    for k in range(1, order + 1):
        acc = 0
        for j in range(1, k + 1):
            if j < len(g):
                acc = acc + j * g[j] * f[k - j]
        f.append(acc / k if not isinstance(acc, int) else mpq(acc, k))
    return f


def _truncated_mul(a: Sequence[Any], b: Sequence[Any], order: int) -> list:
    out = [0] * (order + 1)
    for i, x in enumerate(a[:order + 1]):
        for j, y in enumerate(b[:order + 1 - i]):
            out[i + j] = out[i + j] + x * y
    return out


def _xi_increment(t: TimeVector, p: Any, order: int) -> list:
    """Coefficients of ``xi(t, p + h) - xi(t, p)`` in ``h``."""
    g = [0] * (order + 1)
    for k, tk in enumerate(t.values, start=1):
        if tk == 0:
            continue
        for j in range(1, min(k, order) + 1):
            g[j] = g[j] + tk * comb(k, j) * p ** (k - j)
    return g


def reduced_series(data: KricheverData, i: int, y: Any, t: TimeVector,
                   shifts: Sequence[Shift] = (), order: int | None = None) -> list:
    """Taylor coefficients in ``h`` of ``F(p_i + h) / (p_i^{y/eta} e^{xi(t, p_i)})``.

    ``F(zeta) = zeta^{y/eta} e^{xi(t, zeta)} prod (1 - zeta/z)^{-s}``
    over the Miwa shifts ``(z, s)``.
    """
    p = data.p(i)
    order = data.multiplicities[i - 1] if order is None else order
    series = _binomial_series(y / data.eta, 1 / p, order)
    series = _truncated_mul(series, _exp_series(_xi_increment(t, p, order), order), order)
    for z, s in shifts:
        e = -s
        if e >= 0:
            # ((z - p) - h)^e / z^e is a polynomial in h
            factor = [comb(e, j) * (z - p) ** (e - j) * (-1) ** j / z ** e for j in range(min(e, order) + 1)]
        else:
            if z == p:
                raise PoleError(f"Miwa parameter z = {z} coincides with the Krichever point p_{i}")
            lead = 1 / (1 - p / z) ** (-e)
            factor = [c * lead for c in _binomial_series(e, -1 / (z - p), order)]
        series = _truncated_mul(series, factor, order)
    return series


def a_core(data: KricheverData, i: int, y: Any, t: TimeVector | Sequence[Any],
           shifts: Sequence[Shift] = ()) -> Any:
    """``A_i(y, t + sum s[1/z]) / (p_i^{y/eta} e^{xi(t, p_i)})``."""
    t = as_times(t)
    series = reduced_series(data, i, y, t, shifts)
    acc = 0
    for m, a in enumerate(data.coeffs[i - 1]):
        acc = acc + a * factorial(m) * series[m]
    return acc


def prefactor(data: KricheverData, i: int, y: Any, t: TimeVector) -> complex:
    """``p_i^{y/eta} e^{xi(t, p_i)}`` (principal branch)."""
    p = complex(data.p(i))
    return _power(p, complex(y) / complex(data.eta)) * cmath.exp(complex(t.xi(p)))


def a_function(data: KricheverData, i: int, x: Any, t: TimeVector | Sequence[Any],
               shifts: Sequence[Shift] = ()) -> complex:
    """``A_i(x, t) = sum_m a_{im} d_z^m (z^{x/eta} e^{xi(t,z)})|_{p_i}`` as a number."""
    t = as_times(t)
    return prefactor(data, i, x, t) * complex(a_core(data, i, x, t, shifts))


# ---------------------------------------------------------------------------
# tau-function
# ---------------------------------------------------------------------------

def _column_entry(data: KricheverData, r: int, y: Any, j: int, t: TimeVector,
                  shifts: Sequence[Shift]) -> Any:
    """Core of ``A_r(y - j eta)`` relative to the prefactor at ``y``: ``p_r^{-j} Abar_r(y - j eta)``."""
    p = data.p(r)
    scale = p ** (-j) if j <= 0 else 1 / p ** j
    return scale * a_core(data, r, y - j * data.eta, t, shifts)


def core_minor(data: KricheverData, rows: Sequence[int], cols: Sequence[int], y: Any,
               t: TimeVector | Sequence[Any], shifts: Sequence[Shift] = ()) -> Any:
    """``det[p_r^{-j} Abar_r(y - j eta)]`` over the given rows ``r`` and column shifts ``j``."""
    t = as_times(t)
    if not rows:
        return mpq(1) if data.exact and is_exact(y) else 1.0
    mat = [[_column_entry(data, r, y, j, t, shifts) for j in cols] for r in rows]
    return det_bareiss(mat)


def tau_core(data: KricheverData, x: Any, t: TimeVector | Sequence[Any],
             shifts: Sequence[Shift] = ()) -> Any:
    """``tau(x, t + shifts) / prod_r p_r^{x/eta} e^{xi(t, p_r)}`` (exact for rational input)."""
    n = data.n
    return core_minor(data, range(1, n + 1), range(1, n + 1), x, t, shifts)


def total_prefactor(data: KricheverData, x: Any, t: TimeVector) -> complex:
    out = 1.0 + 0j
    for i in range(1, data.n + 1):
        out *= prefactor(data, i, x, t)
    return out


def tau(data: KricheverData, x: Any, t: TimeVector | Sequence[Any]) -> complex:
    """``det_{i,j} A_i(x - j eta, t)`` as a number."""
    t = as_times(t)
    return total_prefactor(data, x, t) * complex(tau_core(data, x, t))


def interpolate_core(fn, degree: int, exact: bool) -> list:
    """Coefficients of a polynomial of known degree bound from its values."""
    pts = [mpq(k) for k in range(degree + 1)] if exact else [complex(k) for k in range(degree + 1)]
    return ptrim(pinterp(pts, [fn(x) for x in pts]))


def tau_quasipoly(data: KricheverData, t: TimeVector | Sequence[Any]) -> QuasiPolynomial:
    """``tau(x, t)`` as ``(p_1 .. p_n)^{x/eta} poly(x)``.

    The polynomial part is interpolated through ``N + 1`` abscissas; for
    ``t != 0`` it carries the numeric factor ``exp(sum_i xi(t, p_i))``.
    """
    t = as_times(t)
    exact = data.exact and all(is_exact(v) for v in t.values)
    poly = interpolate_core(lambda x: tau_core(data, x, t), data.N, exact)
    base = 1
    for p in data.points:
        base = base * p
    if t.nonzero_order():
        scale = cmath.exp(sum(complex(t.xi(complex(p))) for p in data.points))
        poly = [complex(c) * scale for c in poly]
    return QuasiPolynomial(base, tuple(poly), data.eta)


def dtau_core(data: KricheverData, x: Any, t: TimeVector | Sequence[Any],
              shifts: Sequence[Shift] = (), rows: Sequence[int] | None = None) -> Any:
    """``d_{t_1} tau / prefactor`` using ``d_{t_1} A_i(x) = A_i(x + eta)``.

    The derivative of the determinant is the sum over columns of the
    determinant with that column shifted by ``+eta``.
    """
    t = as_times(t)
    rows = list(range(1, data.n + 1)) if rows is None else list(rows)
    m = len(rows)
    total = 0
    for c in range(1, m + 1):
        mat = []
        for r in rows:
            row = []
            for j in range(1, m + 1):
                jj = j - 1 if j == c else j
                row.append(_column_entry(data, r, x, jj, t, shifts))
            mat.append(row)
        total = total + det_bareiss(mat)
    return total


# ---------------------------------------------------------------------------
# wave functions
# ---------------------------------------------------------------------------

def _plane_wave(x: Any, t: TimeVector, z: Any, eta: Any, sign: int) -> complex:
    return _power(complex(z), sign * complex(x) / complex(eta)) * cmath.exp(sign * complex(t.xi(complex(z))))


def wave_reduced(data: KricheverData, x: Any, t: TimeVector | Sequence[Any], z: Any,
                 form: str = "tau") -> Any:
    """``psi / (z^{x/eta} e^{xi(t,z)})`` = ``1 + w_1/z + ... + w_n/z^n``.

    ``form="tau"``: ``tau(x, t - [1/z]) / tau(x, t)``; ``form="det"``: the
    ``(n+1) x (n+1)`` Cramer determinant over ``tau``.
    """
    t = as_times(t)
    if z == 0:
        raise PoleError("wave function needs z != 0")
    den = tau_core(data, x, t)
    if den == 0:
        raise PoleError(f"tau vanishes at x = {x}")
    n = data.n
    if form == "tau":
        return tau_core(data, x, t, ((z, -1),)) / den
    if form == "det":
        inv = 1 / z
        top = [inv ** j for j in range(n + 1)]
        rows = [[_column_entry(data, r, x, j, t, ()) for j in range(n + 1)] for r in range(1, n + 1)]
        return det_bareiss([top] + rows) / den
    raise ValueError(f"unknown wave form {form!r}")


def wave(data: KricheverData, x: Any, t: TimeVector | Sequence[Any], z: Any, form: str = "tau") -> complex:
    t = as_times(t)
    return _plane_wave(x, t, z, data.eta, 1) * complex(wave_reduced(data, x, t, z, form))


def wave_coefficients(data: KricheverData, x: Any, t: TimeVector | Sequence[Any]) -> list:
    """``[1, w_1, ..., w_n]`` from the Cramer determinant form."""
    t = as_times(t)
    n = data.n
    den = tau_core(data, x, t)
    if den == 0:
        raise PoleError(f"tau vanishes at x = {x}")
    rows = [[_column_entry(data, r, x, j, t, ()) for j in range(n + 1)] for r in range(1, n + 1)]
    out = []
    for k in range(n + 1):
        minor = [[row[j] for j in range(n + 1) if j != k] for row in rows]
        out.append((-1) ** k * det_bareiss(minor) / den)
    return out


def adjoint_wave_reduced(data: KricheverData, x: Any, t: TimeVector | Sequence[Any], z: Any,
                         form: str = "tau") -> Any:
    """``psi* / (z^{-x/eta} e^{-xi(t,z)})``.

    ``form="tau"``: ``tau(x, t + [1/z]) / tau(x, t)``; ``form="det"``: the
    determinant whose first column is ``A_i(x - eta, t + [1/z])``.
    """
    t = as_times(t)
    if z == 0:
        raise PoleError("adjoint wave function needs z != 0")
    if any(z == p for p in data.points):
        raise PoleError(f"z = {z} is a pole of the adjoint wave function")
    den = tau_core(data, x, t)
    if den == 0:
        raise PoleError(f"tau vanishes at x = {x}")
    n = data.n
    if form == "tau":
        return tau_core(data, x, t, ((z, 1),)) / den
    if form == "det":
        mat = []
        for r in range(1, n + 1):
            row = [_column_entry(data, r, x, 1, t, ((z, 1),))]
            row += [_column_entry(data, r, x, j, t, ()) for j in range(2, n + 1)]
            mat.append(row)
        return det_bareiss(mat) / den
    raise ValueError(f"unknown adjoint wave form {form!r}")


def adjoint_wave(data: KricheverData, x: Any, t: TimeVector | Sequence[Any], z: Any,
                 form: str = "tau") -> complex:
    t = as_times(t)
    return _plane_wave(x, t, z, data.eta, -1) * complex(adjoint_wave_reduced(data, x, t, z, form))


def adjoint_residue(data: KricheverData, k: int, m: int, x: Any,
                    t: TimeVector | Sequence[Any]) -> Any:
    """``res_{z=p_k} [(z - p_k)^m psi*]`` times ``p_k^{x/eta} e^{xi(t, p_k)}``.

    Uses the exact expansion ``A_k(y, t + [1/z]) = sum_l C_l z / (z - p_k)^{l+1}``
    with ``C_l = l! sum_{m' >= l} a_{km'} binom(m', l) F^{(m'-l)}(p_k)``,
    ``F(zeta) = zeta^{y/eta} e^{xi(t, zeta)}``, in the Laplace expansion of
    the first column of the determinant form of ``psi*``.  The factor
    ``z^{-x/eta} e^{-xi(t,z)}`` is Taylor expanded around ``p_k``.
    """
    t = as_times(t)
    n, eta = data.n, data.eta
    p = data.p(k)
    M = data.multiplicities[k - 1]
    rows = [r for r in range(1, n + 1) if r != k]
    minor = core_minor(data, rows, range(2, n + 1), x, t)
    fbar = reduced_series(data, k, x - eta, t, (), order=M)
    gbar = reduced_series(data, k, -x, TimeVector(tuple(-v for v in t.values)), (), order=M + 1)
    zg = _truncated_mul([p, 1], gbar, M + 1)
    total = 0
    for l in range(m, M + 1):
        c_l = 0
        for mm in range(l, M + 1):
            c_l = c_l + data.coeffs[k - 1][mm] * comb(mm, l) * factorial(mm - l) * fbar[mm - l]
        total = total + factorial(l) * c_l * zg[l - m]
    # F(p) G(p) = p^{(x - eta)/eta} p^{-x/eta} = 1/p
    return (-1) ** (k - 1) * minor * total / p / tau_core(data, x, t)


def adjoint_residue_formula(data: KricheverData, k: int, m: int, x: Any, t: TimeVector | Sequence[Any]) -> Any:
    """``(-1)^{k-1} m! a_{km} Ahat_k(x - 2 eta) / tau(x)`` on the scale of :func:`adjoint_residue`."""
    t = as_times(t)
    n = data.n
    rows = [r for r in range(1, n + 1) if r != k]
    minor = core_minor(data, rows, range(2, n + 1), x, t)
    coef = data.coeffs[k - 1][m] if m < len(data.coeffs[k - 1]) else 0
    return (-1) ** (k - 1) * factorial(m) * coef * minor / tau_core(data, x, t)


# ---------------------------------------------------------------------------
# identities
# ---------------------------------------------------------------------------

def krichever_residuals(data: KricheverData, x: Any, t: TimeVector | Sequence[Any]) -> list:
    """``sum_m a_{im} d_z^m psi|_{p_i}`` for every ``i``, relative to ``p_i^{x/eta} e^{xi(t,p_i)}``.

    ``psi`` enters only through its coefficients ``w_k``; the derivatives act
    on ``z^{x/eta - k} e^{xi(t,z)}`` exactly.
    """
    t = as_times(t)
    w = wave_coefficients(data, x, t)
    out = []
    for i in range(1, data.n + 1):
        acc = 0
        for k, wk in enumerate(w):
            acc = acc + wk * _column_entry(data, i, x, k, t, ())
        out.append(acc)
    return out


def krichever_scales(data: KricheverData, x: Any, t: TimeVector | Sequence[Any]) -> list[float]:
    """Largest term ``|w_k d_z^k (...)|`` in each condition; floating residuals are judged relative to it."""
    t = as_times(t)
    w = wave_coefficients(data, x, t)
    return [max(abs(complex(wk * _column_entry(data, i, x, k, t, ()))) for k, wk in enumerate(w))
            for i in range(1, data.n + 1)]


def krichever_residuals_series(data: KricheverData, x: Any, t: TimeVector | Sequence[Any]) -> list:
    """Same conditions, applying ``d_z^m`` to the product ``(z^{x/eta} e^{xi}) * psibar(z)``.

    ``psibar`` is Taylor expanded around ``p_i`` from its values as a
    polynomial in ``1/z`` (interpolated from the tau-ratio form), so this
    route shares no algebra with the Cramer solution.
    """
    t = as_times(t)
    n = data.n
    exact = data.exact and is_exact(x) and all(is_exact(v) for v in t.values)
    nodes = [mpq(k + 2) for k in range(n + 1)] if exact else [complex(k + 2) for k in range(n + 1)]
    wvals = [wave_reduced(data, x, t, 1 / u, form="tau") for u in nodes]
    w = pinterp(nodes, wvals)      # psibar as a polynomial in u = 1/z
    out = []
    for i in range(1, data.n + 1):
        p = data.p(i)
        M = data.multiplicities[i - 1]
        # u = 1/(p + h) = (1/p) sum (-h/p)^j
        u_ser = [(1 / p) * (-1 / p) ** j for j in range(M + 1)]
        psi_ser = [0] * (M + 1)
        upow = [1] + [0] * M
        for c in w:
            psi_ser = [a + c * b for a, b in zip(psi_ser, upow)]
            upow = _truncated_mul(upow, u_ser, M)
        series = _truncated_mul(reduced_series(data, i, x, t, ()), psi_ser, M)
        acc = 0
        for m, a in enumerate(data.coeffs[i - 1]):
            acc = acc + a * factorial(m) * series[m]
        out.append(acc)
    return out


def hirota_mkp_residual(data: KricheverData, x: Any, t: TimeVector | Sequence[Any],
                        z1: Any, z2: Any) -> tuple[Any, Any]:
    """3-term Hirota-Miwa combination and the size of its largest term (core scale)."""
    t = as_times(t)
    eta = data.eta
    c = lambda y, sh=(): tau_core(data, y, t, sh)
    a = z2 * c(x + eta, ((z2, -1),)) * c(x, ((z1, -1),))
    b = z1 * c(x + eta, ((z1, -1),)) * c(x, ((z2, -1),))
    d = (z1 - z2) * c(x + eta) * c(x, ((z1, -1), (z2, -1)))
    return a - b + d, max(abs(complex(a)), abs(complex(b)), abs(complex(d)))


def diff3_residual(data: KricheverData, x: Any, t: TimeVector | Sequence[Any], z: Any) -> tuple[Any, Any]:
    """Differential-difference bilinear identity (``z_2 -> infinity`` limit)."""
    t = as_times(t)
    eta = data.eta
    sh = ((z, -1),)
    c = lambda y, s=(): tau_core(data, y, t, s)
    d = lambda y, s=(): dtau_core(data, y, t, s)
    lhs = z * c(x + eta) * c(x, sh) - z * c(x) * c(x + eta, sh)
    rhs = c(x, sh) * d(x + eta) - c(x + eta) * d(x, sh)
    return lhs - rhs, max(abs(complex(lhs)), abs(complex(rhs)), 1e-300)


def miwa_polynomial(data: KricheverData, x: Any, t: TimeVector | Sequence[Any]) -> list:
    """``tau(x, t - [1/z])`` (core scale) as a polynomial in ``u = 1/z``.

    Interpolated through ``n + 2`` nodes so a degree above ``n`` would show.
    """
    t = as_times(t)
    n = data.n
    exact = data.exact and is_exact(x) and all(is_exact(v) for v in t.values)
    nodes = [mpq(k + 2, 3) for k in range(n + 2)] if exact else [complex(k + 2) / 3 for k in range(n + 2)]
    vals = [tau_core(data, x, t, ((1 / u, -1),)) for u in nodes]
    return ptrim(pinterp(nodes, vals))
