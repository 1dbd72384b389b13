"""Exact scalars, dense univariate polynomials and small determinants.

Polynomials are plain lists of coefficients in ascending order.  Every helper
here is written against the ring operations only, so the same code runs on
``gmpy2.mpq`` rationals, Python complex numbers, numpy arrays (operator valued
coefficients) or the multivariate polynomials of :mod:`qcduality.mpoly`.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Any, Callable, Sequence

import gmpy2
import numpy as np

mpq = gmpy2.mpq
MPQ_TYPE = type(mpq(0))


class RationalParseError(ValueError):
    """A value could not be read as an exact rational number."""


class SingularInterpolationError(ValueError):
    """Interpolation abscissas are not pairwise distinct."""


# ---------------------------------------------------------------------------
# scalars
# ---------------------------------------------------------------------------

def is_exact(value: Any) -> bool:
    return isinstance(value, (int, MPQ_TYPE, Fraction)) and not isinstance(value, bool)


def all_exact(values) -> bool:
    return all(is_exact(v) for v in values)


def parse_rational(value: Any) -> MPQ_TYPE:
    """Read ``value`` as an exact rational.

    Accepts ints, fractions, ``mpq`` and strings such as ``"-3/7"``, ``"5"`` or
    ``"0.25"``.  Floats and bools are refused so that exactness is never lost
    silently.
    """
    if isinstance(value, bool):
        raise RationalParseError(f"boolean {value!r} is not a rational number")
    if isinstance(value, MPQ_TYPE):
        return value
    if isinstance(value, int):
        return mpq(value)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            num, _, den = text.partition("/")
            try:
                num_i, den_i = int(num.strip()), int(den.strip())
            except ValueError:
                raise RationalParseError(f"malformed rational {value!r}") from None
            if den_i == 0:
                raise RationalParseError(f"malformed rational {value!r} (zero denominator)")
            return mpq(num_i, den_i)
        try:
            frac = Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise RationalParseError(f"malformed rational {value!r}") from None
        return mpq(frac.numerator, frac.denominator)
    raise RationalParseError(f"cannot read {value!r} of type {type(value).__name__} as a rational")


def to_complex(value: Any) -> complex:
    return complex(value)


def format_scalar(value: Any) -> Any:
    """JSON friendly rendering: rationals as ``"a/b"`` strings, complex as pairs."""
    if is_exact(value):
        return str(mpq(value)) if not isinstance(value, int) else str(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    return float(value)


def common_denominator(values: Sequence[Any]) -> int:
    den = 1
    for v in values:
        den = int(gmpy2.lcm(den, mpq(v).denominator))
    return den


# ---------------------------------------------------------------------------
# univariate polynomials, ascending coefficient lists
# ---------------------------------------------------------------------------

def _is_zero(c: Any) -> bool:
    if isinstance(c, np.ndarray):
        return not np.any(c != 0)
    return c == 0


def ptrim(p: Sequence[Any]) -> list:
    out = list(p)
    while out and _is_zero(out[-1]):
        out.pop()
    return out


def pdegree(p: Sequence[Any]) -> int:
    return len(ptrim(p)) - 1


def padd(a: Sequence[Any], b: Sequence[Any]) -> list:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for k, c in enumerate(b):
        out[k] = out[k] + c
    return out


def pneg(a: Sequence[Any]) -> list:
    return [-c for c in a]


def psub(a: Sequence[Any], b: Sequence[Any]) -> list:
    return padd(a, pneg(b))


def pscale(a: Sequence[Any], s: Any) -> list:
    return [c * s for c in a]


def pmul(a: Sequence[Any], b: Sequence[Any], mul: Callable[[Any, Any], Any] | None = None) -> list:
    if not a or not b:
        return []
    mul = mul or (lambda u, v: u * v)
    out: list = [None] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        for j, cb in enumerate(b):
            term = mul(ca, cb)
            out[i + j] = term if out[i + j] is None else out[i + j] + term
    return out


def peval(p: Sequence[Any], x: Any) -> Any:
    if not p:
        return 0
    acc = p[-1]
    for c in reversed(p[:-1]):
        acc = acc * x + c
    return acc


def pshift(p: Sequence[Any], c: Any) -> list:
    """Coefficients of ``p(x + c)``."""
    out = [q for q in p]
    n = len(out)
    # repeated synthetic division (Horner's Taylor shift)
    for i in range(n - 1):
        for k in range(n - 2, i - 1, -1):
            out[k] = out[k] + c * out[k + 1]
    return out


def pderiv(p: Sequence[Any]) -> list:
    return [k * p[k] for k in range(1, len(p))]


def pfrom_roots(roots: Sequence[Any], one: Any = 1) -> list:
    out = [one]
    for r in roots:
        out = pmul(out, [-r, one])
    return out


def pdivmod(a: Sequence[Any], b: Sequence[Any]) -> tuple[list, list]:
    """Long division ``a = q b + r`` with ``deg r < deg b`` (field coefficients)."""
    b = ptrim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(ptrim(a))
    db = len(b) - 1
    if len(rem) - 1 < db:
        return [], rem
    quo: list = [0] * (len(rem) - db)
    lead = b[-1]
    for k in range(len(rem) - 1 - db, -1, -1):
        coef = rem[k + db] / lead
        quo[k] = coef
        for j, cb in enumerate(b):
            rem[k + j] = rem[k + j] - coef * cb
    return quo, ptrim(rem[:db])


def pgcd(a: Sequence[Any], b: Sequence[Any]) -> list:
    """Monic greatest common divisor over a field (Euclid)."""
    a, b = ptrim(list(a)), ptrim(list(b))
    while b:
        a, b = b, pdivmod(a, b)[1]
    if not a:
        return []
    lead = a[-1]
    return [c / lead for c in a]


def pinterp(xs: Sequence[Any], ys: Sequence[Any]) -> list:
    """Coefficients of the interpolant through ``(xs[k], ys[k])``.

    The values may be scalars or numpy arrays (entrywise interpolation).
    Newton divided differences; exact when the inputs are exact.
    """
    m = len(xs)
    if len(set(xs)) != m:
        raise SingularInterpolationError("interpolation abscissas must be distinct")
    coef = list(ys)
    for level in range(1, m):
        for k in range(m - 1, level - 1, -1):
            coef[k] = (coef[k] - coef[k - 1]) / (xs[k] - xs[k - level])
    poly = [coef[-1]]
    for k in range(m - 2, -1, -1):
        # poly <- poly * (x - xs[k]) + coef[k]
        shifted = [c * 0 for c in poly[:1]] + poly
        for i in range(len(poly)):
            shifted[i] = shifted[i] - xs[k] * poly[i]
        shifted[0] = shifted[0] + coef[k]
        poly = shifted
    return poly


# ---------------------------------------------------------------------------
# determinants and characteristic polynomials
# ---------------------------------------------------------------------------

def det_bareiss(matrix: Sequence[Sequence[Any]]) -> Any:
    """Fraction-free Gaussian elimination over an exact commutative field."""
    a = [list(row) for row in matrix]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0 * a[0][0]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def det_laplace(matrix: Sequence[Sequence[Any]],
                mul: Callable[[Any, Any], Any] | None = None,
                zero: Any = 0, one: Any = 1) -> Any:
    """Division-free determinant by cofactor expansion along the rows.

    Products are taken in row order, so for commuting operator entries (for
    example weight blocks of commuting transfer matrices) the result is the
    usual determinant.  Minors are memoized on their column sets.
    """
    n = len(matrix)
    if n == 0:
        return one
    mul = mul or (lambda u, v: u * v)
    memo: dict[tuple[int, ...], Any] = {}

    def minor(cols: tuple[int, ...]) -> Any:
        row = n - len(cols)
        if not cols:
            return one
        if cols in memo:
            return memo[cols]
        total = zero
        for pos, c in enumerate(cols):
            entry = matrix[row][c]
            if _is_zero(entry):
                continue
            rest = cols[:pos] + cols[pos + 1:]
            term = mul(entry, minor(rest))
            total = total + term if pos % 2 == 0 else total - term
        memo[cols] = total
        return total

    return minor(tuple(range(n)))


def charpoly(matrix: Sequence[Sequence[Any]]) -> list:
    """Coefficients ``[1, c_1, ..., c_N]`` of ``det(z I - A) = z^N + c_1 z^{N-1} + ...``.

    Berkowitz's division-free recursion, valid over any commutative ring.
    """
    a = [list(row) for row in matrix]
    n = len(a)
    poly: list = [1]
    for k in range(n):
        row = a[k][:k]
        col = [a[i][k] for i in range(k)]
        items = [1, -a[k][k]]
        v = col
        for _ in range(k):
            items.append(-sum((row[i] * v[i] for i in range(k)), 0 * a[k][k]))
            v = [sum((a[i][j] * v[j] for j in range(k)), 0 * a[k][k]) for i in range(k)]
        new = []
        for i in range(k + 2):
            acc = 0 * a[k][k]
            for j in range(min(i, k) + 1):
                if j < len(poly):
                    acc = acc + items[i - j] * poly[j]
            new.append(acc)
        new[0] = 1
        poly = new
    return poly


def principal_minor_sums(matrix: Sequence[Sequence[Any]], k: int) -> Any:
    """Sum of all ``k x k`` principal minors (the k-th elementary class function)."""
    n = len(matrix)
    total = 0
    for idx in combinations(range(n), k):
        sub = [[matrix[i][j] for j in idx] for i in idx]
        total = total + det_laplace(sub)
    return total


def nullspace(matrix: Sequence[Sequence[Any]]) -> list[list]:
    """Kernel basis of a matrix over an exact field by reduced row echelon form."""
    a = [list(row) for row in matrix]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [v * inv for v in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [u - f * v for u, v in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    basis = []
    for free in (c for c in range(cols) if c not in pivots):
        vec = [mpq(0)] * cols
        vec[free] = mpq(1)
        for i, c in enumerate(pivots):
            vec[c] = -a[i][free]
        basis.append(vec)
    return basis
