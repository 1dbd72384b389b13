"""Dense operators on ``(C^n)^{\\otimes N}`` and polynomials with operator coefficients.

Operators are plain 2-d numpy arrays.  Exact operators use ``dtype=object``
with rational entries, floating ones use complex128.  Basis vectors are the
C-ordered flattening of tensors of shape ``(n,)*N``, so site 1 is the most
significant index.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Any, Sequence

import numpy as np

from ..exact import pdivmod, pinterp, ptrim


# ---------------------------------------------------------------------------
# basis bookkeeping
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def basis_states(n: int, N: int) -> tuple[tuple[int, ...], ...]:
    return tuple(product(range(n), repeat=N))


@lru_cache(maxsize=None)
def weight_sectors(n: int, N: int) -> tuple[tuple[tuple[int, ...], np.ndarray], ...]:
    """Weight blocks ``(M_1..M_n) -> flat basis indices``, ordered by decreasing weight."""
    blocks: dict[tuple[int, ...], list[int]] = {}
    for k, s in enumerate(basis_states(n, N)):
        w = tuple(s.count(a) for a in range(n))
        blocks.setdefault(w, []).append(k)
    return tuple((w, np.array(idx, dtype=np.intp)) for w, idx in sorted(blocks.items(), reverse=True))


def sector_indices(n: int, N: int) -> tuple[np.ndarray, ...]:
    return tuple(idx for _, idx in weight_sectors(n, N))


def zeros(dim: int, exact: bool) -> np.ndarray:
    if exact:
        out = np.empty((dim, dim), dtype=object)
        out.fill(0)
        return out
    return np.zeros((dim, dim), dtype=complex)


def identity(dim: int, exact: bool) -> np.ndarray:
    out = zeros(dim, exact)
    for k in range(dim):
        out[k, k] = 1
    return out


def sparse_entries(op: np.ndarray) -> dict[tuple[int, int], Any]:
    """Nonzero entries of an operator as a ``(row, col) -> value`` map."""
    rows, cols = np.nonzero(op != 0)
    return {(int(r), int(c)): op[r, c] for r, c in zip(rows, cols)}


def is_zero_op(op: np.ndarray, tol: float = 0.0) -> bool:
    if op.dtype == object:
        return not np.any(op != 0)
    return float(np.max(np.abs(op), initial=0.0)) <= tol


def max_abs(op: np.ndarray) -> float:
    if op.size == 0:
        return 0.0
    if op.dtype == object:
        return max((abs(float(v)) for v in op.flat), default=0.0)
    return float(np.max(np.abs(op)))


def block_matmul(a: np.ndarray, b: np.ndarray, sectors: Sequence[np.ndarray] | None) -> np.ndarray:
    """Product of two operators that preserve the given blocks."""
    if sectors is None:
        return a @ b
    out = zeros(a.shape[0], a.dtype == object) if a.dtype == object else np.zeros_like(a, dtype=np.result_type(a, b))
    for idx in sectors:
        ix = np.ix_(idx, idx)
        out[ix] = a[ix] @ b[ix]
    return out


def permutation_operator(n: int, N: int, i: int, j: int, exact: bool = True) -> np.ndarray:
    """``P_ij`` exchanging tensor factors ``i`` and ``j`` (1-based)."""
    dim = n ** N
    eye = identity(dim, exact)
    t = eye.reshape((n,) * N + (dim,))
    return np.swapaxes(t, i - 1, j - 1).reshape(dim, dim).copy()


def site_operator(local: np.ndarray, N: int, i: int) -> np.ndarray:
    """``local`` acting on tensor factor ``i`` (1-based)."""
    n = local.shape[0]
    exact = local.dtype == object
    left = identity(n ** (i - 1), exact)
    right = identity(n ** (N - i), exact)
    return np.kron(np.kron(left, local), right)


def unit_matrix(n: int, a: int, b: int, exact: bool = True) -> np.ndarray:
    """``e_ab`` with 0-based indices."""
    out = zeros(n, exact)
    out[a, b] = 1
    return out


# ---------------------------------------------------------------------------
# operator valued polynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class OperatorPolynomial:
    """``sum_k coeffs[k] x^k`` with operator coefficients of a common size.

    ``sectors`` optionally lists blocks preserved by every coefficient; products
    then only multiply the blocks.
    """

    coeffs: tuple[np.ndarray, ...]
    sectors: tuple[np.ndarray, ...] | None = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))
        if not self.coeffs:
            raise ValueError("an operator polynomial needs at least one coefficient")

    # construction -----------------------------------------------------------
    @classmethod
    def scalar(cls, poly: Sequence[Any], dim: int, exact: bool = True,
               sectors: tuple[np.ndarray, ...] | None = None) -> "OperatorPolynomial":
        eye = identity(dim, exact)
        poly = list(poly) or [0]
        return cls(tuple(eye * c for c in poly), sectors)

    @classmethod
    def zero(cls, dim: int, exact: bool = True, sectors=None) -> "OperatorPolynomial":
        return cls((zeros(dim, exact),), sectors)

    @classmethod
    def from_samples(cls, xs: Sequence[Any], values: Sequence[np.ndarray],
                     sectors=None) -> "OperatorPolynomial":
        return cls(tuple(pinterp(list(xs), list(values))), sectors)

    # basic properties -------------------------------------------------------
    @property
    def dim(self) -> int:
        return self.coeffs[0].shape[0]

    @property
    def exact(self) -> bool:
        return self.coeffs[0].dtype == object

    @property
    def degree(self) -> int:
        for k in range(len(self.coeffs) - 1, -1, -1):
            if not is_zero_op(self.coeffs[k]):
                return k
        return -1

    def __call__(self, x: Any) -> np.ndarray:
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * x + c
        return acc

    def trimmed(self) -> "OperatorPolynomial":
        d = max(self.degree, 0)
        return OperatorPolynomial(self.coeffs[: d + 1], self.sectors)

    def _with(self, coeffs) -> "OperatorPolynomial":
        return OperatorPolynomial(tuple(coeffs), self.sectors)

    # arithmetic -------------------------------------------------------------
    def __add__(self, other: "OperatorPolynomial") -> "OperatorPolynomial":
        a, b = list(self.coeffs), list(other.coeffs)
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, c in enumerate(b):
            out[k] = out[k] + c
        return OperatorPolynomial(tuple(out), self.sectors or other.sectors)

    def __neg__(self) -> "OperatorPolynomial":
        return self._with(-c for c in self.coeffs)

    def __sub__(self, other: "OperatorPolynomial") -> "OperatorPolynomial":
        return self + (-other)

    def scale(self, s: Any) -> "OperatorPolynomial":
        return self._with(c * s for c in self.coeffs)

    def __matmul__(self, other: "OperatorPolynomial") -> "OperatorPolynomial":
        sectors = self.sectors or other.sectors
        out: list = [None] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if is_zero_op(a):
                continue
            for j, b in enumerate(other.coeffs):
                if is_zero_op(b):
                    continue
                term = block_matmul(a, b, sectors)
                out[i + j] = term if out[i + j] is None else out[i + j] + term
        zero = zeros(self.dim, self.exact)
        return OperatorPolynomial(tuple(zero if c is None else c for c in out), sectors)

    def times_scalar_poly(self, poly: Sequence[Any]) -> "OperatorPolynomial":
        out: list = [None] * (len(self.coeffs) + len(poly) - 1)
        for i, a in enumerate(self.coeffs):
            for j, s in enumerate(poly):
                if s == 0:
                    continue
                term = a * s
                out[i + j] = term if out[i + j] is None else out[i + j] + term
        zero = zeros(self.dim, self.exact)
        return self._with(zero if c is None else c for c in out)

    def shift(self, c: Any) -> "OperatorPolynomial":
        """The polynomial ``x -> P(x + c)``."""
        out = list(self.coeffs)
        n = len(out)
        for i in range(n - 1):
            for k in range(n - 2, i - 1, -1):
                out[k] = out[k] + out[k + 1] * c
        return self._with(out)

    def divmod_scalar(self, poly: Sequence[Any]) -> tuple["OperatorPolynomial", "OperatorPolynomial"]:
        """Entrywise exact division by a scalar polynomial."""
        quo, rem = pdivmod(list(self.coeffs), list(poly))
        zero = zeros(self.dim, self.exact)
        quo = quo or [zero]
        rem = rem or [zero]
        return self._with(quo), self._with(rem)

    def restrict(self, idx: np.ndarray) -> "OperatorPolynomial":
        ix = np.ix_(idx, idx)
        return OperatorPolynomial(tuple(c[ix] for c in self.coeffs))

    # comparisons ------------------------------------------------------------
    def is_zero(self, tol: float = 0.0) -> bool:
        return all(is_zero_op(c, tol) for c in self.coeffs)

    def equals(self, other: "OperatorPolynomial", tol: float = 0.0) -> bool:
        return (self - other).is_zero(tol)

    def max_abs_coefficient(self) -> float:
        return max(max_abs(c) for c in self.coeffs)

    def commutes_with(self, other: "OperatorPolynomial", points: Sequence[Any]) -> bool:
        for x in points:
            a, b = self(x), other(x)
            if not is_zero_op(a @ b - b @ a):
                return False
        return True


def scalar_poly_of(op_poly: OperatorPolynomial) -> list | None:
    """If every coefficient is a multiple of the identity return the scalars."""
    out = []
    for c in op_poly.coeffs:
        s = c[0, 0]
        if not is_zero_op(c - identity(c.shape[0], c.dtype == object) * s):
            return None
        out.append(s)
    return ptrim(out)
