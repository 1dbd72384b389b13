"""Higher transfer matrices from characters through the co-derivative.

``D^a_b = sum_c g^a_c d/dg^b_c`` and ``D_i f = sum_ab e_ab^{(i)} D^a_b f``.
The transfer matrix for a partition ``lam`` is obtained by applying
``(x - x_N + eta D_N) ... (x - x_1 + eta D_1)`` to the character
``chi_lam(g)`` of the full twist matrix and evaluating at ``g = diag(p)``.

Twist-entry monomials are exponent tuples of length ``n*n``; position
``a*n + b`` holds the power of ``g^a_b`` (row ``a``, column ``b``).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Sequence

import numpy as np

from ..exact import common_denominator, det_laplace, mpq, principal_minor_sums
from ..mpoly import MPoly
from ..symfun import Partition, TimeVector, as_partition, conjugate, schur
from .chain import ChainSpec, check_dimension
from .operators import OperatorPolynomial, identity, zeros

Monomial = tuple[int, ...]


# ---------------------------------------------------------------------------
# polynomials in twist entries with operator coefficients
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TwistPolynomial:
    """``sum_m coeff_m * g^m`` with operator coefficients on ``nsites`` tensor slots."""

    n: int
    nsites: int
    terms: dict

    @classmethod
    def from_mpoly(cls, poly: MPoly, n: int) -> "TwistPolynomial":
        terms = {}
        for mono, c in poly.terms.items():
            arr = np.empty((1, 1), dtype=object)
            arr[0, 0] = c
            terms[mono] = arr
        return cls(n, 0, terms)

    @classmethod
    def twist_on_slot(cls, n: int, slot: int, nsites: int) -> "TwistPolynomial":
        """``g_slot = sum_ab g^a_b e_ab^{(slot)}``."""
        terms = {}
        for a in range(n):
            for b in range(n):
                local = zeros(n, True)
                local[a, b] = 1
                op = np.kron(np.kron(identity(n ** (slot - 1), True), local),
                             identity(n ** (nsites - slot), True))
                mono = [0] * (n * n)
                mono[a * n + b] = 1
                terms[tuple(mono)] = op
        return cls(n, nsites, terms)

    def extend(self, nsites: int) -> "TwistPolynomial":
        if nsites == self.nsites:
            return self
        eye = identity(self.n ** (nsites - self.nsites), True)
        return TwistPolynomial(self.n, nsites, {m: np.kron(c, eye) for m, c in self.terms.items()})

    def __add__(self, other: "TwistPolynomial") -> "TwistPolynomial":
        k = max(self.nsites, other.nsites)
        a, b = self.extend(k), other.extend(k)
        terms = dict(a.terms)
        for m, c in b.terms.items():
            terms[m] = terms[m] + c if m in terms else c
        return TwistPolynomial(self.n, k, terms)

    def __neg__(self) -> "TwistPolynomial":
        return TwistPolynomial(self.n, self.nsites, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "TwistPolynomial") -> "TwistPolynomial":
        return self + (-other)

    def left_multiply(self, op: np.ndarray) -> "TwistPolynomial":
        """Multiply every coefficient on the left by a g-independent operator."""
        return TwistPolynomial(self.n, self.nsites, {m: op @ c for m, c in self.terms.items()})

    def is_zero(self) -> bool:
        return all(not np.any(c != 0) for c in self.terms.values())

    def equals(self, other: "TwistPolynomial") -> bool:
        return (self - other).is_zero()

    def evaluate(self, g: Sequence[Sequence[Any]]) -> np.ndarray:
        n = self.n
        flat = [g[a][b] for a in range(n) for b in range(n)]
        out = zeros(n ** self.nsites, True)
        for mono, c in self.terms.items():
            w = mpq(1)
            for v, e in zip(flat, mono):
                if e:
                    w = w * mpq(v) ** e
            out = out + c * w
        return out


def coderivative_apply(poly: TwistPolynomial, site: int) -> TwistPolynomial:
    """``D_site`` acting on a twist polynomial; ``site`` is 1-based.

    The matrix unit ``e_ab`` multiplies the coefficient from the left in tensor
    slot ``site`` (appending slots as needed).
    """
    n = poly.n
    K = max(poly.nsites, site)
    base = poly.extend(K)
    dim = n ** K
    out: dict = {}
    for mono, coef in base.terms.items():
        tens = coef.reshape((n,) * K + (dim,))
        for idx, e in enumerate(mono):
            if not e:
                continue
            b, c = divmod(idx, n)
            rows_b = np.take(tens, b, axis=site - 1)
            for a in range(n):
                new = list(mono)
                new[idx] -= 1
                new[a * n + c] += 1
                new = tuple(new)
                block = np.zeros((n,) * K + (dim,), dtype=object)
                index = [slice(None)] * (K + 1)
                index[site - 1] = a
                block[tuple(index)] = rows_b * e
                flat = block.reshape(dim, dim)
                out[new] = out[new] + flat if new in out else flat
    return TwistPolynomial(n, K, out)


# ---------------------------------------------------------------------------
# characters as polynomials in twist entries
# ---------------------------------------------------------------------------

def _twist_variables(n: int) -> list[list[MPoly]]:
    return [[MPoly.variable(n * n, a * n + b) for b in range(n)] for a in range(n)]


@lru_cache(maxsize=None)
def elementary_class_functions(n: int) -> tuple[MPoly, ...]:
    """``e_k(g)``: sums of principal ``k x k`` minors of the generic matrix, ``k = 0..n``."""
    g = _twist_variables(n)
    out = [MPoly.constant(n * n, 1)]
    for k in range(1, n + 1):
        out.append(principal_minor_sums(g, k))
    return tuple(out)


@lru_cache(maxsize=None)
def complete_class_functions(n: int, kmax: int) -> tuple[MPoly, ...]:
    """``h_k(g)`` for ``k = 0..kmax`` from ``sum_i (-1)^i e_i h_{k-i} = 0``."""
    e = elementary_class_functions(n)
    h = [MPoly.constant(n * n, 1)]
    for k in range(1, kmax + 1):
        acc = MPoly(n * n)
        for i in range(1, min(k, n) + 1):
            term = e[i] * h[k - i]
            acc = acc + term if i % 2 == 1 else acc - term
        h.append(acc)
    return tuple(h)


@lru_cache(maxsize=None)
def power_sum_traces(n: int, kmax: int) -> tuple[MPoly, ...]:
    """``tr g^k`` for ``k = 1..kmax`` as polynomials in the entries."""
    g = _twist_variables(n)
    power = g
    out = []
    for k in range(1, kmax + 1):
        if k > 1:
            power = [[sum((power[i][l] * g[l][j] for l in range(n)), MPoly(n * n))
                      for j in range(n)] for i in range(n)]
        out.append(sum((power[i][i] for i in range(n)), MPoly(n * n)))
    return tuple(out)


@lru_cache(maxsize=None)
def character_polynomial(n: int, lam: Partition, method: str = "minors") -> MPoly:
    """``chi_lam(g)`` expanded in the entries of a generic ``n x n`` matrix.

    ``method="minors"`` uses Jacobi-Trudi over ``h_k(g)``/``e_k(g)`` built from
    principal minors; ``method="traces"`` evaluates the Schur polynomial at the
    power-sum times ``t_k = tr(g^k) / k``.  Both give the same class function.
    """
    lam = as_partition(lam)
    nv = n * n
    if lam.length > n:
        return MPoly(nv)
    if lam.size == 0:
        return MPoly.constant(nv, 1)
    if method == "traces":
        traces = power_sum_traces(n, lam.size)
        t = TimeVector(tuple(tr / k for k, tr in enumerate(traces, start=1)))
        out = schur(lam, t)
        return MPoly(nv, {m: mpq(c) for m, c in out.terms.items()})
    if method != "minors":
        raise ValueError(f"unknown character method {method!r}")
    ell, width = lam.length, lam.parts[0]
    if width < ell:
        e = elementary_class_functions(n)
        lamc = conjugate(lam)

        def entry(i: int, j: int) -> MPoly:
            k = lamc.part(i) - i + j
            return e[k] if 0 <= k <= n else MPoly(nv)

        mat = [[entry(i, j) for j in range(1, width + 1)] for i in range(1, width + 1)]
    else:
        h = complete_class_functions(n, lam.size)

        def entry(i: int, j: int) -> MPoly:
            k = lam.part(i) - i + j
            return h[k] if k >= 0 else MPoly(nv)

        mat = [[entry(i, j) for j in range(1, ell + 1)] for i in range(1, ell + 1)]
    return det_laplace(mat, zero=MPoly(nv), one=MPoly.constant(nv, 1))


# ---------------------------------------------------------------------------
# transfer matrices for arbitrary partitions
# ---------------------------------------------------------------------------

def _offdiag(mono: Monomial, n: int) -> int:
    return sum(e for idx, e in enumerate(mono) if e and idx // n != idx % n)


def coderivative_chain(n: int, shifts: Sequence[int], step: int,
                       character: MPoly) -> dict[Monomial, np.ndarray]:
    """Apply ``prod_k (y - shifts[k] + step D_{k+1})`` (site 1 first) to a character.

    Integer data only.  Monomials that cannot return to the diagonal within the
    remaining steps are dropped, since they vanish at a diagonal twist.  Returns
    the surviving (diagonal) monomials with coefficient arrays of shape
    ``(N + 1, n^N, n^N)`` indexed by the power of ``y``.
    """
    N = len(shifts)
    state: dict[Monomial, np.ndarray] = {}
    for mono, c in character.terms.items():
        if _offdiag(mono, n) <= N:
            arr = np.empty((1, 1, 1), dtype=object)
            arr[0, 0, 0] = int(c)
            state[mono] = arr
    for k in range(N):
        remaining = N - k - 1
        D = n ** k
        new: dict[Monomial, np.ndarray] = {}

        def slot(mono: Monomial) -> np.ndarray:
            if mono not in new:
                new[mono] = np.zeros((k + 2, D, n, D, n), dtype=object)
            return new[mono]

        for mono, C in state.items():
            if _offdiag(mono, n) <= remaining:
                A = slot(mono)
                shifted = C * shifts[k]
                for a in range(n):
                    A[1:, :, a, :, a] += C
                    A[:-1, :, a, :, a] -= shifted
            for idx, e in enumerate(mono):
                if not e:
                    continue
                b, c = divmod(idx, n)
                scaled = C * (step * e)
                for a in range(n):
                    m2 = list(mono)
                    m2[idx] -= 1
                    m2[a * n + c] += 1
                    m2 = tuple(m2)
                    if _offdiag(m2, n) > remaining:
                        continue
                    slot(m2)[:-1, :, a, :, b] += scaled
        state = {m: A.reshape(k + 2, D * n, D * n) for m, A in new.items()}
    return state


@lru_cache(maxsize=256)
def transfer_lambda(spec: ChainSpec, lam: Partition) -> OperatorPolynomial:
    """``T_lam(x) = (x - x_N + eta D_N) ... (x - x_1 + eta D_1) chi_lam(g)`` at ``g = diag(p)``."""
    lam = as_partition(lam)
    check_dimension(spec)
    if not spec.exact:
        raise ValueError("transfer_lambda needs an exact (rational) chain specification")
    n, N = spec.n, spec.N
    dim = spec.dim
    if lam.length > n:
        return OperatorPolynomial.zero(dim, True, spec.sectors())
    q = common_denominator(spec.x + (spec.eta,))
    shifts = [int(mpq(q) * v) for v in spec.x]
    step = int(mpq(q) * spec.eta)
    state = coderivative_chain(n, shifts, step, character_polynomial(n, lam))
    coeffs = [zeros(dim, True) for _ in range(N + 1)]
    for mono, C in state.items():
        weight = mpq(1)
        for a in range(n):
            e = mono[a * n + a]
            if e:
                weight = weight * spec.p[a] ** e
        for j in range(N + 1):
            coeffs[j] = coeffs[j] + C[j] * weight
    qq = mpq(q)
    for j in range(N + 1):
        coeffs[j] = coeffs[j] * qq ** (j - N)
    return OperatorPolynomial(tuple(coeffs), spec.sectors())


def fundamental_transfer(spec: ChainSpec, a: int) -> OperatorPolynomial:
    """``T^a = T_{(1^a)}`` with ``T^0 = phi``; zero for ``a > n`` or ``a < 0``."""
    if a < 0 or a > spec.n:
        return OperatorPolynomial.zero(spec.dim, True, spec.sectors())
    return transfer_lambda(spec, Partition((1,) * a))


def row_transfer(spec: ChainSpec, s: int) -> OperatorPolynomial:
    """``T_s = T_{(s)}`` with ``T_0 = phi``; zero for ``s < 0``."""
    if s < 0:
        return OperatorPolynomial.zero(spec.dim, True, spec.sectors())
    return transfer_lambda(spec, Partition((s,)))
