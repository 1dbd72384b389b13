"""Twisted inhomogeneous GL(n) chain: R-matrix, transfer matrix, Hamiltonians.

Operators are built matrix-free: ``R_0i(u) = u + eta P_0i`` acts on tensors by
an axis swap, so transfer matrices are assembled column block by column block.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Sequence

import numpy as np

from ..exact import all_exact, is_exact, mpq, parse_rational, pfrom_roots
from .operators import (OperatorPolynomial, basis_states, identity, permutation_operator,
                        sector_indices, site_operator, weight_sectors, zeros)

MAX_DIMENSION = 4096


class DegenerateSpecError(ValueError):
    """Chain parameters violate a non-degeneracy condition."""


class BudgetError(RuntimeError):
    """A requested computation exceeds a configured size budget."""


def _scalar(v: Any) -> Any:
    if isinstance(v, str):
        return parse_rational(v)
    if is_exact(v):
        return mpq(v)
    if isinstance(v, (np.floating, np.complexfloating)):
        return complex(v) if isinstance(v, np.complexfloating) else float(v)
    return v


@dataclass(frozen=True)
class ChainSpec:
    """Rank ``n``, ``N`` sites, shift ``eta``, inhomogeneities ``x`` and twist ``diag(p)``.

    Exact rationals are stored as ``mpq``; floats or complex numbers select the
    floating backend.  ``p`` lists the twist eigenvalues in the order used by
    every routine of the package; use :meth:`from_g` for the reversed ordering.
    """

    n: int
    N: int
    eta: Any
    x: tuple
    p: tuple

    def __post_init__(self):
        object.__setattr__(self, "eta", _scalar(self.eta))
        object.__setattr__(self, "x", tuple(_scalar(v) for v in self.x))
        object.__setattr__(self, "p", tuple(_scalar(v) for v in self.p))
        if self.n < 1 or self.N < 1:
            raise DegenerateSpecError("need n >= 1 and N >= 1")
        if len(self.x) != self.N:
            raise DegenerateSpecError(f"expected {self.N} inhomogeneities, got {len(self.x)}")
        if len(self.p) != self.n:
            raise DegenerateSpecError(f"expected {self.n} twist eigenvalues, got {len(self.p)}")
        if self.eta == 0:
            raise DegenerateSpecError("eta must be nonzero")
        if any(v == 0 for v in self.p):
            raise DegenerateSpecError("twist eigenvalues must be nonzero")
        if len(set(self.p)) != self.n:
            raise DegenerateSpecError("twist eigenvalues must be pairwise distinct")
        for i in range(self.N):
            for j in range(i + 1, self.N):
                d = self.x[i] - self.x[j]
                if d == 0:
                    raise DegenerateSpecError(f"x_{i + 1} = x_{j + 1}")
                if d == self.eta or d == -self.eta:
                    raise DegenerateSpecError(f"x_{i + 1} - x_{j + 1} = +-eta")

    @classmethod
    def from_g(cls, n: int, N: int, eta, x, g) -> "ChainSpec":
        """Build from twist eigenvalues ``g_1..g_n`` with ``p_m = g_{n-m+1}``."""
        return cls(n, N, eta, tuple(x), tuple(reversed(tuple(g))))

    @property
    def exact(self) -> bool:
        return all_exact((self.eta,) + self.x + self.p)

    @property
    def dim(self) -> int:
        return self.n ** self.N

    def numeric(self) -> "ChainSpec":
        return ChainSpec(self.n, self.N, complex(self.eta), tuple(complex(v) for v in self.x),
                         tuple(complex(v) for v in self.p))

    def phi(self) -> list:
        """Coefficients of ``phi(x) = prod_i (x - x_i)``."""
        return pfrom_roots(self.x, one=mpq(1) if self.exact else 1.0)

    def phi_at(self, x: Any) -> Any:
        out = 1
        for xi in self.x:
            out = out * (x - xi)
        return out

    def trace_g(self) -> Any:
        return sum(self.p[1:], self.p[0])

    def det_g(self) -> Any:
        out = self.p[0]
        for v in self.p[1:]:
            out = out * v
        return out

    def sectors(self) -> tuple[np.ndarray, ...]:
        return sector_indices(self.n, self.N)


def check_dimension(spec: ChainSpec, budget: int = MAX_DIMENSION) -> None:
    if spec.dim > budget:
        raise BudgetError(f"n^N = {spec.dim} exceeds the dimensional budget {budget}")


def sample_points(spec: ChainSpec, count: int, avoid_shifts: range = range(-8, 9),
                  start: int = 0) -> list:
    """Small-integer rational abscissas avoiding the lattice ``x_i + k eta``."""
    bad = {xi + k * spec.eta for xi in spec.x for k in avoid_shifts}
    pts: list = []
    cand = start
    step = 0
    while len(pts) < count:
        for value in (mpq(cand), mpq(2 * cand + 1, 2)):
            if value not in bad and value not in pts and len(pts) < count:
                pts.append(value)
        step += 1
        cand = start + ((step + 1) // 2) * (1 if step % 2 else -1)
    return pts


# ---------------------------------------------------------------------------
# R-matrix
# ---------------------------------------------------------------------------

def r_matrix(spec: ChainSpec, x: Any) -> np.ndarray:
    """``R(x) = x I + eta P`` on ``C^n (x) C^n``."""
    n = spec.n
    exact = spec.exact and is_exact(x)
    return identity(n * n, exact) * x + permutation_operator(n, 2, 1, 2, exact) * spec.eta


def r_matrix_on(n: int, N: int, i: int, j: int, x: Any, eta: Any, exact: bool = True) -> np.ndarray:
    """``R_ij(x)`` embedded in ``(C^n)^{(x) N}``."""
    return identity(n ** N, exact) * x + permutation_operator(n, N, i, j, exact) * eta


# ---------------------------------------------------------------------------
# matrix-free transfer matrix and Hamiltonians
# ---------------------------------------------------------------------------

def _columns_tensor(spec: ChainSpec, cols: np.ndarray) -> np.ndarray:
    return cols.reshape((spec.n,) * spec.N + (cols.shape[-1],))


def transfer_apply(spec: ChainSpec, x: Any, cols: np.ndarray) -> np.ndarray:
    """``T(x) @ cols`` for a block of column vectors of shape ``(n^N, m)``."""
    n, N = spec.n, spec.N
    m = cols.shape[1]
    v = _columns_tensor(spec, cols)
    out = None
    for a in range(n):
        u = np.zeros((n,) + v.shape, dtype=cols.dtype)
        u[a] = v
        for i in range(N - 1, -1, -1):
            u = u * (x - spec.x[i]) + np.swapaxes(u, 0, i + 1) * spec.eta
        term = u[a] * spec.p[a]
        out = term if out is None else out + term
    return out.reshape(n ** N, m)


@lru_cache(maxsize=None)
def _sector_swaps(n: int, N: int, block: int, a: int):
    """Index maps for the auxiliary-space monodromy restricted to one weight block.

    With the chain in weight block ``w`` and the auxiliary space started in
    state ``a``, the pair (aux state ``b``, chain state ``s``) stays inside
    total weight ``w + e_a``.  Returns the flat indices ``b * n^N + s`` of that
    subspace, the maps realizing ``P_{0i}`` on it, and the positions of the
    rows ``(a, s in block)``.
    """
    dim = n ** N
    states = np.array(basis_states(n, N), dtype=np.intp).reshape(dim, N)
    w, idx = weight_sectors(n, N)[block]
    counts = np.stack([(states == c).sum(axis=1) for c in range(n)], axis=1)
    flat = []
    for b in range(n):
        target = np.array(w) + np.eye(n, dtype=int)[a] - np.eye(n, dtype=int)[b]
        if target.min() < 0:
            continue
        chain = np.nonzero((counts == target).all(axis=1))[0]
        flat.append(b * dim + chain)
    flat = np.sort(np.concatenate(flat))
    pos = {int(f): k for k, f in enumerate(flat)}
    aux, chain = np.divmod(flat, dim)
    radix = n ** np.arange(N - 1, -1, -1)
    swaps = []
    for i in range(N):
        digit = states[chain, i]
        partner = digit * dim + chain + (aux - digit) * radix[i]
        swaps.append(np.array([pos[int(f)] for f in partner], dtype=np.intp))
    rows = np.array([pos[a * dim + int(k)] for k in idx], dtype=np.intp)
    return rows, tuple(swaps)


def transfer_block(spec: ChainSpec, x: Any, block: int) -> np.ndarray:
    """``T(x)`` restricted to the weight block ``weight_sectors(n, N)[block]``."""
    n, N = spec.n, spec.N
    d = len(weight_sectors(n, N)[block][1])
    out = None
    for a in range(n):
        rows, swaps = _sector_swaps(n, N, block, a)
        u = np.zeros((len(swaps[0]), d), dtype=object if is_exact(x) and spec.exact else complex)
        u[rows, np.arange(d)] = 1
        for i in range(N - 1, -1, -1):
            u = u * (x - spec.x[i]) + u[swaps[i]] * spec.eta
        term = u[rows] * spec.p[a]
        out = term if out is None else out + term
    return out


def transfer_matrix(spec: ChainSpec, x: Any) -> np.ndarray:
    exact = spec.exact and is_exact(x)
    return transfer_apply(spec, x, identity(spec.dim, exact))


def transfer_poly(spec: ChainSpec) -> OperatorPolynomial:
    """``T(x) = tr_0 R_01(x - x_1) ... R_0N(x - x_N) g_0`` as an exact degree-N polynomial."""
    check_dimension(spec)
    pts = [mpq(k) for k in range(spec.N + 1)] if spec.exact else [float(k) for k in range(spec.N + 1)]
    values = [transfer_matrix(spec, x) for x in pts]
    return OperatorPolynomial.from_samples(pts, values, spec.sectors())


def hamiltonian_apply(spec: ChainSpec, i: int, cols: np.ndarray) -> np.ndarray:
    """``H_i @ cols`` with ``i`` 0-based.

    ``H_i = Rt_{i,i+1} ... Rt_{iN} g_i Rt_{i1} ... Rt_{i,i-1}`` with
    ``Rt_ij = 1 + eta P_ij / (x_i - x_j)``: the ordering for which
    ``eta H_i`` is the residue of ``T(x) / phi(x)`` at ``x_i``.  The mirrored
    product (right-to-left) is its transpose and has the same spectrum.
    """
    n, N, eta = spec.n, spec.N, spec.eta
    m = cols.shape[1]
    u = _columns_tensor(spec, cols)
    xi = spec.x[i]
    for j in range(i - 1, -1, -1):
        u = u + np.swapaxes(u, i, j) * (eta / (xi - spec.x[j]))
    shape = [1] * (N + 1)
    shape[i] = n
    twist = np.array(spec.p, dtype=object if cols.dtype == object else complex).reshape(shape)
    u = u * twist
    for j in range(N - 1, i, -1):
        u = u + np.swapaxes(u, i, j) * (eta / (xi - spec.x[j]))
    return u.reshape(n ** N, m)


def hamiltonians(spec: ChainSpec) -> list[np.ndarray]:
    """The commuting nonlocal Hamiltonians ``H_1..H_N``."""
    check_dimension(spec)
    for i in range(spec.N):
        for j in range(spec.N):
            if i != j:
                d = spec.x[i] - spec.x[j]
                if d == 0 or d == spec.eta or d == -spec.eta:
                    raise DegenerateSpecError("degenerate spacing between inhomogeneities")
    eye = identity(spec.dim, spec.exact)
    return [hamiltonian_apply(spec, i, eye) for i in range(spec.N)]


def hamiltonian_from_residue(spec: ChainSpec, i: int) -> np.ndarray:
    """``eta^{-1} res_{x = x_i} T(x) / phi(x)`` evaluated directly (``i`` 0-based)."""
    xi = spec.x[i]
    denom = spec.eta
    for k, xk in enumerate(spec.x):
        if k != i:
            denom = denom * (xi - xk)
    return transfer_matrix(spec, xi) * (1 / denom if not spec.exact else mpq(1) / denom)


def twist_on_site(spec: ChainSpec, j: int) -> np.ndarray:
    """``g_j``: the twist acting on site ``j`` (1-based)."""
    exact = spec.exact
    local = zeros(spec.n, exact)
    for a in range(spec.n):
        local[a, a] = spec.p[a]
    return site_operator(local, spec.N, j)


def weight_operators(spec: ChainSpec) -> list[np.ndarray]:
    """``M_a = sum_j e_aa^{(j)}``, diagonal in the standard basis."""
    n, N = spec.n, spec.N
    check_dimension(spec)
    states = np.array(np.unravel_index(np.arange(n ** N), (n,) * N)).T if N else np.zeros((1, 0), int)
    out = []
    for a in range(n):
        counts = (states == a).sum(axis=1)
        op = zeros(n ** N, True)
        for k, c in enumerate(counts):
            op[k, k] = int(c)
        out.append(op)
    return out


def gaudin_hamiltonians(spec: ChainSpec, h: Sequence[Any]) -> list[np.ndarray]:
    """``H^G_i = h_i + sum_{j != i} P_ij / (x_i - x_j)`` for ``h = diag(h_1..h_n)``."""
    n, N = spec.n, spec.N
    check_dimension(spec)
    exact = spec.exact and all_exact(h)
    local = zeros(n, exact)
    for a in range(n):
        local[a, a] = mpq(h[a]) if exact else h[a]
    out = []
    for i in range(1, N + 1):
        op = site_operator(local, N, i)
        for j in range(1, N + 1):
            if j != i:
                d = spec.x[i - 1] - spec.x[j - 1]
                op = op + permutation_operator(n, N, i, j, exact) * ((mpq(1) / d) if exact else 1 / d)
        out.append(op)
    return out


@lru_cache(maxsize=64)
def cached_transfer_poly(spec: ChainSpec) -> OperatorPolynomial:
    return transfer_poly(spec)
