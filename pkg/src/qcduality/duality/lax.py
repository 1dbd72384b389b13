"""Ruijsenaars-Schneider Lax matrix, integrals of motion and the spectral duality check."""
from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import combinations
from typing import Any, Sequence

import numpy as np

from ..checks import CheckResult
from ..exact import all_exact, charpoly, mpq, parse_rational, pfrom_roots


class DegenerateSpacingError(ValueError):
    """Coinciding coordinates or a spacing equal to +-eta."""


def _convert(v: Any) -> Any:
    return parse_rational(v) if isinstance(v, str) else v


@dataclass(frozen=True)
class LaxMatrix:
    """``L_ij = xdot_i / (x_i - x_j - eta)``."""

    x: tuple
    xdot: tuple
    eta: Any

    @property
    def N(self) -> int:
        return len(self.x)

    @property
    def exact(self) -> bool:
        return all_exact(self.x + self.xdot + (self.eta,))

    def entries(self) -> list[list]:
        return [[self.xdot[i] / (self.x[i] - self.x[j] - self.eta) for j in range(self.N)]
                for i in range(self.N)]

    def matrix(self) -> np.ndarray:
        return np.array([[complex(v) for v in row] for row in self.entries()])


def check_spacing(x: Sequence[Any], eta: Any, exact: bool | None = None, tol: float = 1e-12) -> None:
    exact = all_exact(list(x) + [eta]) if exact is None else exact
    for i in range(len(x)):
        for j in range(i + 1, len(x)):
            d = x[i] - x[j]
            for bad in (0, eta, -eta):
                hit = (d == bad) if exact else abs(complex(d) - complex(bad)) <= tol * max(1.0, abs(complex(eta)))
                if hit:
                    raise DegenerateSpacingError(f"x_{i + 1} - x_{j + 1} = {d} is degenerate (0 or +-eta)")


def lax_build(x: Sequence[Any], xdot: Sequence[Any], eta: Any) -> LaxMatrix:
    """Lax matrix from coordinates and velocities; ``lax_build(x, -eta H, eta)`` gives
    ``L_ij = eta H_i / (x_j - x_i + eta)``."""
    x = tuple(_convert(v) for v in x)
    xdot = tuple(_convert(v) for v in xdot)
    eta = _convert(eta)
    if len(x) != len(xdot):
        raise ValueError("coordinates and velocities must have the same length")
    if eta == 0:
        raise DegenerateSpacingError("eta must be nonzero")
    check_spacing(x, eta)
    return LaxMatrix(x, xdot, eta)


def char_poly(L: LaxMatrix | Sequence[Sequence[Any]], check_tol: float = 1e-8) -> list:
    """``[1, c_1, ..., c_N]`` with ``det(z I - L) = z^N + c_1 z^{N-1} + ... + c_N``.

    Exact entries use division-free Berkowitz elimination.  Floating entries use
    the same recursion and are cross-checked against the eigenvalue route.
    """
    mat = L.entries() if isinstance(L, LaxMatrix) else [list(r) for r in L]
    if all_exact([v for row in mat for v in row]):
        return charpoly(mat)
    cmat = [[complex(v) for v in row] for row in mat]
    coeffs = charpoly(cmat)
    alt = np.poly(np.linalg.eigvals(np.array(cmat))) if cmat else np.array([1.0])
    scale = max(1.0, max(abs(c) for c in coeffs))
    if np.max(np.abs(np.asarray(coeffs) - alt)) > check_tol * scale:
        raise ArithmeticError("characteristic polynomial routes disagree")
    return coeffs


def pair_weight(xi: Any, xj: Any, eta: Any) -> Any:
    d2 = (xi - xj) ** 2
    return d2 / (d2 - eta ** 2)


def subset_weights(x: Sequence[Any], eta: Any) -> dict[tuple[int, ...], Any]:
    """``prod_{i<j in I} (x_i - x_j)^2 / ((x_i - x_j)^2 - eta^2)`` for every subset ``I``."""
    N = len(x)
    pw = [[pair_weight(x[i], x[j], eta) if i != j else None for j in range(N)] for i in range(N)]
    one = mpq(1) if all_exact(list(x) + [eta]) else 1.0
    out: dict[tuple[int, ...], Any] = {(): one}
    for k in range(1, N + 1):
        for I in combinations(range(N), k):
            w = out[I[:-1]]
            j = I[-1]
            for i in I[:-1]:
                w = w * pw[i][j]
            out[I] = w
    return out


def integrals(x: Sequence[Any], xdot: Sequence[Any], eta: Any) -> list:
    """``I_k = sum_{|I|=k} prod_{i in I} xdot_i prod_{i<j in I} (x_i-x_j)^2/((x_i-x_j)^2-eta^2)``."""
    x = [_convert(v) for v in x]
    xdot = [_convert(v) for v in xdot]
    eta = _convert(eta)
    check_spacing(x, eta)
    weights = subset_weights(x, eta)
    N = len(x)
    out = []
    for k in range(1, N + 1):
        total = 0
        for I in combinations(range(N), k):
            term = weights[I]
            for i in I:
                term = term * xdot[i]
            total = total + term
        out.append(total)
    return out


def integrals_from_char_poly(L: LaxMatrix) -> list:
    """``I_k = eta^k c_k`` from ``det(z I - L) = z^N + sum eta^{-k} I_k z^{N-k}``."""
    c = char_poly(L)
    return [c[k] * L.eta ** k for k in range(1, L.N + 1)]


def integrals_from_spectrum(L: LaxMatrix) -> list:
    """``I_k = (-1)^k eta^k e_k(Spec L)`` (numeric eigenvalues)."""
    ev = np.linalg.eigvals(L.matrix())
    e = np.poly(ev)  # [1, -e_1, e_2, ...]
    eta = complex(L.eta)
    return [e[k] * eta ** k for k in range(1, L.N + 1)]


@dataclass(frozen=True)
class SpectrumTarget:
    """Twist values with multiplicities; the target characteristic polynomial is
    ``prod_a (z - p_a)^{M_a}``."""

    p: tuple
    M: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "p", tuple(_convert(v) for v in self.p))
        object.__setattr__(self, "M", tuple(int(m) for m in self.M))
        if len(self.p) != len(self.M):
            raise ValueError("one multiplicity per twist value")
        if any(m < 0 for m in self.M):
            raise ValueError("multiplicities must be non-negative")

    @property
    def N(self) -> int:
        return sum(self.M)

    def values(self) -> list:
        return [p for p, m in zip(self.p, self.M) for _ in range(m)]

    def char_poly(self) -> list:
        """Descending coefficients ``[1, c_1, ..., c_N]``."""
        asc = pfrom_roots(self.values(), one=mpq(1) if all_exact(self.p) else 1.0)
        return list(reversed(asc))

    def elementary(self) -> list:
        """``e_1..e_N`` of the twist values with multiplicities."""
        c = self.char_poly()
        return [(-1) ** k * c[k] for k in range(1, self.N + 1)]


def coefficient_deviation(coeffs: Sequence[Any], target: Sequence[Any], scale: float) -> float:
    """``max_k |c_k - t_k| / max(|t_k|, scale^k)``: relative, with a floor set by the eigenvalue size."""
    worst = 0.0
    for k, (c, t) in enumerate(zip(coeffs, target)):
        floor = max(abs(complex(t)), scale ** k, 1e-300)
        worst = max(worst, abs(complex(c) - complex(t)) / floor)
    return worst


def duality_residual(x: Sequence[Any], H: Sequence[Any], eta: Any, target: SpectrumTarget) -> float:
    L = lax_build(x, [-eta * h for h in H], eta)
    scale = max(abs(complex(p)) for p in target.p)
    return coefficient_deviation(char_poly(L), target.char_poly(), scale)


def duality_verify(spec, record, tol: float = 1e-8) -> CheckResult:
    """``det(z - L(-eta H, x)) = prod_a (z - p_a)^{M_a}`` on a joint eigenstate."""
    start = time.perf_counter()
    num = spec.numeric()
    target = SpectrumTarget(tuple(complex(p) for p in spec.p), record.weights)
    res = duality_residual(list(num.x), list(record.H), num.eta, target)
    return CheckResult(f"duality{tuple(record.weights)}#{record.index}", res < tol, res,
                       time.perf_counter() - start, {"weights": list(record.weights)})


def eig3_eval(spec, roots: Sequence[Any]) -> np.ndarray:
    """``H_i = g_1 prod_{k != i} (x_i-x_k+eta)/(x_i-x_k) prod_gamma (x_i-w_gamma-eta)/(x_i-w_gamma)``
    with ``g_1 = p_n`` and ``w`` the roots of ``Q_{n-1}``."""
    x = np.array([complex(v) for v in spec.x])
    eta = complex(spec.eta)
    w = np.asarray(roots, dtype=complex)
    g1 = complex(spec.p[-1])
    out = np.empty(len(x), dtype=complex)
    for i, xi in enumerate(x):
        others = np.delete(x, i)
        if np.any(np.abs(xi - w) == 0):
            from ..mkp.krichever import PoleError
            raise PoleError(f"Bethe root coincides with x_{i + 1}")
        out[i] = g1 * np.prod((xi - others + eta) / (xi - others)) * np.prod((xi - w - eta) / (xi - w))
    return out
