"""Ruijsenaars-Schneider side of polynomial tau-functions: determinant tau and wave
functions through the Lax matrix, and the equations of motion of the zeros."""
from __future__ import annotations

import cmath
import time
from dataclasses import dataclass
from itertools import permutations
from typing import Any, Sequence

import numpy as np

from ..checks import CheckResult
from ..symfun import TimeVector, as_times
from .lax import integrals, lax_build


class RootTrackingLostError(RuntimeError):
    """Zeros came too close to be followed reliably."""


@dataclass(frozen=True)
class RSData:
    """Initial coordinates ``X_0``, Lax matrix ``L_0`` and the points in the prefactor."""

    X0: tuple
    L0: np.ndarray
    points: tuple
    eta: complex

    @property
    def N(self) -> int:
        return len(self.X0)

    @property
    def xdot0(self) -> np.ndarray:
        """``xdot_i = -eta L_ii``."""
        return -self.eta * np.diag(self.L0)

    @classmethod
    def from_velocities(cls, x: Sequence[Any], xdot: Sequence[Any], eta: Any,
                        points: Sequence[Any]) -> "RSData":
        L = lax_build([complex(v) for v in x], [complex(v) for v in xdot], complex(eta))
        return cls(tuple(complex(v) for v in x), L.matrix(), tuple(complex(p) for p in points), complex(eta))


def rs_from_record(spec, record) -> RSData:
    """Coordinates ``x_i`` and velocities ``-eta H_i`` of a joint eigenstate."""
    num = spec.numeric()
    return RSData.from_velocities(num.x, [-num.eta * h for h in record.H], num.eta, num.p)


def rs_from_krichever(data) -> RSData:
    """Zeros of ``tau(x, 0)`` and their ``t_1`` velocities ``-d_t tau / d_x tau``."""
    from ..exact import pderiv, peval
    from ..mkp.krichever import dtau_core, tau_quasipoly
    q = tau_quasipoly(data, TimeVector.zeros(1))
    roots = q.roots()
    dpoly = [complex(c) for c in pderiv(list(q.poly))]
    from ..mkp.chain import numeric_data
    num = numeric_data(data)
    t0 = TimeVector((0j,))
    xdot = [-complex(dtau_core(num, r, t0)) / peval(dpoly, r) for r in roots]
    return RSData.from_velocities(roots, xdot, complex(data.eta), data.points)


def _times(t: TimeVector | Sequence[Any]) -> TimeVector:
    t = as_times(t)
    return TimeVector(tuple(complex(v) for v in t.values))


def flow_matrix(rs: RSData, t: TimeVector | Sequence[Any]) -> np.ndarray:
    """``Y(t) = X_0 - eta sum_k k t_k L_0^k``; its eigenvalues are the zeros ``x_i(t)``."""
    t = _times(t)
    Y = np.diag(np.array(rs.X0, dtype=complex))
    Lk = np.eye(rs.N, dtype=complex)
    for k, tk in enumerate(t.values, start=1):
        Lk = Lk @ rs.L0
        if tk != 0:
            Y = Y - rs.eta * k * tk * Lk
    return Y


def _prefactor(rs: RSData, x: complex, t: TimeVector) -> complex:
    out = 1 + 0j
    for p in rs.points:
        out *= cmath.exp(cmath.log(p) * x / rs.eta + t.xi(p))
    return out


def rs_tau_core(rs: RSData, x: Any, t: TimeVector | Sequence[Any]) -> complex:
    """``det(x I - X_0 + eta sum k t_k L_0^k)``."""
    Y = flow_matrix(rs, t)
    return complex(np.linalg.det(complex(x) * np.eye(rs.N) - Y))


def rs_tau(rs: RSData, x: Any, t: TimeVector | Sequence[Any]) -> complex:
    """``prod_i p_i^{x/eta} e^{xi(t, p_i)} det(x I - X_0 + eta sum k t_k L_0^k)`` (principal branch)."""
    t = _times(t)
    return _prefactor(rs, complex(x), t) * rs_tau_core(rs, x, t)


def rs_wave(rs: RSData, x: Any, t: TimeVector | Sequence[Any], z: Any) -> tuple[complex, complex]:
    """``(psi, psi*)`` from the Lax-matrix determinant formulas.

    ``X(t)`` and ``L(t)`` enter only through similarity invariants, so they are
    replaced by ``Y(t)`` and ``L_0``.
    """
    from ..mkp.krichever import PoleError
    t = _times(t)
    x, z = complex(x), complex(z)
    if z == 0:
        raise PoleError("wave function needs z != 0")
    eye = np.eye(rs.N)
    A = x * eye - flow_matrix(rs, t)
    B = z * eye - rs.L0
    den = np.linalg.det(A) * np.linalg.det(B)
    if abs(den) == 0:
        raise PoleError("x is a zero of tau or z is an eigenvalue of L")
    pref = 1 + 0j
    for p in rs.points:
        pref *= 1 - p / z
    plane = cmath.exp(cmath.log(z) * x / rs.eta + t.xi(z))
    psi = pref * plane * np.linalg.det(A @ B - rs.eta * rs.L0) / den
    psi_star = np.linalg.det(B @ A + rs.eta * rs.L0) / (pref * plane * den)
    return complex(psi), complex(psi_star)


# ---------------------------------------------------------------------------
# equations of motion of the zeros
# ---------------------------------------------------------------------------

def rs_acceleration(x: np.ndarray, xdot: np.ndarray, eta: complex) -> np.ndarray:
    """``-sum_{k != i} 2 eta^2 xdot_i xdot_k / ((x_i - x_k)((x_i - x_k)^2 - eta^2))``."""
    N = len(x)
    out = np.zeros(N, dtype=complex)
    for i in range(N):
        for k in range(N):
            if k != i:
                d = x[i] - x[k]
                out[i] -= 2 * eta ** 2 * xdot[i] * xdot[k] / (d * (d * d - eta ** 2))
    return out


def _match(prev: np.ndarray, pred: np.ndarray, new: np.ndarray) -> np.ndarray:
    """Order ``new`` to follow ``prev`` (nearest to the linear prediction)."""
    N = len(new)
    if N <= 6:
        best, best_cost = None, np.inf
        for perm in permutations(range(N)):
            cost = np.sum(np.abs(new[list(perm)] - pred))
            if cost < best_cost:
                best, best_cost = perm, cost
        return new[list(best)]
    out = np.empty_like(new)
    free = list(range(N))
    for i in range(N):
        k = min(free, key=lambda j: abs(new[j] - pred[i]))
        out[i] = new[k]
        free.remove(k)
    return out


def track_zeros(rs: RSData, times: np.ndarray, h: float) -> np.ndarray:
    """Zeros ``x_i(t_1)`` on an increasing grid through ``0``, continued from ``X_0``.

    Raises when two zeros come within ``10 h``.
    """
    times = np.asarray(times, dtype=float)
    zero = int(np.argmin(np.abs(times)))
    if abs(times[zero]) > 1e-15:
        raise ValueError("the time grid must contain t_1 = 0")
    out = np.empty((len(times), rs.N), dtype=complex)
    out[zero] = np.array(rs.X0, dtype=complex)

    def eig(t1: float) -> np.ndarray:
        return np.linalg.eigvals(flow_matrix(rs, TimeVector((t1,))))

    for direction in (1, -1):
        idx = zero
        prev2 = None
        while 0 <= idx + direction < len(times):
            nxt = idx + direction
            pred = out[idx] if prev2 is None else 2 * out[idx] - out[prev2]
            out[nxt] = _match(out[idx], pred, eig(times[nxt]))
            gaps = np.abs(out[nxt][:, None] - out[nxt][None, :])
            np.fill_diagonal(gaps, np.inf)
            if np.min(gaps) < 10 * h:
                raise RootTrackingLostError(f"zeros within {np.min(gaps):.2e} at t_1 = {times[nxt]:.6f}")
            prev2, idx = idx, nxt
    return out


def rs_eom_check(rs: RSData, h: float = 1e-3, window: float = 0.02, centers: int = 5,
                 tol: float = 1e-5, drift_tol: float = 1e-6) -> CheckResult:
    """Second-order equations of motion of the zeros in ``t_1`` and conservation of the integrals.

    Zeros are tracked on a grid of step ``h`` over ``[-window - 2h, window + 2h]``;
    velocities and accelerations use 5-point stencils at ``centers`` points.
    """
    start = time.perf_counter()
    steps = int(round(window / h))
    grid = np.arange(-steps - 2, steps + 3) * h
    X = track_zeros(rs, grid, h)
    idx = np.linspace(2, len(grid) - 3, centers).round().astype(int)
    eta = rs.eta
    eom_res, drifts = 0.0, 0.0
    I0 = None
    rows = []
    for c in idx:
        f = X[c - 2:c + 3]
        v = (-f[4] + 8 * f[3] - 8 * f[1] + f[0]) / (12 * h)
        a = (-f[4] + 16 * f[3] - 30 * f[2] + 16 * f[1] - f[0]) / (12 * h * h)
        rhs = rs_acceleration(f[2], v, eta)
        scale = max(1.0, float(np.max(np.abs(a))), float(np.max(np.abs(rhs))))
        r = float(np.max(np.abs(a - rhs))) / scale
        I = np.array([complex(v) for v in integrals(list(f[2]), list(v), eta)])
        if I0 is None:
            I0 = I
        d = float(np.max(np.abs(I - I0) / np.maximum(np.abs(I0), 1.0)))
        eom_res, drifts = max(eom_res, r), max(drifts, d)
        rows.append({"t1": float(grid[c]), "eom": r, "drift": d})
    passed = eom_res < tol and drifts < drift_tol
    return CheckResult("rs_eom", passed, eom_res, time.perf_counter() - start,
                       {"h": h, "integral_drift": drifts, "samples": rows})


def initial_velocity_check(rs: RSData, h: float = 1e-6, tol: float = 1e-4) -> CheckResult:
    """``d x_i / d t_1`` at ``t = 0`` from the zeros of the determinant tau equals ``xdot_i``."""
    start = time.perf_counter()
    X = track_zeros(rs, np.array([-h, 0.0, h]), h / 100)
    v = (X[2] - X[0]) / (2 * h)
    target = rs.xdot0
    res = float(np.max(np.abs(v - target) / np.maximum(np.abs(target), 1.0)))
    return CheckResult("rs_initial_velocity", res < tol, res, time.perf_counter() - start, {})
