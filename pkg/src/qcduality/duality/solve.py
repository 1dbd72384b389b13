"""Joint spectrum of the quantum Hamiltonians from the classical integrals, without Bethe roots.

For each weight sector the unknowns ``H_1..H_N`` solve

    sum_{|I|=k} prod_{i in I} H_i prod_{i<j in I} (x_i-x_j)^2/((x_i-x_j)^2-eta^2) = e_k(xi),

``k = 1..N``, with ``xi`` the twist values repeated by multiplicity.  The
left side is multilinear in ``H``, which gives the Jacobian in closed form.
Solutions are tracked from a small ``eta`` where ``H_i`` is close to the twist
value carried by site ``i``.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import combinations, permutations
from typing import Sequence

import numpy as np

from .lax import SpectrumTarget, check_spacing, duality_residual, subset_weights


class CalibrationError(RuntimeError):
    """The equation system fails its closed-form sanity cases."""


class SingularJacobianError(ArithmeticError):
    pass


@dataclass
class SolveConfig:
    newton_tol: float = 1e-12
    max_newton: int = 50
    eta_start: float | None = None       # defaults to a small fraction of the spacing
    detour: float = 0.3                  # imaginary bulge of the eta path
    initial_step: float = 0.05
    min_step: float = 1e-6
    dedupe_tol: float = 1e-8
    accept_tol: float = 1e-8


@dataclass
class SolveResult:
    target: SpectrumTarget
    solutions: list[np.ndarray]
    residuals: list[float]
    failures: list[dict] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def count(self) -> int:
        return len(self.solutions)


class IntegralSystem:
    """Left sides ``F_k(H)`` and their Jacobian for fixed ``x`` and ``eta``."""

    def __init__(self, x: Sequence[complex], eta: complex, target: SpectrumTarget):
        self.x = [complex(v) for v in x]
        self.eta = complex(eta)
        self.N = len(self.x)
        if target.N != self.N:
            raise ValueError(f"target has {target.N} values for {self.N} sites")
        check_spacing(self.x, self.eta, exact=False)
        self.weights = subset_weights(self.x, self.eta)
        self.rhs = np.array([complex(v) for v in target.elementary()])
        self.subsets = [list(combinations(range(self.N), k)) for k in range(self.N + 1)]

    def residual(self, H: np.ndarray) -> np.ndarray:
        out = np.empty(self.N, dtype=complex)
        for k in range(1, self.N + 1):
            out[k - 1] = sum(self.weights[I] * np.prod(H[list(I)]) for I in self.subsets[k]) - self.rhs[k - 1]
        return out

    def jacobian(self, H: np.ndarray) -> np.ndarray:
        J = np.zeros((self.N, self.N), dtype=complex)
        for k in range(1, self.N + 1):
            for I in self.subsets[k]:
                w = self.weights[I]
                for i in I:
                    J[k - 1, i] += w * np.prod([H[j] for j in I if j != i])
        return J

    def scale(self) -> np.ndarray:
        return np.maximum(np.abs(self.rhs), 1.0)

    def newton(self, H0: np.ndarray, tol: float, max_iter: int) -> tuple[np.ndarray, bool]:
        H = np.array(H0, dtype=complex)
        sc = self.scale()
        for _ in range(max_iter):
            F = self.residual(H)
            if np.max(np.abs(F) / sc) <= tol:
                return H, True
            J = self.jacobian(H)
            try:
                step = np.linalg.solve(J, -F)
            except np.linalg.LinAlgError as exc:
                raise SingularJacobianError(str(exc)) from exc
            H = H + step
            if not np.all(np.isfinite(H)):
                return H, False
        return H, bool(np.max(np.abs(self.residual(H)) / sc) <= tol)


def assignments(M: Sequence[int]) -> list[tuple[int, ...]]:
    """Distinct maps ``site -> twist index`` with ``M_a`` sites carrying index ``a``."""
    labels = [a for a, m in enumerate(M) for _ in range(m)]
    return sorted(set(permutations(labels)))


def gaudin_seed(x: Sequence[complex], eta: complex, p: Sequence[complex], s: Sequence[int]) -> np.ndarray:
    """``H_i ~ p_{s_i} (1 + eta sum_{j != i, s_j = s_i} 1/(x_i - x_j))`` for small ``eta``."""
    N = len(x)
    H = np.empty(N, dtype=complex)
    for i in range(N):
        corr = sum(1.0 / (x[i] - x[j]) for j in range(N) if j != i and s[j] == s[i])
        H[i] = p[s[i]] * (1 + eta * corr)
    return H


def calibrate(tol: float = 1e-12) -> None:
    """Closed-form gates: ``N = 1`` gives ``H_1 = p_a``; for ``N = 2`` with both sites in one
    sector ``H_1 = p (x_1-x_2+eta)/(x_1-x_2)``, ``H_2 = p (x_2-x_1+eta)/(x_2-x_1)``."""
    p, eta = 1.7 - 0.3j, 0.37
    sys1 = IntegralSystem([0.4], eta, SpectrumTarget((p, 2.0), (1, 0)))
    if abs(sys1.residual(np.array([p]))[0]) > tol:
        raise CalibrationError("N = 1 gate failed")
    x = [0.2, 1.3]
    d = x[0] - x[1]
    H = np.array([p * (d + eta) / d, p * (-d + eta) / (-d)])
    sys2 = IntegralSystem(x, eta, SpectrumTarget((p, 2.0), (2, 0)))
    if np.max(np.abs(sys2.residual(H))) > tol * 10:
        raise CalibrationError("N = 2 highest-weight gate failed")


def _eta_path(eta0: complex, eta1: complex, detour: float):
    def path(s: float) -> complex:
        return eta0 + (eta1 - eta0) * (s + 1j * detour * s * (1 - s))
    return path


def track(x: Sequence[complex], target: SpectrumTarget, H0: np.ndarray, eta0: complex,
          eta1: complex, cfg: SolveConfig) -> np.ndarray:
    """Continue a solution from ``eta0`` to ``eta1`` with step halving on Newton failure."""
    path = _eta_path(eta0, eta1, cfg.detour)
    s, step = 0.0, cfg.initial_step
    H = np.array(H0, dtype=complex)
    prev = None
    while s < 1.0:
        s_new = min(1.0, s + step)
        # secant predictor from the last two accepted points
        guess = H if prev is None else H + (H - prev[1]) * (s_new - s) / (s - prev[0])
        try:
            system = IntegralSystem(x, path(s_new), target)
            H_new, ok = system.newton(guess, cfg.newton_tol, 8)
        except (SingularJacobianError, ValueError):
            ok = False
        if ok and np.max(np.abs(H_new - H)) <= 0.5 * max(1.0, np.max(np.abs(H))):
            prev = (s, H)
            s, H = s_new, H_new
            step = min(step * 1.5, 0.25)
        else:
            step /= 2
            if step < cfg.min_step:
                raise RuntimeError(f"continuation stalled at s = {s:.6f}")
    return H


def solve_spectrum(spec, target: SpectrumTarget, seeds: Sequence[Sequence[complex]] | None = None,
                   config: SolveConfig | None = None) -> SolveResult:
    """Solve the integral equations for one weight sector.

    With explicit ``seeds`` Newton runs directly at the target ``eta``.
    Otherwise every assignment of twist values to sites seeds a solution at a
    small ``eta`` which is then continued along a complex detour to the target.
    Each accepted vector is re-validated through the Lax characteristic
    polynomial; duplicates within ``dedupe_tol`` are merged.
    """
    cfg = config or SolveConfig()
    start = time.perf_counter()
    calibrate()
    num = spec.numeric()
    x = list(num.x)
    eta = complex(num.eta)
    p = [complex(v) for v in num.p]
    target = SpectrumTarget(tuple(p), target.M)
    if target.N != num.N:
        raise ValueError(f"multiplicities sum to {target.N}, chain has {num.N} sites")
    system = IntegralSystem(x, eta, target)
    failures: list[dict] = []
    found: list[np.ndarray] = []
    if seeds is not None:
        for idx, seed in enumerate(seeds):
            try:
                H, ok = system.newton(np.asarray(seed, dtype=complex), cfg.newton_tol, cfg.max_newton)
            except SingularJacobianError as exc:
                failures.append({"seed": idx, "reason": f"singular jacobian: {exc}"})
                continue
            if ok:
                found.append(H)
            else:
                failures.append({"seed": idx, "reason": "no convergence"})
    else:
        gaps = [abs(x[i] - x[j]) for i in range(len(x)) for j in range(i + 1, len(x))]
        eta0 = cfg.eta_start if cfg.eta_start is not None else 1e-3 * min(gaps + [1.0])
        eta0 = eta0 * eta / abs(eta)
        start_sys = IntegralSystem(x, eta0, target)
        for s in assignments(target.M):
            try:
                H0, ok = start_sys.newton(gaudin_seed(x, eta0, p, s), cfg.newton_tol, cfg.max_newton)
                if not ok:
                    failures.append({"assignment": list(s), "reason": "no convergence at small eta"})
                    continue
                H = track(x, target, H0, eta0, eta, cfg)
                H, ok = system.newton(H, cfg.newton_tol, cfg.max_newton)
            except (SingularJacobianError, RuntimeError) as exc:
                failures.append({"assignment": list(s), "reason": str(exc)})
                continue
            if ok:
                found.append(H)
            else:
                failures.append({"assignment": list(s), "reason": "no convergence at target eta"})
    solutions, residuals = [], []
    for H in found:
        if any(np.max(np.abs(H - G)) <= cfg.dedupe_tol * max(1.0, np.max(np.abs(G))) for G in solutions):
            continue
        res = duality_residual(x, list(H), eta, target)
        if res > cfg.accept_tol:
            failures.append({"H": [complex(h) for h in H], "reason": f"duality residual {res:.3e}"})
            continue
        solutions.append(H)
        residuals.append(res)
    return SolveResult(target, solutions, residuals, failures, time.perf_counter() - start)


def weight_vectors(n: int, N: int) -> list[tuple[int, ...]]:
    """All ``(M_1..M_n)`` with ``sum M_a = N``."""
    if n == 1:
        return [(N,)]
    return [(m,) + rest for m in range(N, -1, -1) for rest in weight_vectors(n - 1, N - m)]


def solve_all_sectors(spec, config: SolveConfig | None = None) -> dict[tuple[int, ...], SolveResult]:
    return {M: solve_spectrum(spec, SpectrumTarget(tuple(spec.p), M), config=config)
            for M in weight_vectors(spec.n, spec.N)}


def match_multisets(found: Sequence[np.ndarray], reference: Sequence[np.ndarray]) -> float:
    """Largest distance after greedy nearest matching (``inf`` if the counts differ)."""
    if len(found) != len(reference):
        return float("inf")
    pool = [np.asarray(r, dtype=complex) for r in reference]
    worst = 0.0
    for H in found:
        d = [np.max(np.abs(H - r)) / max(1.0, np.max(np.abs(r))) for r in pool]
        k = int(np.argmin(d))
        worst = max(worst, d[k])
        pool.pop(k)
    return worst
