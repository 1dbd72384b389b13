"""Joint eigenstates of the commuting transfer matrices (floating backend)."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from ..exact import peval, pinterp
from .chain import ChainSpec, check_dimension, transfer_block
from .operators import OperatorPolynomial, weight_sectors


class NearDegenerateSpectrumError(RuntimeError):
    """Random combinations failed to separate the joint eigenvectors of a block."""


@dataclass
class SpectralRecord:
    index: int
    weights: tuple[int, ...]
    Lambda: np.ndarray            # coefficients of the eigenvalue of T(x), ascending powers
    H: np.ndarray                 # eigenvalues of H_1..H_N
    vector: np.ndarray = field(repr=False)
    residual: float = 0.0
    collision: bool = False

    def lambda_at(self, x: Any) -> complex:
        return peval(list(self.Lambda), x)

    def eigenvalue_of(self, op: OperatorPolynomial) -> np.ndarray:
        """Eigenvalue polynomial of a commuting operator polynomial on this state."""
        v = self.vector
        norm = np.vdot(v, v)
        out = []
        for c in op.coeffs:
            c = np.asarray(c, dtype=complex)
            out.append(np.vdot(v, c @ v) / norm)
        return np.array(out)


def _nodes(spec: ChainSpec, count: int) -> np.ndarray:
    xs = np.array([complex(v) for v in spec.x])
    eta = abs(complex(spec.eta))
    lo, hi = xs.real.min() - 2 * eta - 1, xs.real.max() + 2 * eta + 1
    k = np.arange(count)
    cheb = np.cos((2 * k + 1) * np.pi / (2 * count))
    return 0.5 * (lo + hi) + 0.5 * (hi - lo) * cheb + 0.0j


def _rayleigh(mat: np.ndarray, v: np.ndarray) -> complex:
    return np.vdot(v, mat @ v) / np.vdot(v, v)


def joint_spectrum(spec: ChainSpec, seed: int, retries: int = 5,
                   tol: float = 1e-10) -> list[SpectralRecord]:
    """Diagonalize ``T(x)`` weight block by weight block.

    Each block is diagonalized through one random real combination of
    ``T(xi_k)`` at the interpolation nodes; eigenvectors are accepted only if
    they are joint eigenvectors of every ``T(xi_k)`` to relative accuracy
    ``tol``.  ``Lambda`` is interpolated through ``N + 1`` nodes and
    ``H_i = Lambda(x_i) / (eta prod_{k != i} (x_i - x_k))``.
    """
    check_dimension(spec)
    num = spec.numeric()
    n, N = num.n, num.N
    dim = num.dim
    rng = np.random.default_rng(seed)
    nodes = _nodes(num, N + 1)
    checks = (nodes[:-1] + 0.5 * (nodes[1:] - nodes[:-1]) + 0.25j * abs(num.eta))[::max(1, N // 2)]
    eta = num.eta
    xs = list(num.x)
    dphi = [np.prod([xs[i] - xs[k] for k in range(N) if k != i]) for i in range(N)]
    trg = sum(num.p)
    records: list[SpectralRecord] = []
    for block, (w, idx) in enumerate(weight_sectors(n, N)):
        d = len(idx)
        at_nodes = [transfer_block(num, z, block) for z in nodes]
        at_checks = [transfer_block(num, z, block) for z in checks]
        scale = [max(np.linalg.norm(m), 1e-300) for m in at_nodes]
        for attempt in range(retries + 1):
            coef = rng.standard_normal(len(nodes))
            comb = sum(c * m for c, m in zip(coef, at_nodes))
            _, vecs = np.linalg.eig(comb)
            vecs = vecs / np.linalg.norm(vecs, axis=0)
            residual = 0.0
            for m, sc in zip(at_nodes, scale):
                mv = m @ vecs
                lam = np.einsum("ij,ij->j", vecs.conj(), mv)
                residual = max(residual, np.max(np.linalg.norm(mv - vecs * lam, axis=0)) / sc)
            if residual <= tol:
                break
        else:
            raise NearDegenerateSpectrumError(
                f"weight block {w}: joint eigenvector residual {residual:.3e} after {retries + 1} attempts")
        def diag(mats):
            return np.array([np.einsum("ij,ij->j", vecs.conj(), m @ vecs) for m in mats])

        node_vals, check_vals = diag(at_nodes), diag(at_checks)
        all_lam = np.array(pinterp(list(nodes), list(node_vals)))  # (N + 1, d)
        block_records = []
        for j in range(d):
            v = vecs[:, j]
            Lam = all_lam[:, j]
            H = np.array([peval(list(Lam), xi) for xi in xs]) / (eta * np.array(dphi))
            # consistency with the pole expansion of Lambda / phi and with direct evaluation
            worst = 0.0
            for z, direct_val in zip(checks, check_vals[:, j]):
                phi_z = np.prod([z - xi for xi in xs])
                lhs = peval(list(Lam), z) / phi_z
                rhs = trg + np.sum(eta * H / (z - np.array(xs)))
                direct = direct_val / phi_z
                # scale: size of the monomial-basis evaluation and of the pole terms
                size = max(1.0, abs(lhs),
                           float(np.sum(np.abs(Lam) * np.abs(z) ** np.arange(N + 1))) / abs(phi_z),
                           float(np.sum(np.abs(eta * H / (z - np.array(xs))))))
                worst = max(worst, abs(lhs - rhs) / size, abs(lhs - direct) / size)
            if worst > tol:
                raise NearDegenerateSpectrumError(
                    f"weight block {w}: record fails the pole-expansion check ({worst:.3e})")
            full = np.zeros(dim, dtype=complex)
            full[idx] = v
            block_records.append(SpectralRecord(len(records) + j, tuple(w), Lam, H, full,
                                                max(residual, worst)))
        lams = np.array([r.Lambda for r in block_records])
        norms = np.maximum(1.0, np.linalg.norm(lams, axis=1))
        for a in range(d - 1):
            gaps = np.linalg.norm(lams[a + 1:] - lams[a], axis=1)
            close = np.nonzero(gaps <= 1e-8 * norms[a])[0]
            if len(close):
                block_records[a].collision = True
                for b in close:
                    block_records[a + 1 + b].collision = True
        records.extend(block_records)
    return records


def spectrum_from_records(records: Sequence[SpectralRecord]) -> dict[tuple[int, ...], list[np.ndarray]]:
    """Group Hamiltonian eigenvalue vectors by weight."""
    out: dict[tuple[int, ...], list[np.ndarray]] = {}
    for r in records:
        out.setdefault(r.weights, []).append(r.H)
    return out


def brute_force_hamiltonian_spectrum(spec: ChainSpec, seed: int = 0) -> list[np.ndarray]:
    """Joint eigenvalues of ``H_1..H_N`` by diagonalizing a random combination of
    the Hamiltonian matrices themselves (independent of ``T(x)`` interpolation)."""
    from .chain import hamiltonian_apply

    num = spec.numeric()
    rng = np.random.default_rng(seed)
    out = []
    for _, idx in weight_sectors(num.n, num.N):
        d = len(idx)
        basis = np.zeros((num.dim, d), dtype=complex)
        basis[idx, np.arange(d)] = 1.0
        hs = [hamiltonian_apply(num, i, basis)[idx] for i in range(num.N)]
        comb = sum(rng.standard_normal() * h for h in hs)
        _, vecs = np.linalg.eig(comb)
        for j in range(d):
            v = vecs[:, j]
            out.append(np.array([_rayleigh(h, v) for h in hs]))
    return out
