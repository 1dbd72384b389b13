"""Symmetric functions in power-sum times.

Partitions, complete and elementary symmetric polynomials ``h_k(t)``,
``e_k(t)``, Schur polynomials through both Jacobi-Trudi determinants and Miwa
shifts ``t -> t +- [1/z]``.  Everything is written against ring operations
only, so the times may be exact rationals, complex numbers or polynomials.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterator, Sequence

from .exact import det_laplace, mpq


class TruncationError(ValueError):
    """A time vector is shorter than an operation requires."""


def _div(value: Any, k: int) -> Any:
    # keep integers exact instead of drifting into floats
    if isinstance(value, int):
        return mpq(value, k)
    return value / k


# ---------------------------------------------------------------------------
# partitions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Partition:
    parts: tuple[int, ...] = ()

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        if any(p < 0 for p in parts):
            raise ValueError(f"negative part in {parts}")
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise ValueError(f"parts must be weakly decreasing, got {parts}")
        while parts and parts[-1] == 0:
            parts = parts[:-1]
        object.__setattr__(self, "parts", parts)

    @property
    def size(self) -> int:
        return sum(self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    def part(self, i: int) -> int:
        """``lambda_i`` with 1-based ``i``; zero beyond the length."""
        return self.parts[i - 1] if 1 <= i <= len(self.parts) else 0

    def conjugate(self) -> "Partition":
        return conjugate(self)

    def __iter__(self) -> Iterator[int]:
        return iter(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.parts)) + ")"


def as_partition(lam: Partition | Sequence[int]) -> Partition:
    return lam if isinstance(lam, Partition) else Partition(tuple(lam))


def conjugate(lam: Partition | Sequence[int]) -> Partition:
    lam = as_partition(lam)
    if not lam.parts:
        return Partition(())
    return Partition(tuple(sum(1 for p in lam.parts if p >= j) for j in range(1, lam.parts[0] + 1)))


def partitions_of(size: int, max_part: int | None = None) -> Iterator[Partition]:
    """All partitions of ``size`` in reverse lexicographic order."""
    max_part = size if max_part is None else max_part

    def rec(rest: int, cap: int) -> Iterator[tuple[int, ...]]:
        if rest == 0:
            yield ()
            return
        for first in range(min(rest, cap), 0, -1):
            for tail in rec(rest - first, first):
                yield (first,) + tail

    for parts in rec(size, max_part):
        yield Partition(parts)


def partitions_up_to(max_size: int, max_length: int | None = None,
                     max_part: int | None = None) -> list[Partition]:
    out = []
    for size in range(max_size + 1):
        for lam in partitions_of(size):
            if max_length is not None and lam.length > max_length:
                continue
            if max_part is not None and lam.length and lam.parts[0] > max_part:
                continue
            out.append(lam)
    return out


# ---------------------------------------------------------------------------
# time vectors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TimeVector:
    """Times ``t_1 .. t_K``; ``K = len(values)`` is the truncation order."""

    values: tuple[Any, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if len(self.values) < 1:
            raise ValueError("a time vector needs K >= 1")

    @classmethod
    def zeros(cls, K: int, zero: Any = None) -> "TimeVector":
        return cls(tuple(mpq(0) if zero is None else zero for _ in range(K)))

    @property
    def K(self) -> int:
        return len(self.values)

    def __getitem__(self, k: int) -> Any:
        """``t_k`` with 1-based ``k``."""
        if not 1 <= k <= self.K:
            raise TruncationError(f"t_{k} requested from a time vector truncated at K={self.K}")
        return self.values[k - 1]

    def require(self, k: int) -> None:
        if self.K < k:
            raise TruncationError(f"operation needs K >= {k}, time vector has K={self.K}")

    def __neg__(self) -> "TimeVector":
        return TimeVector(tuple(-v for v in self.values))

    def __add__(self, other: "TimeVector") -> "TimeVector":
        K = min(self.K, other.K)
        return TimeVector(tuple(a + b for a, b in zip(self.values[:K], other.values[:K])))

    def __sub__(self, other: "TimeVector") -> "TimeVector":
        return self + (-other)

    def scaled(self, c: Any) -> "TimeVector":
        return TimeVector(tuple(c * v for v in self.values))

    def xi(self, z: Any) -> Any:
        """``xi(t, z) = sum_k t_k z^k`` over the stored (finitely many) times."""
        total = 0
        zk = 1
        for v in self.values:
            zk = zk * z
            total = total + v * zk
        return total

    def nonzero_order(self) -> int:
        """Largest ``k`` with ``t_k != 0`` (zero for the null vector)."""
        last = 0
        for k, v in enumerate(self.values, start=1):
            if v != 0:
                last = k
        return last


def as_times(t: TimeVector | Sequence[Any]) -> TimeVector:
    return t if isinstance(t, TimeVector) else TimeVector(tuple(t))


# ---------------------------------------------------------------------------
# h, e and Schur polynomials
# ---------------------------------------------------------------------------

def h_sequence(kmax: int, t: TimeVector) -> list:
    """``[h_0, ..., h_kmax]`` via ``k h_k = sum_m m t_m h_{k-m}``."""
    t = as_times(t)
    t.require(kmax)
    h: list = [1]
    for k in range(1, kmax + 1):
        acc = 0
        for m in range(1, k + 1):
            acc = acc + (m * t[m]) * h[k - m]
        h.append(_div(acc, k))
    return h


def h_poly(k: int, t: TimeVector) -> Any:
    if k < 0:
        return 0
    return h_sequence(k, t)[k]


def e_sequence(kmax: int, t: TimeVector) -> list:
    h = h_sequence(kmax, -as_times(t))
    return [h[k] if k % 2 == 0 else -h[k] for k in range(kmax + 1)]


def e_poly(k: int, t: TimeVector) -> Any:
    if k < 0:
        return 0
    return e_sequence(k, t)[k]


def jacobi_trudi_h(lam: Partition | Sequence[int], h: Sequence[Any]) -> Any:
    """``det_{i,j <= l(lam)} h_{lam_i - i + j}`` from a precomputed h-sequence."""
    lam = as_partition(lam)
    ell = lam.length

    def entry(i: int, j: int) -> Any:
        m = lam.part(i) - i + j
        if m < 0:
            return 0
        return h[m] if m < len(h) else 0

    mat = [[entry(i, j) for j in range(1, ell + 1)] for i in range(1, ell + 1)]
    return det_laplace(mat)


def jacobi_trudi_e(lam: Partition | Sequence[int], e: Sequence[Any]) -> Any:
    """Dual form ``det_{i,j <= lam_1} e_{lam'_i - i + j}``."""
    lam = as_partition(lam)
    return jacobi_trudi_h(conjugate(lam), e)


def schur(lam: Partition | Sequence[int], t: TimeVector) -> Any:
    lam = as_partition(lam)
    t = as_times(t)
    t.require(lam.size)
    if lam.size == 0:
        return 1
    return jacobi_trudi_h(lam, h_sequence(lam.size, t))


def schur_dual(lam: Partition | Sequence[int], t: TimeVector) -> Any:
    lam = as_partition(lam)
    t = as_times(t)
    t.require(lam.size)
    if lam.size == 0:
        return 1
    return jacobi_trudi_e(lam, e_sequence(lam.size, t))


def miwa_shift(t: TimeVector, z: Any, sign: int) -> TimeVector:
    """``t + sign [1/z]``, i.e. ``t_k -> t_k + sign z^{-k} / k``."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if z == 0:
        raise ZeroDivisionError("Miwa shift needs a nonzero spectral parameter")
    t = as_times(t)
    out = []
    inv = 1 / z if not isinstance(z, int) else mpq(1, z)
    power = 1
    for k, v in enumerate(t.values, start=1):
        power = power * inv
        out.append(v + sign * _div(power, k))
    return TimeVector(tuple(out))


def miwa_point(z: Any, K: int, sign: int = 1) -> TimeVector:
    """``sign [1/z]`` alone, truncated at order ``K``."""
    return miwa_shift(TimeVector.zeros(K, zero=0), z, sign)


def power_sum_times(xi: Sequence[Any], K: int) -> TimeVector:
    """Times ``t_k = (1/k) sum_i xi_i^k`` for ``k = 1..K``."""
    vals = []
    for k in range(1, K + 1):
        acc = 0
        for v in xi:
            acc = acc + v ** k
        vals.append(_div(acc, k))
    return TimeVector(tuple(vals))


def schur_from_eigenvalues(lam: Partition | Sequence[int], xi: Sequence[Any]) -> Any:
    lam = as_partition(lam)
    if lam.size == 0:
        return 1
    return schur(lam, power_sum_times(xi, lam.size))


def elementary_symmetric(xi: Sequence[Any], k: int) -> Any:
    """``e_k`` of a finite list of numbers (direct product expansion)."""
    coeffs: list = [1]
    for v in xi:
        coeffs = [coeffs[0]] + [coeffs[i] + coeffs[i - 1] * v for i in range(1, len(coeffs))] + [coeffs[-1] * v]
    return coeffs[k] if 0 <= k < len(coeffs) else 0
