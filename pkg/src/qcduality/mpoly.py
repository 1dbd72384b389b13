"""Sparse multivariate polynomials over exact coefficients.

Just enough ring structure (``+ - *``, division by integers, powers) for the
generic symmetric-function code to run with polynomial valued arguments, for
example power sums of twist-matrix entries or of Miwa variables.
"""
from __future__ import annotations

from typing import Any, Iterator

from .exact import mpq


class MPoly:
    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict[tuple[int, ...], Any] | None = None):
        self.nvars = nvars
        self.terms = {m: c for m, c in (terms or {}).items() if c != 0}

    # construction -----------------------------------------------------------
    @classmethod
    def constant(cls, nvars: int, value: Any) -> "MPoly":
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def variable(cls, nvars: int, index: int, coef: Any = 1) -> "MPoly":
        exp = [0] * nvars
        exp[index] = 1
        return cls(nvars, {tuple(exp): coef})

    def _coerce(self, other: Any) -> "MPoly":
        if isinstance(other, MPoly):
            return other
        return MPoly.constant(self.nvars, other)

    # ring operations --------------------------------------------------------
    def __add__(self, other: Any) -> "MPoly":
        other = self._coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return MPoly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> "MPoly":
        return MPoly(self.nvars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: Any) -> "MPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other: Any) -> "MPoly":
        return self._coerce(other) - self

    def __mul__(self, other: Any) -> "MPoly":
        if not isinstance(other, MPoly):
            if other == 0:
                return MPoly(self.nvars)
            return MPoly(self.nvars, {m: c * other for m, c in self.terms.items()})
        out: dict[tuple[int, ...], Any] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return MPoly(self.nvars, out)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> "MPoly":
        if isinstance(other, MPoly):
            raise TypeError("division by a polynomial is not supported")
        inv = mpq(1) / mpq(other)
        return MPoly(self.nvars, {m: c * inv for m, c in self.terms.items()})

    def __pow__(self, k: int) -> "MPoly":
        out = MPoly.constant(self.nvars, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other: Any) -> bool:
        other = self._coerce(other)
        return (self - other).terms == {}

    def __hash__(self) -> int:  # pragma: no cover - polynomials are mutable-free but unhashed
        return hash(frozenset(self.terms.items()))

    # inspection -------------------------------------------------------------
    def __iter__(self) -> Iterator[tuple[tuple[int, ...], Any]]:
        return iter(sorted(self.terms.items()))

    def __len__(self) -> int:
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, monomial: tuple[int, ...]) -> Any:
        return self.terms.get(tuple(monomial), 0)

    def evaluate(self, values) -> Any:
        total = 0
        for m, c in self.terms.items():
            term = c
            for v, e in zip(values, m):
                if e:
                    term = term * v ** e
            total = total + term
        return total

    def total_degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def __repr__(self) -> str:
        if not self.terms:
            return "MPoly(0)"
        parts = []
        for m, c in sorted(self.terms.items()):
            mono = "*".join(f"v{i}^{e}" if e > 1 else f"v{i}" for i, e in enumerate(m) if e)
            parts.append(f"{c}" + (f"*{mono}" if mono else ""))
        return "MPoly(" + " + ".join(parts) + ")"
