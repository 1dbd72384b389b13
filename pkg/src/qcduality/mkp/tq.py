"""TQ difference equations, residue-form Bethe equations and the Q-factorized wave operator."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from ..checks import CheckResult
from ..exact import (is_exact, mpq, nullspace, padd, pderiv, pdegree, peval, pgcd, pmul, pscale,
                     pshift, ptrim)
from .chain import (DifferenceOperator, RatFunc, TauChain, first_order_factor, q_functions)
from .krichever import PoleError, QuasiPolynomial


class RootCollisionError(ValueError):
    """Two roots of the same Q-function coincide within tolerance."""


@dataclass
class TQSolution:
    """Outcome of a TQ solve: ``status`` is ``ok``, ``none`` or ``ambiguous``."""

    status: str
    q: QuasiPolynomial | None
    kernel_dimension: int
    singular_values: np.ndarray | None = field(default=None, repr=False)

    def __bool__(self) -> bool:
        return self.status == "ok"


def _exact_list(values: Sequence[Any]) -> bool:
    return all(is_exact(v) for v in values)


def _poly_power(y_shift: Any, j: int) -> list:
    """Coefficients of ``(x + y_shift)^j``."""
    out: list = [1]
    for _ in range(j):
        out = pmul(out, [y_shift, 1])
    return out


def _nullspace(columns: list[list], exact: bool, tol: float,
               sizes: Sequence[float] | None = None) -> tuple[list[list], np.ndarray | None]:
    """Basis of the kernel of the matrix with the given columns.

    Numerically, column ``j`` is divided by ``sizes[j]`` (the size of the terms
    summed into it) and singular values below ``tol`` count as zero.
    """
    rows = max(len(c) for c in columns)
    cols = len(columns)
    if exact:
        mat = [[mpq(columns[j][i]) if i < len(columns[j]) else mpq(0) for j in range(cols)] for i in range(rows)]
        return nullspace(mat), None
    mat = np.zeros((rows, cols), dtype=complex)
    for j, c in enumerate(columns):
        mat[:len(c), j] = [complex(v) for v in c]
    if sizes is None:
        sizes = np.linalg.norm(mat, axis=0)
    scale = np.maximum(np.asarray(sizes, dtype=float), 1e-300)
    _, s, vh = np.linalg.svd(mat / scale)
    rank = int(np.sum(s > tol))
    basis = [list(vh[k].conj() / scale) for k in range(rank, cols)]
    return basis, s


def _solve_monic(columns: list[list], d: int, base: Any, eta: Any, exact: bool, tol: float,
                 sizes: Sequence[float] | None = None) -> TQSolution:
    basis, s = _nullspace(columns, exact, tol, sizes)
    dim = len(basis)
    if dim == 0:
        return TQSolution("none", None, 0, s)
    if dim > 1:
        return TQSolution("ambiguous", None, dim, s)
    vec = basis[0]
    lead = vec[d]
    if (lead == 0) if exact else abs(lead) <= tol * max(abs(np.asarray(vec, dtype=complex))):
        return TQSolution("none", None, 1, s)
    poly = tuple(v / lead for v in vec)
    return TQSolution("ok", QuasiPolynomial(base, poly, eta), 1, s)


def tq_solve_q1(T_list: Sequence[Sequence[Any]], d: int, p1: Any, eta: Any,
                tol: float = 1e-9) -> TQSolution:
    """Monic ``Q_1 = p_1^{x/eta} q(x)``, ``deg q = d``, with ``sum_k (-1)^k T^k(x) Q_1(x - (k-1) eta) = 0``.

    ``T_list`` holds ascending coefficients of ``T^0 = phi, ..., T^n``.  The
    equation is linear in the coefficients of ``q``; after removing the common
    factor ``p_1^{x/eta}`` the ``k``-th term carries ``p_1^{1-k}``.  A kernel of
    dimension greater than one is reported as ``ambiguous``.
    """
    exact = _exact_list([c for T in T_list for c in T] + [p1, eta])
    columns, sizes = [], []
    for j in range(d + 1):
        col: list = [0]
        size = 0.0
        for k, T in enumerate(T_list):
            w = (-1) ** k * (mpq(p1) ** (1 - k) if exact else complex(p1) ** (1 - k))
            term = pscale(pmul(list(T), _poly_power(-(k - 1) * eta, j)), w)
            size += float(np.linalg.norm(np.asarray(term, dtype=complex)))
            col = padd(col, term)
        columns.append(col)
        sizes.append(size)
    return _solve_monic(columns, d, p1, eta, exact, tol, sizes)


def _qn1_terms(T_list: Sequence[Sequence[Any]], eta: Any, pn: Any):
    """Per-``a`` weights of the ``Q_{n-1}`` equation multiplied by ``prod_{s=-1}^{n} phi(x + s eta)``.

    Term ``a`` is ``(-1)^a p_n^{-a} T^a(x+(a-1)eta) q(x+(a-1)eta) / (phi(x+(a-1)eta) phi(x+a eta))``.
    """
    n = len(T_list) - 1
    phi = list(T_list[0])
    out = []
    for a, T in enumerate(T_list):
        w: list = pshift(list(T), (a - 1) * eta)
        for s in range(-1, n + 1):
            if s not in (a - 1, a):
                w = pmul(w, pshift(phi, s * eta))
        out.append(pscale(w, (-1) ** a / pn ** a))
    return out


def _det_g(T_list: Sequence[Sequence[Any]]) -> Any:
    """``det g`` from ``T^n = det g phi(x + eta)``."""
    top, phi = ptrim(list(T_list[-1])), ptrim(list(T_list[0]))
    return top[-1] / phi[-1]


def tq_solve_qn1(T_list: Sequence[Sequence[Any]], d: int, base: Any, eta: Any,
                 tol: float = 1e-9) -> TQSolution:
    """Monic ``Q_{n-1} = base^{x/eta} q(x)`` of degree ``d`` from the adjoint TQ relation."""
    exact = _exact_list([c for T in T_list for c in T] + [base, eta])
    if exact:
        base, eta = mpq(base), mpq(eta)
    pn = _det_g(T_list) / base
    terms = _qn1_terms(T_list, eta, pn)
    columns, sizes = [], []
    for j in range(d + 1):
        col: list = [0]
        size = 0.0
        for a, w in enumerate(terms):
            term = pmul(w, _poly_power((a - 1) * eta, j))
            size += float(np.linalg.norm(np.asarray(term, dtype=complex)))
            col = padd(col, term)
        columns.append(col)
        sizes.append(size)
    return _solve_monic(columns, d, base, eta, exact, tol, sizes)


def tq_residual(T_list: Sequence[Sequence[Any]], q: QuasiPolynomial, x: Any, which: str = "q1") -> tuple[Any, float]:
    """Value of the TQ combination at ``x`` and the size of its largest term."""
    eta = q.eta
    terms = []
    if which == "q1":
        for k, T in enumerate(T_list):
            terms.append((-1) ** k * peval(list(T), x) * q.shifted(-(k - 1)).polynomial(x))
    else:
        pn = _det_g(T_list) / q.base
        phi = list(T_list[0])
        for a, T in enumerate(T_list):
            y = x + (a - 1) * eta
            terms.append((-1) ** a / pn ** a * peval(list(T), y) * q.polynomial(y)
                         / (peval(phi, y) * peval(phi, x + a * eta)))
    total = sum(terms[1:], terms[0])
    return total, max(abs(complex(t)) for t in terms)


def tq_verify_q1(T_list, q: QuasiPolynomial, tol: float = 1e-10, points: int | None = None) -> bool:
    return _verify(T_list, q, "q1", tol, points)


def tq_verify_qn1(T_list: Sequence[Sequence[Any]], q: QuasiPolynomial, tol: float = 1e-10,
                  points: int | None = None) -> bool:
    """The adjoint TQ relation for ``Q_{n-1}`` at enough sample points to certify it identically.

    Exact data are checked exactly; floating data to relative tolerance ``tol``.
    """
    return _verify(T_list, q, "qn1", tol, points)


def _verify(T_list, q: QuasiPolynomial, which: str, tol: float, points: int | None) -> bool:
    n = len(T_list) - 1
    N = pdegree(list(T_list[0]))
    count = points or (N * (n + 2) + q.degree + 2)
    exact = _exact_list([c for T in T_list for c in T]) and is_exact(q.eta) and is_exact(q.base) \
        and _exact_list(q.poly)
    phi = list(T_list[0])
    k = 0
    done = 0
    while done < count:
        k += 1
        x = mpq(2 * k + 1, 7) if exact else complex(2 * k + 1) / 7 + 0.1j
        if which == "qn1" and any(peval(phi, x + s * q.eta) == 0 for s in range(-1, n + 1)):
            continue
        val, size = tq_residual(T_list, q, x, which)
        if exact:
            if val != 0:
                return False
        elif abs(complex(val)) > tol * max(size, 1e-300):
            return False
        done += 1
    return True


# ---------------------------------------------------------------------------
# Bethe equations
# ---------------------------------------------------------------------------

@dataclass
class BetheReport:
    """Per level ``m = 1..n-1``: ``|ratio + 1|`` of the triple ratio and the relative
    deviation of the product form from ``p_m / p_{m+1}``, one entry per root."""

    ratio_residuals: list[np.ndarray]
    product_residuals: list[np.ndarray]
    roots: list[np.ndarray]

    @property
    def max_residual(self) -> float:
        vals = [float(np.max(r)) for r in self.ratio_residuals + self.product_residuals if len(r)]
        return max(vals) if vals else 0.0

    def passed(self, tol: float = 1e-9) -> bool:
        return self.max_residual <= tol


def _as_q_list(chain) -> list[QuasiPolynomial]:
    if isinstance(chain, TauChain):
        return q_functions(chain)
    return list(chain)


def _check_collisions(roots: np.ndarray, m: int, tol: float = 1e-8) -> None:
    for a in range(len(roots)):
        for b in range(a + 1, len(roots)):
            if abs(roots[a] - roots[b]) <= tol * max(1.0, abs(roots[a])):
                raise RootCollisionError(f"roots {a + 1} and {b + 1} of Q_{m} coincide")


def bethe_verify(chain: TauChain | Sequence[QuasiPolynomial]) -> BetheReport:
    """Bethe equations at every root ``v`` of ``Q_m``, ``m = 1..n-1``.

    The triple ratio ``Q_{m+1}(v+eta) Q_m(v-eta) Q_{m-1}(v) / (Q_{m+1}(v) Q_m(v+eta) Q_{m-1}(v-eta))``
    is evaluated from the polynomial parts and bases (``Q_0 = 1``), and the
    product form from the roots; the ``Q_{m-1}`` product is absent at ``m = 1``.
    """
    qs = _as_q_list(chain)
    n = len(qs)
    eta = complex(qs[0].eta)
    levels = [QuasiPolynomial(1, (1,), qs[0].eta)] + qs
    roots = [np.array([], dtype=complex)] + [np.asarray(q.roots(), dtype=complex) for q in qs]
    for m in range(1, n):
        poly = list(levels[m].poly)
        if all(is_exact(c) for c in poly) and pdegree(pgcd(poly, pderiv(poly))) > 0:
            raise RootCollisionError(f"Q_{m} has a repeated root")
        _check_collisions(roots[m], m)
    polys = [np.asarray([complex(c) for c in q.poly]) for q in levels]
    bases = [complex(q.base) for q in levels]
    ev = lambda k, y: np.polyval(polys[k][::-1], y)
    ratio_res, prod_res = [], []
    for m in range(1, n):
        pm = bases[m] / bases[m - 1]
        pm1 = bases[m + 1] / bases[m]
        rr, pr = [], []
        for a, v in enumerate(roots[m]):
            num = ev(m + 1, v + eta) * ev(m, v - eta) * ev(m - 1, v)
            den = ev(m + 1, v) * ev(m, v + eta) * ev(m - 1, v - eta)
            if den == 0:
                raise PoleError(f"triple ratio has a vanishing denominator at root {a + 1} of Q_{m}")
            ratio = num / den * pm1 / pm
            rr.append(abs(ratio + 1))
            lhs = np.prod((v - roots[m + 1] + eta) / (v - roots[m + 1]))
            others = np.delete(roots[m], a)
            lhs *= np.prod((v - others - eta) / (v - others + eta))
            if m > 1:
                lhs *= np.prod((v - roots[m - 1]) / (v - roots[m - 1] - eta))
            target = pm / pm1
            pr.append(abs(lhs - target) / abs(target))
        ratio_res.append(np.array(rr))
        prod_res.append(np.array(pr))
    return BetheReport(ratio_res, prod_res, roots[1:])


def nested_bethe_residuals(g: Sequence[Any], w: Sequence[Sequence[Any]], eta: Any) -> list[np.ndarray]:
    """Nested Bethe equations in the spin-chain labelling, written as
    ``LHS / RHS - 1`` for ``b = 1..n-1``; ``w[0]`` are the inhomogeneities."""
    n = len(g)
    eta = complex(eta)
    w = [np.asarray(level, dtype=complex) for level in w] + [np.array([], dtype=complex)] * (n + 1 - len(w))
    out = []
    for b in range(1, n):
        res = []
        for a, v in enumerate(w[b]):
            lhs = complex(g[b - 1]) * np.prod((v - w[b - 1] + eta) / (v - w[b - 1]))
            others = np.delete(w[b], a)
            rhs = complex(g[b]) * np.prod((v - others + eta) / (v - others - eta))
            rhs *= np.prod((v - w[b + 1] - eta) / (v - w[b + 1]))
            res.append(abs(lhs / rhs - 1))
        out.append(np.array(res))
    return out


def chain_to_spin_labels(qs: Sequence[QuasiPolynomial]) -> tuple[list[complex], list[np.ndarray]]:
    """``g_b = p_{n-b+1}`` and ``w^{(b)} = v^{(n-b)}`` (``w^{(0)}`` are the roots of ``Q_n``)."""
    n = len(qs)
    bases = [1] + [complex(q.base) for q in qs]
    p = [bases[m] / bases[m - 1] for m in range(1, n + 1)]
    g = list(reversed(p))
    w = [np.asarray(qs[n - b - 1].roots() if n - b - 1 >= 0 else [], dtype=complex) for b in range(n)]
    return g, w


# ---------------------------------------------------------------------------
# wave operator from Q-functions and from transfer eigenvalues
# ---------------------------------------------------------------------------

def factorized_wave_operator(qs: Sequence[QuasiPolynomial]) -> DifferenceOperator:
    """``prod_{m=n..1} (1 - Q_m(x+eta) Q_{m-1}(x-eta) / (Q_m(x) Q_{m-1}(x)) S^{-1})`` with ``Q_0 = 1``."""
    eta = qs[0].eta
    levels = [QuasiPolynomial(1, (1,), eta)] + list(qs)
    out = DifferenceOperator.identity(eta)
    for m in range(len(qs), 0, -1):
        qm, qm1 = list(levels[m].poly), list(levels[m - 1].poly)
        ratio = levels[m].base / levels[m - 1].base
        u = RatFunc(tuple(pscale(pmul(pshift(qm, eta), pshift(qm1, -eta)), ratio)), tuple(pmul(qm, qm1)))
        out = out @ first_order_factor(u, eta)
    return out


def transfer_wave_operator(T_list: Sequence[Sequence[Any]], eta: Any) -> DifferenceOperator:
    """``sum_k (-1)^k T^k(x) / phi(x) S^{-k}``."""
    phi = tuple(T_list[0])
    return DifferenceOperator({-k: RatFunc(tuple(pscale(list(T), (-1) ** k)), phi)
                               for k, T in enumerate(T_list)}, eta)


def factorization_from_q_check(T_list: Sequence[Sequence[Any]], qs: Sequence[QuasiPolynomial],
                               tol: float = 1e-8) -> CheckResult:
    """The Q-factorized operator equals ``sum_k (-1)^k T^k / phi S^{-k}``; its adjoint shifted
    by ``-eta`` factorizes in reverse order with ``S`` in place of ``S^{-1}``."""
    start = time.perf_counter()
    eta = qs[0].eta
    W = factorized_wave_operator(qs)
    WT = transfer_wave_operator(T_list, eta)
    exact = all(is_exact(c) for q in qs for c in q.poly) and _exact_list([c for T in T_list for c in T])
    dev = 0.0 if exact and W.equals(WT) else W.deviation(WT)
    adj = W.adjoint()
    adj = DifferenceOperator({k: c.shift(-eta) for k, c in adj.terms.items()}, eta)
    levels = [QuasiPolynomial(1, (1,), eta)] + list(qs)
    rev = DifferenceOperator.identity(eta)
    for m in range(1, len(qs) + 1):
        qm, qm1 = list(levels[m].poly), list(levels[m - 1].poly)
        ratio = levels[m].base / levels[m - 1].base
        u = RatFunc(tuple(pscale(pmul(pshift(qm, eta), pshift(qm1, -eta)), ratio)), tuple(pmul(qm, qm1)))
        rev = rev @ first_order_factor(u, eta, direction=1)
    dev_adj = 0.0 if exact and adj.equals(rev) else adj.deviation(rev)
    passed = (dev == 0 and dev_adj == 0) if exact else max(dev, dev_adj) <= tol
    return CheckResult("q_factorization", passed, max(dev, dev_adj), time.perf_counter() - start,
                       {"operator": dev, "adjoint": dev_adj})


def regularity_check(chain: TauChain) -> CheckResult:
    """Every coefficient of the factorized wave operator times ``tau^(n)`` is a polynomial."""
    from .chain import wave_operator_factored
    start = time.perf_counter()
    W = wave_operator_factored(chain)
    top = tuple(chain.core_poly(chain.n))
    ok = True
    for k, c in W.terms.items():
        if not (c * RatFunc(top)).is_polynomial():
            ok = False
    return CheckResult("regularity", ok, 0.0, time.perf_counter() - start, {})


# ---------------------------------------------------------------------------
# spin chain side
# ---------------------------------------------------------------------------

def transfer_eigenvalues(spec, record) -> list[np.ndarray]:
    """Eigenvalue polynomials of ``T^0 = phi, T^1, ..., T^n`` on a joint eigenstate."""
    from ..quantum.coderivative import fundamental_transfer
    out = []
    for a in range(spec.n + 1):
        op = fundamental_transfer(spec, a)
        out.append(np.real_if_close(record.eigenvalue_of(op), tol=1e6))
    return out


def q_functions_from_record(spec, record, tol: float = 1e-9) -> tuple[list[QuasiPolynomial], list[TQSolution]]:
    """``Q_1`` from the TQ relation, ``Q_{n-1}`` from the adjoint relation (``n = 3``),
    and ``Q_n = (det g)^{x/eta} phi``; ``Q_0 = 1`` is implicit."""
    n = spec.n
    T = transfer_eigenvalues(spec, record)
    p = [complex(v) for v in spec.p]
    eta = complex(spec.eta)
    Ms = record.weights
    Nm = [sum(Ms[:m]) for m in range(n + 1)]
    qn = QuasiPolynomial(complex(np.prod(p)), tuple(complex(c) for c in spec.phi()), eta)
    if n == 1:
        return [qn], []
    sols = [tq_solve_q1(T, Nm[1], p[0], eta, tol)]
    qs: list = [sols[0].q]
    if n == 3:
        sols.append(tq_solve_qn1(T, Nm[2], p[0] * p[1], eta, tol))
        qs.append(sols[1].q)
    elif n > 3:
        raise NotImplementedError("Q-functions of intermediate levels need n <= 3")
    qs.append(qn)
    return qs, sols
