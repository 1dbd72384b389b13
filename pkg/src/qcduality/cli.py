"""Batch front end: ``qcduality run <config> [--out PATH] [--seed S] [--threads K]``.

Configs and reports are JSON.  Exact rationals travel as ``"a/b"`` strings,
complex numbers as ``[re, im]`` pairs.  Exit codes: 0 all checks pass, 1 a
check failed, 2 the config could not be read, 3 a budget was exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from . import __version__
from .checks import CheckResult
from .exact import RationalParseError, format_scalar, is_exact, mpq, parse_rational
from .quantum.chain import MAX_DIMENSION, BudgetError, ChainSpec, DegenerateSpecError, check_dimension

SCHEMA = 1
MODES = ("verify-cbr", "verify-hirota", "spectrum", "duality", "mkp-demo", "solve")
EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_BUDGET = 0, 1, 2, 3


class ConfigError(ValueError):
    """Invalid configuration; ``path`` locates the offending entry."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


@dataclass
class Budgets:
    max_lambda: int = 4
    K: int = 4
    max_dimension: int = MAX_DIMENSION


@dataclass
class Tolerances:
    spectral: float = 1e-8
    finite_difference: float = 1e-4
    bethe: float = 1e-9
    kernel: float = 1e-10
    wave: float = 1e-12


@dataclass
class RunConfig:
    mode: str
    seed: int
    chain: ChainSpec | None = None
    krichever: Any = None
    budgets: Budgets = field(default_factory=Budgets)
    tolerances: Tolerances = field(default_factory=Tolerances)
    options: dict = field(default_factory=dict)
    output: str | None = None
    raw: dict = field(default_factory=dict, repr=False)


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def _rational(value: Any, path: str) -> Any:
    try:
        return parse_rational(value)
    except RationalParseError as exc:
        raise ConfigError(path, str(exc)) from None


def _require(raw: dict, key: str, path: str) -> Any:
    if key not in raw:
        raise ConfigError(f"{path}.{key}" if path else key, "missing required entry")
    return raw[key]


def _parse_chain(raw: Any) -> ChainSpec:
    if not isinstance(raw, dict):
        raise ConfigError("chain", "expected an object")
    n = _require(raw, "n", "chain")
    N = _require(raw, "N", "chain")
    if not isinstance(n, int) or not isinstance(N, int) or isinstance(n, bool) or isinstance(N, bool):
        raise ConfigError("chain", "n and N must be integers")
    eta = _rational(_require(raw, "eta", "chain"), "chain.eta")
    xs = _require(raw, "x", "chain")
    if "p" in raw:
        ps, reverse = raw["p"], False
    elif "g" in raw:
        ps, reverse = raw["g"], True
    else:
        raise ConfigError("chain.p", "missing required entry (or give chain.g)")
    if not isinstance(xs, list) or not isinstance(ps, list):
        raise ConfigError("chain", "x and p must be lists")
    x = [_rational(v, f"chain.x[{i}]") for i, v in enumerate(xs)]
    p = [_rational(v, f"chain.{'g' if reverse else 'p'}[{i}]") for i, v in enumerate(ps)]
    try:
        return ChainSpec.from_g(n, N, eta, x, p) if reverse else ChainSpec(n, N, eta, tuple(x), tuple(p))
    except DegenerateSpecError as exc:
        raise ConfigError("chain", str(exc)) from None


def _parse_krichever(raw: Any):
    from .mkp.krichever import KricheverData
    if not isinstance(raw, dict):
        raise ConfigError("krichever", "expected an object")
    eta = _rational(_require(raw, "eta", "krichever"), "krichever.eta")
    pts = _require(raw, "points", "krichever")
    coeffs = _require(raw, "coeffs", "krichever")
    if not isinstance(pts, list) or not isinstance(coeffs, list) or len(pts) != len(coeffs):
        raise ConfigError("krichever", "points and coeffs must be lists of equal length")
    points = [_rational(v, f"krichever.points[{i}]") for i, v in enumerate(pts)]
    rows = []
    for i, row in enumerate(coeffs):
        if not isinstance(row, list):
            raise ConfigError(f"krichever.coeffs[{i}]", "expected a list")
        rows.append(tuple(_rational(v, f"krichever.coeffs[{i}][{m}]") for m, v in enumerate(row)))
    try:
        return KricheverData(eta, tuple(points), tuple(rows))
    except ValueError as exc:
        raise ConfigError("krichever", str(exc)) from None


def _parse_dataclass(cls, raw: Any, path: str):
    if raw is None:
        return cls()
    if not isinstance(raw, dict):
        raise ConfigError(path, "expected an object")
    known = {f for f in cls.__dataclass_fields__}
    for key in raw:
        if key not in known:
            raise ConfigError(f"{path}.{key}", "unknown entry")
    out = cls(**raw)
    for key, value in asdict(out).items():
        if isinstance(value, bool) or not isinstance(value, (int, float)) or value <= 0:
            raise ConfigError(f"{path}.{key}", f"must be a positive number, got {value!r}")
    return out


def parse_config(raw: Any) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("", "config must be a JSON object")
    mode = _require(raw, "mode", "")
    if mode not in MODES:
        raise ConfigError("mode", f"unknown mode {mode!r}; expected one of {', '.join(MODES)}")
    seed = _require(raw, "seed", "")
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ConfigError("seed", "must be a non-negative integer")
    chain = _parse_chain(raw["chain"]) if "chain" in raw else None
    krichever = _parse_krichever(raw["krichever"]) if "krichever" in raw else None
    if mode == "mkp-demo" and krichever is None:
        raise ConfigError("krichever", "mode mkp-demo needs Krichever data")
    if mode != "mkp-demo" and chain is None:
        raise ConfigError("chain", f"mode {mode} needs a chain")
    options = raw.get("options", {})
    if not isinstance(options, dict):
        raise ConfigError("options", "expected an object")
    if mode == "solve" and chain is not None:
        sectors = options.get("sectors", "all")
        if sectors != "all":
            if not isinstance(sectors, list):
                raise ConfigError("options.sectors", "expected \"all\" or a list of multiplicity vectors")
            for i, M in enumerate(sectors):
                if (not isinstance(M, list) or len(M) != chain.n
                        or any(not isinstance(m, int) or m < 0 for m in M)):
                    raise ConfigError(f"options.sectors[{i}]", f"expected {chain.n} non-negative integers")
                if sum(M) != chain.N:
                    raise ConfigError(f"options.sectors[{i}]", f"multiplicities sum to {sum(M)}, need N = {chain.N}")
    return RunConfig(mode=mode, seed=seed, chain=chain, krichever=krichever,
                     budgets=_parse_dataclass(Budgets, raw.get("budgets"), "budgets"),
                     tolerances=_parse_dataclass(Tolerances, raw.get("tolerances"), "tolerances"),
                     options=options, output=raw.get("output"), raw=raw)


def load_config(path: str | Path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("", f"cannot read {path}: {exc.strerror}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}, column {exc.colno}", exc.msg) from None
    return parse_config(raw)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, str) or value is None:
        return value
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, int):
        return value
    if is_exact(value):
        return format_scalar(value)
    if isinstance(value, (complex, np.complexfloating)) or type(value).__name__ == "mpc":
        value = complex(value)
        return [float(value.real), float(value.imag)]
    return float(value)


def _record(check: CheckResult, seed: int) -> dict:
    out = check.as_dict()
    if not check.passed:
        out["seed"] = seed
    return out


def _fan_out(fn: Callable[[Any], Any], items: Sequence[Any], threads: int) -> list:
    if threads <= 1 or len(items) <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# pipelines
# ---------------------------------------------------------------------------

def _run_cbr(cfg: RunConfig, threads: int) -> dict:
    from .quantum.coderivative import fundamental_transfer, transfer_lambda
    from .quantum.identities import DEFAULT_MAX_SIZE, cbr_verify
    from .quantum.operators import OperatorPolynomial
    from .symfun import partitions_up_to
    spec = cfg.chain
    if not spec.exact:
        raise ConfigError("chain", "verify-cbr needs exact rational data")
    if cfg.budgets.max_lambda > DEFAULT_MAX_SIZE:
        raise BudgetError(f"max_lambda = {cfg.budgets.max_lambda} exceeds the supported budget {DEFAULT_MAX_SIZE}")
    lams = [lam for lam in partitions_up_to(cfg.budgets.max_lambda) if lam.size > 0]
    short = [lam for lam in lams if lam.length <= spec.n]
    long = [lam for lam in lams if lam.length > spec.n]
    checks = _fan_out(lambda lam: cbr_verify(spec, lam, max_size=cfg.budgets.max_lambda), short, threads)
    for lam in long:
        ok = transfer_lambda(spec, lam).is_zero()
        checks.append(CheckResult(f"vanishing{lam}", ok, 0.0 if ok else float("nan")))
    top = fundamental_transfer(spec, spec.n)
    from .exact import pscale, pshift
    expect = OperatorPolynomial.scalar(pscale(pshift(spec.phi(), spec.eta), spec.det_g()), spec.dim, True,
                                       spec.sectors())
    checks.append(CheckResult("top_exterior_power", top.equals(expect), 0.0))
    return {"checks": checks}


def _run_hirota(cfg: RunConfig, threads: int) -> dict:
    from .quantum.identities import hirota_3term_verify
    if not cfg.chain.exact:
        raise ConfigError("chain", "verify-hirota needs exact rational data")
    return {"checks": [hirota_3term_verify(cfg.chain)]}


def _state_row(spec: ChainSpec, rec, duality=None, bethe=None) -> dict:
    row = {"index": rec.index, "sector": list(rec.weights), "H": rec.H,
           "joint_residual": rec.residual, "collision": rec.collision}
    if duality is not None:
        row["duality_residual"] = duality.residual
    if bethe is not None:
        row.update(bethe)
    return row


def _bethe_for_record(spec: ChainSpec, rec, tol: float) -> tuple[dict, list[CheckResult]]:
    from .duality.lax import eig3_eval
    from .mkp.tq import bethe_verify, q_functions_from_record
    qs, sols = q_functions_from_record(spec, rec)
    info: dict = {"tq_status": [s.status for s in sols]}
    checks = []
    tag = f"{tuple(rec.weights)}#{rec.index}"
    if all(s.status == "ok" for s in sols):
        report = bethe_verify(qs)
        info["bethe_roots"] = [r for r in report.roots[:-1]]
        info["bethe_residual"] = report.max_residual
        checks.append(CheckResult(f"bethe{tag}", report.passed(tol), report.max_residual))
        w = qs[-2].roots() if len(qs) > 1 else []
        H = eig3_eval(spec, w)
        dev = float(np.max(np.abs(H - rec.H)) / max(1.0, np.max(np.abs(rec.H))))
        info["eig3_deviation"] = dev
        checks.append(CheckResult(f"eig3{tag}", dev < tol, dev))
    else:
        checks.append(CheckResult(f"tq{tag}", False, float("nan"), details={"status": info["tq_status"]}))
    return info, checks


def _run_spectrum(cfg: RunConfig, threads: int, with_duality: bool) -> dict:
    from .duality.lax import duality_verify
    from .quantum.spectrum import joint_spectrum
    spec = cfg.chain
    check_dimension(spec, cfg.budgets.max_dimension)
    records = joint_spectrum(spec, cfg.seed, tol=min(1e-10, cfg.tolerances.spectral))
    checks = [CheckResult("state_count", len(records) == spec.dim, 0.0,
                          details={"found": len(records), "expected": spec.dim})]
    states = []
    want_bethe = bool(cfg.options.get("bethe", False)) and spec.n <= 3
    for rec in records:
        dual = duality_verify(spec, rec, cfg.tolerances.spectral) if with_duality else None
        if dual is not None:
            checks.append(dual)
        bethe = None
        if want_bethe:
            bethe, extra = _bethe_for_record(spec, rec, cfg.tolerances.bethe)
            checks.extend(extra)
        states.append(_state_row(spec, rec, dual, bethe))
    return {"checks": checks, "states": states}


def _run_solve(cfg: RunConfig, threads: int) -> dict:
    from .duality.lax import SpectrumTarget
    from .duality.solve import SolveConfig, match_multisets, solve_spectrum, weight_vectors
    spec = cfg.chain
    sectors = cfg.options.get("sectors", "all")
    sectors = weight_vectors(spec.n, spec.N) if sectors == "all" else [tuple(M) for M in sectors]
    scfg = SolveConfig(accept_tol=cfg.tolerances.spectral,
                       eta_start=cfg.options.get("eta_start"))
    results = _fan_out(lambda M: solve_spectrum(spec, SpectrumTarget(tuple(spec.p), M), config=scfg),
                       sectors, threads)
    checks, states = [], []
    from math import factorial
    total = 0
    for M, res in zip(sectors, results):
        expected = factorial(spec.N)
        for m in M:
            expected //= factorial(m)
        total += res.count
        checks.append(CheckResult(f"solve{tuple(M)}", res.count == expected and not res.failures,
                                  max(res.residuals, default=0.0),
                                  res.elapsed, {"found": res.count, "expected": expected}))
        for H, r in zip(res.solutions, res.residuals):
            states.append({"sector": list(M), "H": H, "duality_residual": r})
        if sum(1 for m in M if m) == 1 and res.count == 1:
            # single occupied index: H_i = p_a prod_k (x_i - x_k + eta)/(x_i - x_k)
            num = spec.numeric()
            a = next(i for i, m in enumerate(M) if m)
            closed = [complex(num.p[a]) * np.prod([(xi - xk + num.eta) / (xi - xk)
                                                   for k, xk in enumerate(num.x) if k != i])
                      for i, xi in enumerate(num.x)]
            dev = float(np.max(np.abs(res.solutions[0] - np.array(closed)) / np.maximum(np.abs(closed), 1.0)))
            checks.append(CheckResult(f"highest_weight{tuple(M)}", dev < cfg.tolerances.spectral, dev))
        for f in res.failures:
            states.append({"sector": list(M), "failure": f})
    if cfg.options.get("cross_validate", False) and spec.dim <= cfg.budgets.max_dimension:
        from .quantum.spectrum import brute_force_hamiltonian_spectrum
        ref = brute_force_hamiltonian_spectrum(spec, cfg.seed)
        if len(sectors) == len(weight_vectors(spec.n, spec.N)):
            dev = match_multisets([s["H"] for s in states if "H" in s], ref)
            checks.append(CheckResult("brute_force_match", dev < cfg.tolerances.spectral, dev))
    return {"checks": checks, "states": states}


def _run_mkp(cfg: RunConfig, threads: int) -> dict:
    from .mkp.chain import (dressing_recurrence_check, factorization_check, kernel_check,
                            q_functions, undress_chain)
    from .mkp.krichever import (krichever_residuals, tau_quasipoly, wave_reduced)
    from .mkp.tq import bethe_verify, regularity_check
    from .symfun import TimeVector
    data = cfg.krichever
    tol = cfg.tolerances
    exact = data.exact
    checks: list[CheckResult] = []
    t0 = TimeVector.zeros(1)
    tq = tau_quasipoly(data, t0)
    checks.append(CheckResult("tau_degree", tq.degree == data.N, 0.0,
                              details={"degree": tq.degree, "N": data.N}))
    xs = [mpq(2 * k + 1, 9) for k in range(3)] if exact else [complex(2 * k + 1) / 9 for k in range(3)]
    worst = 0.0
    for x in xs:
        worst = max([worst] + [abs(complex(v)) for v in krichever_residuals(data, x, t0)])
    checks.append(CheckResult("krichever_conditions", worst <= tol.kernel, worst))
    z = mpq(7, 3) if exact else complex(7 / 3)
    dev = max(abs(complex(wave_reduced(data, x, t0, z, "det") - wave_reduced(data, x, t0, z, "tau")))
              / max(abs(complex(wave_reduced(data, x, t0, z, "tau"))), 1e-300) for x in xs)
    checks.append(CheckResult("wave_forms", dev <= tol.wave, dev))
    chain = undress_chain(data)
    bottom = chain.core(0, xs[0])
    checks.append(CheckResult("chain_bottom", bottom == 1, 0.0, details={"depth": chain.n}))
    ratios = chain.report.get("residue_ratios", [])
    if ratios:
        rdev = max(abs(complex(r) - 1) for r in ratios)
        checks.append(CheckResult("residue_step", rdev < 1e-8, rdev))
    checks.append(factorization_check(chain))
    checks.append(kernel_check(data, chain, seed=cfg.seed))
    checks.append(dressing_recurrence_check(chain, xs[1], z))
    qs = q_functions(chain)
    report = bethe_verify(qs)
    checks.append(CheckResult("bethe", report.passed(tol.bethe), report.max_residual))
    if report.passed(tol.bethe) and exact:
        checks.append(regularity_check(chain))
    tables = [{"level": m, "base": q.base, "degree": q.degree, "roots": q.roots()}
              for m, q in enumerate(qs, start=1)]
    return {"checks": checks, "q_functions": tables,
            "bethe_residuals": [{"level": m, "ratio": r, "product": p} for m, (r, p) in
                                enumerate(zip(report.ratio_residuals, report.product_residuals), start=1)]}


def execute(cfg: RunConfig, threads: int = 1) -> tuple[dict, int]:
    """Run the configured pipeline; returns the report and the exit code."""
    body: dict
    try:
        if cfg.chain is not None and cfg.mode in ("verify-cbr", "verify-hirota", "spectrum", "duality", "solve"):
            check_dimension(cfg.chain, cfg.budgets.max_dimension)
        if cfg.mode == "verify-cbr":
            body = _run_cbr(cfg, threads)
        elif cfg.mode == "verify-hirota":
            body = _run_hirota(cfg, threads)
        elif cfg.mode == "spectrum":
            body = _run_spectrum(cfg, threads, with_duality=False)
        elif cfg.mode == "duality":
            body = _run_spectrum(cfg, threads, with_duality=True)
        elif cfg.mode == "solve":
            body = _run_solve(cfg, threads)
        else:
            body = _run_mkp(cfg, threads)
    except BudgetError as exc:
        return _report(cfg, {"error": {"kind": "budget", "message": str(exc)}, "status": "budget"}), EXIT_BUDGET
    except (ArithmeticError, ValueError, RuntimeError) as exc:
        # a pipeline that cannot finish is a failure, never a partial pass
        err = {"kind": type(exc).__name__, "message": str(exc), "seed": cfg.seed}
        return _report(cfg, {"error": err, "status": "fail"}), EXIT_FAIL
    checks = body.pop("checks")
    passed = all(c.passed for c in checks)
    report = _report(cfg, {"checks": [_record(c, cfg.seed) for c in checks], **body,
                           "status": "pass" if passed else "fail"})
    return report, EXIT_OK if passed else EXIT_FAIL


def _report(cfg: RunConfig, body: dict) -> dict:
    echo = dict(cfg.raw)
    echo["seed"] = cfg.seed
    return jsonable({"schema": SCHEMA, "version": __version__, "config": echo, **body})


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def run(config: RunConfig | dict | str | Path, out: str | Path | None = None,
        threads: int = 1) -> tuple[dict, int]:
    """Parse (if needed), execute and write the report; config errors give exit code 2."""
    try:
        if isinstance(config, (str, Path)):
            cfg = load_config(config)
        elif isinstance(config, dict):
            cfg = parse_config(config)
        else:
            cfg = config
    except ConfigError as exc:
        return {"schema": SCHEMA, "version": __version__,
                "error": {"kind": "config", "path": exc.path, "message": str(exc)}}, EXIT_CONFIG
    report, code = execute(cfg, threads)
    target = out or cfg.output
    if target:
        Path(target).write_text(dumps(report))
    return report, code


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="qcduality", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="execute a configuration file")
    runp.add_argument("config")
    runp.add_argument("--out", default=None, help="report path (default: config 'output' or stdout)")
    runp.add_argument("--seed", type=int, default=None, help="override the config seed")
    runp.add_argument("--threads", type=int, default=1)
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            if args.seed < 0 or args.seed >= 2 ** 64:
                raise ConfigError("--seed", "must be an unsigned 64-bit integer")
            cfg.seed = args.seed
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    report, code = run(cfg, args.out, max(1, args.threads))
    if not (args.out or cfg.output):
        sys.stdout.write(dumps(report))
    if code == EXIT_BUDGET:
        print(f"budget exceeded: {report['error']['message']}", file=sys.stderr)
    elif code == EXIT_FAIL:
        if "error" in report:
            print(f"run failed: {report['error']['kind']}: {report['error']['message']}", file=sys.stderr)
        else:
            failed = [c["name"] for c in report.get("checks", []) if c["status"] == "fail"]
            print(f"{len(failed)} check(s) failed: {', '.join(failed[:10])}", file=sys.stderr)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
