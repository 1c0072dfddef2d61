"""Command-line front end: ``norm``, ``transform`` and ``verify``.

Exit codes: 0 success, 2 usage or configuration error, 3 computation
anomaly (failed integration, empty transform support, failed criterion).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
import warnings
from typing import Dict, List, Optional, Sequence

import numpy as np

from .extended import IntegrationError, NormReport
from .gls import (
    EmptySupportError, PsiFunction, fundamental_function, log_orlicz_function, orlicz_function,
    sigma_transform, tau_transform, theta_transform,
)
from .operators import (
    Composition, LinearSubstitution, Multiplicative, Product, composition_norm,
    independent_product_norm, linear_substitution_norm, multiplicative_norm, product_norm_bound,
)
from .pushforward import UnsupportedTransformError
from .serialize import ConfigError, JobConfig, decode_number, load_config, psi_from_dict
from .verification import SUITES, run_suite

EXIT_OK, EXIT_CONFIG, EXIT_ANOMALY = 0, 2, 3

NORM_SCHEMA = "sharpnorm.norm v1"
NORM_COLUMNS = ("p", "q", "value", "finite", "method", "abs_error", "diagnostics")
TRANSFORM_SCHEMA = "sharpnorm.transform v1"


class Anomaly(RuntimeError):
    """A computation could not be completed reliably."""


def fmt_num(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


# ---------------------------------------------------------------------------
# output

def write_atomic(path: str, text: str):
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".sharpnorm-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def render_table(rows: List[Dict[str, str]], columns: Sequence[str], fmt: str,
                 comments: Sequence[str] = ()) -> str:
    if fmt == "json":
        return json.dumps([{c: r[c] for c in columns} for r in rows], indent=2) + "\n"
    buf = io.StringIO()
    for c in comments:
        buf.write(f"# {c}\n")
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({c: r[c] for c in columns})
    return buf.getvalue()


def emit(text: str, out: Optional[str]):
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# norm

def norm_row(cfg: JobConfig, p: float, q: float) -> Dict[str, str]:
    op, mu, nu, tol = cfg.operator, cfg.mu, cfg.target, cfg.tol
    diag = ""
    err = 0.0
    if isinstance(op, Composition):
        z = op.derivative(mu, nu)
        rep: NormReport = composition_norm(z, p, q, nu, tol, full_output=True)
        method = "quadrature" if rep.converged or rep.divergence_reason else "quadrature_unconverged"
        if not rep.finite:
            method = "divergent"
        value, err, diag = rep.value, rep.abs_error_estimate, rep.divergence_reason or ""
    elif isinstance(op, Multiplicative):
        rep = multiplicative_norm(op.g, p, q, mu, tol, full_output=True)
        method = "ess_sup" if p == q else "quadrature"
        if not rep.finite:
            method = "divergent"
        value, err, diag = rep.value, rep.abs_error_estimate, rep.divergence_reason or ""
    elif isinstance(op, Product):
        if op.independent:
            value, method = independent_product_norm(op, p, q, mu, nu, tol), "independent"
        elif p == q:
            raise ConfigError("product bound needs p < q")
        else:
            value, method = product_norm_bound(op, p, q, mu, nu, tol), "holder_infimum"
        if math.isinf(value):
            diag = "no intermediate exponent gives a finite bound"
    elif isinstance(op, LinearSubstitution):
        if p != q:
            value, method = math.inf, "divergent"
            diag = "substitution is unbounded between different L_p spaces"
        else:
            value, method = linear_substitution_norm(op.abs_det, p), "closed_form"
    else:
        raise ConfigError(f"unknown operator variant {type(op).__name__}")
    if math.isnan(value):
        raise Anomaly(f"norm evaluated to nan at p={p:g}, q={q:g}")
    return {"p": fmt_num(p), "q": fmt_num(q), "value": fmt_num(value),
            "finite": "true" if math.isfinite(value) else "false", "method": method,
            "abs_error": fmt_num(err if math.isfinite(value) else math.inf),
            "diagnostics": diag}


def cmd_norm(cfg: JobConfig, out: Optional[str]) -> int:
    if cfg.operator is None:
        raise ConfigError("norm needs an 'operator' entry")
    pairs = cfg.pairs()
    if not pairs:
        raise ConfigError("norm needs exponents p and q")
    rows = [norm_row(cfg, p, q) for p, q in pairs]
    emit(render_table(rows, NORM_COLUMNS, cfg.output_format, [f"schema: {NORM_SCHEMA}"]), out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# transform

def _theta_bound(cfg: JobConfig):
    op, mu, nu, tol = cfg.operator, cfg.mu, cfg.target, cfg.tol
    if isinstance(op, Composition):
        z = op.derivative(mu, nu)
        return lambda p, q: composition_norm(z, p, q, nu, tol)
    if isinstance(op, Multiplicative):
        return lambda p, q: multiplicative_norm(op.g, p, q, mu, tol)
    if isinstance(op, Product):
        def T(p, q):
            return product_norm_bound(op, p, q, mu, nu, tol) if q > p else math.inf
        return T
    raise ConfigError("theta transform needs a composition, multiplicative or product operator")


def _p_grid(psi: PsiFunction, spec: Dict, n_default: int = 17) -> np.ndarray:
    if "p" in spec:
        ps = spec["p"]
        return np.asarray([decode_number(v) for v in (ps if isinstance(ps, list) else [ps])])
    n = int(spec.get("n", n_default))
    if psi.degenerate:
        return np.array([psi.A])
    hi = psi.B if math.isfinite(psi.B) else decode_number(spec.get("p_max", 64.0))
    grid = np.geomspace(psi.A, hi, n)
    if math.isfinite(psi.B):
        grid[-1] = psi.B - 1e-6 * (psi.B - psi.A)
    return grid


def cmd_transform(cfg: JobConfig, out: Optional[str]) -> int:
    if cfg.psi is None:
        raise ConfigError("transform needs a 'psi' entry")
    spec = cfg.transform or {}
    kind = spec.get("type")
    psi = psi_from_dict(cfg.psi)
    comments = [f"schema: {TRANSFORM_SCHEMA}", f"transform: {kind}"]
    if kind in ("sigma", "tau", "theta"):
        if kind == "sigma":
            res = sigma_transform(psi, decode_number(spec.get("r", 1.0)))
        elif kind == "tau":
            res = tau_transform(psi, decode_number(spec.get("t")))
        else:
            res = theta_transform(psi, _theta_bound(cfg))
        comments.append(f"support: {fmt_num(res.A)},{fmt_num(res.B)}")
        rows = [{"x": fmt_num(p), "value": fmt_num(res(float(p)))} for p in _p_grid(res, spec)]
        cols = ("x", "value")
        comments.append("x: exponent p")
    elif kind == "fundamental":
        ds = spec.get("delta", [1.0])
        ds = ds if isinstance(ds, list) else [ds]
        rows = [{"x": fmt_num(decode_number(d)),
                 "value": fmt_num(fundamental_function(psi, decode_number(d)))} for d in ds]
        cols = ("x", "value")
        comments.append("x: measure delta")
    elif kind == "orlicz":
        us = spec.get("u", [1.0, math.e, 10.0])
        us = us if isinstance(us, list) else [us]
        rows = []
        for u in us:
            u = decode_number(u)
            rows.append({"x": fmt_num(u), "value": fmt_num(orlicz_function(psi, u)),
                         "log_value": fmt_num(log_orlicz_function(psi, u))})
        cols = ("x", "value", "log_value")
        comments.append("x: argument u")
    else:
        raise ConfigError(f"unknown transform type {kind!r}; "
                          "expected sigma, tau, theta, fundamental or orlicz")
    emit(render_table(rows, cols, cfg.output_format, comments), out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify

def cmd_verify(suite: str, seed: int, out: Optional[str]) -> int:
    if suite not in SUITES:
        raise ConfigError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    results = run_suite(suite, seed)
    lines = [f"suite: {suite}", f"seed: {seed}"]
    lines += [r.report() for r in results]
    n_pass = sum(r.passed for r in results)
    lines.append(f"summary: {n_pass}/{len(results)} criteria passed")
    emit("\n".join(lines) + "\n", out)
    return EXIT_OK if n_pass == len(results) else EXIT_ANOMALY


# ---------------------------------------------------------------------------
# entry point

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sharpnorm",
                                 description="Sharp norms of composition, multiplicative and "
                                             "product operators between Lebesgue spaces.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML or JSON job file")
    common.add_argument("--seed", type=int, help="seed for randomized checks")
    common.add_argument("--tol", type=float, help="relative quadrature tolerance")
    common.add_argument("--format", choices=("csv", "json"), help="table format")
    common.add_argument("--out", help="output file (written atomically); default stdout")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("norm", parents=[common], help="operator norms for each (p, q) pair")
    sub.add_parser("transform", parents=[common],
                   help="tabulate a Psi-function transform, Orlicz or fundamental function")
    v = sub.add_parser("verify", parents=[common], help="run an acceptance suite")
    v.add_argument("suite", nargs="?", default="all", help=f"one of {', '.join(SUITES)}")
    return ap


def _job(args) -> JobConfig:
    if not args.config:
        raise ConfigError(f"{args.command} needs --config")
    cfg = load_config(args.config)
    if args.tol is not None:
        if not args.tol > 0:
            raise ConfigError("--tol must be positive")
        cfg.tol = args.tol
    if args.format is not None:
        cfg.output_format = args.format
    if args.seed is not None:
        cfg.seed = args.seed
    return cfg


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            if args.command == "verify":
                seed = args.seed
                if seed is None:
                    seed = load_config(args.config).seed if args.config else 0
                return cmd_verify(args.suite, seed, args.out)
            cfg = _job(args)
            out = args.out or cfg.output_path
            if args.command == "norm":
                return cmd_norm(cfg, out)
            return cmd_transform(cfg, out)
    except EmptySupportError as exc:
        print(f"sharpnorm: empty support: {exc}", file=sys.stderr)
        return EXIT_ANOMALY
    except (Anomaly, IntegrationError) as exc:
        print(f"sharpnorm: computation anomaly: {exc}", file=sys.stderr)
        return EXIT_ANOMALY
    except (ConfigError, UnsupportedTransformError, ValueError) as exc:
        print(f"sharpnorm: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
