"""Command-line entry point: ``flagquant <command> ...``.

Commands::

    flagquant algebra info --type A2 [--lambda 1,0]
    flagquant symbol eval  --type A1 --lambda 1 --u "E[a1] F[a1]" --samples 5
    flagquant symbol check prop2|lemma4|lemma6|theorem2 --type A2 --lambda 1,0
    flagquant star converge --type A1 --lambda 1 --f1 z --f2 z --nmax 40 --out report.csv
    flagquant run <suite> --type A1 --lambda 1 [--config cfg.json]

Every output carries the seed, the library version and the resolved config.
A JSON config file (``--config``) supplies defaults; explicit flags win.
Exit codes: 0 ok, 1 a suite check failed, 2 bad usage/config, 3 resource cap.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field, fields
from fractions import Fraction

import numpy as np
import sympy
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations
from sympy.polys.domains import QQ, QQ_I

from . import __version__, _kernels
from .errors import ConfigurationError, FlagQuantError, ResourceError, UsageError
from .group import CompactGroupElement
from .orbit import QuadratureSet, haar_samples, stabilizer_basis
from .rep import build_irrep
from .rootsys import SUPPORTED_TYPES, Weight, build_root_system
from .starprod import correspondence_suite
from .suites import SUITES, run_suite
from .symbols import s_lambda, s_lambda_values
from .uea import PBWElement, SymPolynomial

CHECK_SUITES = ("prop2", "lemma4", "lemma6", "theorem2")


# ---------------------------------------------------------------------------
# config


@dataclass
class ExperimentConfig:
    type: str = "A1"
    lam: str | None = None
    suite: str | None = None
    nmax: int | None = None
    nmin: int | None = None
    t_grid: list | None = None
    samples: int | None = None
    seed: int = 0
    out: str | None = None
    tol: float | None = None
    f1: str | None = None
    f2: str | None = None
    u: str | None = None
    w: list | None = None
    pairs: int | None = None
    degree: int | None = None
    route: str | None = None
    threads: int | None = None

    @classmethod
    def keys(cls) -> list:
        return [f.name for f in fields(cls)]

    def echo(self) -> dict:
        return {k: getattr(self, k) for k in self.keys() if getattr(self, k) is not None and k not in ("out", "threads")}


_ALIASES = {"lambda": "lam", "t-grid": "t_grid", "tgrid": "t_grid", "n_max": "nmax", "n_min": "nmin"}


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"config: cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config: {path} is not valid JSON ({exc.msg})") from exc
    if not isinstance(data, dict):
        raise UsageError("config: top level must be an object")
    out = {}
    for k, v in data.items():
        key = _ALIASES.get(k, k).replace("-", "_")
        if key not in ExperimentConfig.keys():
            raise UsageError(f"config: unknown field {k!r}")
        out[key] = v
    return out


def _int_field(name, v, lo=None):
    try:
        iv = int(v)
        if iv != v and not isinstance(v, str):
            raise ValueError
    except (TypeError, ValueError):
        raise UsageError(f"{name}: expected an integer, got {v!r}") from None
    if lo is not None and iv < lo:
        raise UsageError(f"{name}: must be >= {lo}, got {iv}")
    return iv


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    """Defaults < config file < flags; every field is validated by name."""
    merged = {}
    if getattr(args, "config", None):
        merged.update(_load_config(args.config))
    for k in ExperimentConfig.keys():
        v = getattr(args, k, None)
        if v is not None:
            merged[k] = v
    cfg = ExperimentConfig(**merged)
    if not isinstance(cfg.type, str) or cfg.type.upper() not in SUPPORTED_TYPES:
        raise UsageError(f"type: unsupported type {cfg.type!r} (choose from {', '.join(SUPPORTED_TYPES)})")
    cfg.type = cfg.type.upper()
    cfg.seed = _int_field("seed", cfg.seed, 0)
    for name in ("nmax", "nmin", "samples", "pairs", "degree", "threads"):
        v = getattr(cfg, name)
        if v is not None:
            setattr(cfg, name, _int_field(name, v, 1))
    if cfg.lam is not None:
        if isinstance(cfg.lam, (list, tuple)):
            cfg.lam = ",".join(str(c) for c in cfg.lam)
        lam = Weight.parse(str(cfg.lam)) if _weight_ok(str(cfg.lam)) else None
        if lam is None:
            raise UsageError(f"lambda: cannot parse {cfg.lam!r}")
        rank = build_root_system(cfg.type).rank
        if lam.rank != rank:
            raise UsageError(f"lambda: {cfg.type} needs {rank} coordinates, got {lam.rank}")
        cfg.lam = str(lam)
    if cfg.t_grid is not None:
        if isinstance(cfg.t_grid, str):
            cfg.t_grid = cfg.t_grid.split(",")
        try:
            cfg.t_grid = [float(t) for t in cfg.t_grid]
        except (TypeError, ValueError):
            raise UsageError("t_grid: expected comma-separated numbers") from None
        if len(cfg.t_grid) < 3 or min(cfg.t_grid) <= 0:
            raise UsageError("t_grid: need at least three positive values")
    if cfg.w is not None:
        if isinstance(cfg.w, str):
            cfg.w = [p for p in cfg.w.replace(" ", "").split(",") if p]
        try:
            cfg.w = [int(x) for x in cfg.w]
        except (TypeError, ValueError):
            raise UsageError("w: expected simple-reflection indices such as 0,1") from None
        rank = build_root_system(cfg.type).rank
        if any(x < 0 or x >= rank for x in cfg.w):
            raise UsageError(f"w: reflection indices must lie in 0..{rank - 1}")
    if cfg.tol is not None:
        try:
            cfg.tol = float(cfg.tol)
        except (TypeError, ValueError):
            raise UsageError("tol: expected a number") from None
        if not cfg.tol > 0:
            raise UsageError("tol: must be positive")
    if cfg.route is not None and cfg.route not in ("batched", "reference", "operator", "pbw"):
        raise UsageError(f"route: unknown route {cfg.route!r}")
    if cfg.suite is not None and cfg.suite not in SUITES:
        raise UsageError(f"suite: unknown suite {cfg.suite!r} (choose from {', '.join(SUITES)})")
    return cfg


def _weight_ok(text: str) -> bool:
    try:
        Weight.parse(text)
        return True
    except UsageError:
        return False


# ---------------------------------------------------------------------------
# function strings


def coordinate_symbols(rd) -> dict:
    """Names usable in --f1/--f2, mapped to exact linear SymPolynomials.

    x<k> = (E_k - F_k)~, y<k> = (i(E_k + F_k))~ for the k-th positive root,
    z<j> = (i H_j)~, plus the Chevalley coordinates E<k>, F<k>, H<j>
    (1-based).  For rank one, x, y, z abbreviate x1, y1, z1.
    """
    i = QQ_I(0, 1)
    one = QQ_I(1, 0)
    out = {}
    for k in range(rd.n_pos):
        e, f = rd.e_index[k], rd.f_index[k]
        out[f"E{k + 1}"] = SymPolynomial.variable(rd, e, one)
        out[f"F{k + 1}"] = SymPolynomial.variable(rd, f, one)
        out[f"x{k + 1}"] = SymPolynomial.variable(rd, e, one) - SymPolynomial.variable(rd, f, one)
        out[f"y{k + 1}"] = SymPolynomial.variable(rd, e, i) + SymPolynomial.variable(rd, f, i)
    for j in range(rd.rank):
        h = rd.h_index[j]
        out[f"H{j + 1}"] = SymPolynomial.variable(rd, h, one)
        out[f"z{j + 1}"] = SymPolynomial.variable(rd, h, i)
    if rd.rank == 1:
        for c in "xyz":
            out[c] = out[f"{c}1"]
    return out


def parse_function(rd, text: str, field_name: str = "f1") -> SymPolynomial:
    """Parse a polynomial such as ``"x1^2 - 3/2*z1*y2 + I*E1"``."""
    names = coordinate_symbols(rd)
    syms = {n: sympy.Symbol(n) for n in names}
    try:
        expr = parse_expr(text, local_dict={**syms, "I": sympy.I},
                          transformations=standard_transformations + (convert_xor,))
    except Exception as exc:       # sympy raises a zoo of types here
        raise UsageError(f"{field_name}: cannot parse {text!r}") from exc
    expr = sympy.expand(sympy.sympify(expr))
    free = expr.free_symbols - set(syms.values())
    if free:
        raise UsageError(f"{field_name}: unknown variable(s) {', '.join(sorted(map(str, free)))}")
    used = sorted(expr.free_symbols, key=str)
    poly = sympy.Poly(expr, *used) if used else None
    terms = poly.terms() if poly is not None else [((), expr)]
    out = SymPolynomial(rd)
    for monom, coeff in terms:
        re_, im = sympy.re(coeff), sympy.im(coeff)
        if re_.is_Rational and im.is_Rational:
            c = QQ_I(QQ(int(re_.p), int(re_.q)), QQ(int(im.p), int(im.q)))
        elif (re_.is_number and im.is_number):
            c = complex(float(re_), float(im))
        else:
            raise UsageError(f"{field_name}: coefficient {coeff} is not a number")
        term = SymPolynomial.constant(rd, c)
        for s, p in zip(used, monom):
            for _ in range(p):
                term = term * names[str(s)]
        out = out + term
    return out


# ---------------------------------------------------------------------------
# output


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": _jsonable(x.real), "im": _jsonable(x.imag)}
    if isinstance(x, Fraction):
        return str(x)
    if x is None or isinstance(x, str):
        return x
    return str(x)


def dump_json(doc) -> str:
    return json.dumps(_jsonable(doc), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _route(cfg: ExperimentConfig, allowed: tuple) -> str:
    """The command's route, defaulting to its first allowed value."""
    if cfg.route is None:
        return allowed[0]
    if cfg.route not in allowed:
        raise UsageError(f"route: {cfg.route!r} is not valid here (choose from {', '.join(allowed)})")
    return cfg.route


def _header(command: str, cfg: ExperimentConfig) -> dict:
    return {"flagquant": __version__, "command": command, "seed": cfg.seed, "config": cfg.echo(),
            "backend": _kernels.backend()}


def _comment_block(command: str, cfg: ExperimentConfig) -> str:
    h = _header(command, cfg)
    return (f"# flagquant {h['flagquant']} {command}\n# seed: {cfg.seed}\n"
            f"# config: {json.dumps(_jsonable(h['config']), sort_keys=True)}\n")


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands


def _lam_or(cfg, default: str) -> Weight:
    return Weight.parse(cfg.lam if cfg.lam is not None else default)


def _default_weight(rd) -> str:
    return str(rd.fundamental_weights[0])


def cmd_algebra_info(cfg: ExperimentConfig) -> int:
    rd = build_root_system(cfg.type)
    weights = list(rd.fundamental_weights) + [rd.rho]
    if cfg.lam is not None and str(Weight.parse(cfg.lam)) not in map(str, weights):
        weights.append(Weight.parse(cfg.lam))
    rows = []
    for lam in weights:
        reg = rd.regularity(lam)
        row = {"lambda": str(lam), "dominant": lam.dominant, "integral": lam.integral,
               "relatively_regular": reg.relatively_regular,
               "vanishing_roots": [rd.root_label(r) for r in reg.vanishing_roots]}
        if reg.relatively_regular:
            row["orbit_dim"] = rd.dim - len(stabilizer_basis(rd, lam))
        if lam.dominant and lam.integral:
            row["irrep_dim"] = rd.weyl_dimension(lam)
            if row["irrep_dim"] <= 64:
                rep = build_irrep(rd, lam)
                row["weights"] = [str(w) for w in rep.weights]
                row["gram_determinant"] = str(rep.gram_exact.det())
        rows.append(row)
    doc = _header("algebra info", cfg)
    doc["algebra"] = rd.info()
    doc["weights"] = rows
    _emit(dump_json(doc), cfg.out)
    return 0


def _sample_set(rd, cfg: ExperimentConfig, default: int) -> QuadratureSet:
    return haar_samples(rd, cfg.samples or default, seed=cfg.seed)


def cmd_symbol_eval(cfg: ExperimentConfig) -> int:
    rd = build_root_system(cfg.type)
    if cfg.u is None:
        raise UsageError("u: a PBW element is required, e.g. --u \"E[a1] F[a1]\"")
    u = PBWElement.parse(rd, cfg.u)
    lam = _lam_or(cfg, _default_weight(rd))
    samples = _sample_set(rd, cfg, 10)
    cfg.route = _route(cfg, ("batched", "reference"))
    if cfg.route == "reference":
        vals = np.array([s_lambda(u, lam, k) for k in samples.elements()])
    else:
        vals = s_lambda_values(u, lam, samples)
    buf = io.StringIO()
    buf.write(_comment_block("symbol eval", cfg))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "re", "im"])
    for k, v in zip(samples.elements(), vals):
        w.writerow([k.word_string(), repr(float(v.real)), repr(float(v.imag))])
    _emit(buf.getvalue(), cfg.out)
    return 0


def _suite_kwargs(name: str, rd, cfg: ExperimentConfig) -> dict:
    lam = cfg.lam
    kw: dict = {"seed": cfg.seed}
    if name == "prop2":
        if lam is not None:
            kw["lams"] = [lam]
        elif rd.label == "A1":
            kw["lams"] = ["1", "2", "3"]
        elif rd.label == "A2":
            kw["lams"] = ["1,0", "1,1"]
        else:
            kw["lams"] = [str(w) for w in rd.fundamental_weights]
        if cfg.pairs:
            kw["n_pairs"] = cfg.pairs
        if cfg.degree:
            kw["degree"] = cfg.degree
        if cfg.tol:
            kw["tol"] = cfg.tol
        return kw
    if name == "algebra":
        if cfg.degree:
            kw["max_degree"] = cfg.degree
        return kw
    kw["lam"] = lam if lam is not None else _default_weight(rd)
    if name in ("parseval", "lemma4"):
        if cfg.samples:
            kw["n_samples"] = cfg.samples
    elif name == "lemma6":
        if cfg.samples:
            kw["n_recon"] = cfg.samples
    elif name == "theorem2":
        if cfg.samples:
            kw["n_samples"] = cfg.samples
    elif name == "prop3":
        if cfg.t_grid:
            kw["t_grid"] = cfg.t_grid
    elif name in ("converge", "theorem4"):
        kw["n_max"] = cfg.nmax or (40 if rd.rank == 1 else 12)
        if name == "converge" and cfg.nmin:
            kw["n_min"] = cfg.nmin
        if name == "theorem4" and cfg.w is not None:
            kw["w"] = tuple(cfg.w)
    elif name == "rationality":
        kw["ns"] = range(cfg.nmin or 4, (cfg.nmax or 24) + 1)
    if name in ("converge", "rationality", "theorem4"):
        if (cfg.f1 is None) != (cfg.f2 is None):
            raise UsageError("f2: give both f1 and f2 or neither" if cfg.f2 is None else "f1: give both f1 and f2 or neither")
        if cfg.f1 is not None:
            kw["f1"] = parse_function(rd, cfg.f1, "f1")
            kw["f2"] = parse_function(rd, cfg.f2, "f2")
    if cfg.degree and name in ("lemma4", "lemma6", "theorem2", "prop3"):
        kw["degree"] = cfg.degree
    if cfg.tol and name in ("parseval", "lemma4", "lemma6", "theorem2", "rationality"):
        kw["tol"] = cfg.tol
    return kw


def cmd_run(cfg: ExperimentConfig, command: str) -> int:
    name = cfg.suite
    rd = build_root_system(cfg.type)
    kw = _suite_kwargs(name, rd, cfg)
    out = run_suite(name, rd, **kw)
    report = None
    if isinstance(out, tuple):
        out, report = out
    doc = _header(command, cfg)
    doc["result"] = out.to_dict()
    if report is not None and cfg.out and cfg.out.endswith(".csv"):
        _emit(_comment_block(command, cfg) + report.to_csv(), cfg.out)
        sys.stdout.write(dump_json(doc))
    else:
        if report is not None:
            doc["rows"] = report.rows
        _emit(dump_json(doc), cfg.out)
    if not out.passed:
        sys.stderr.write(f"FAILED {name}: {'; '.join(out.failures())}\n")
        return 1
    return 0


def cmd_star_converge(cfg: ExperimentConfig) -> int:
    rd = build_root_system(cfg.type)
    lam = _lam_or(cfg, _default_weight(rd))
    if not (lam.dominant and lam.integral):
        raise UsageError(f"lambda: {lam} must be dominant integral")
    if cfg.f1 is None or cfg.f2 is None:
        raise UsageError("f1: --f1 and --f2 are required" if cfg.f1 is None else "f2: --f2 is required")
    f1 = parse_function(rd, cfg.f1, "f1")
    f2 = parse_function(rd, cfg.f2, "f2")
    nmax = cfg.nmax or 20
    nmin = cfg.nmin or 1
    if nmax < nmin + 3:
        raise UsageError("nmax: need at least four levels")
    route = cfg.route = _route(cfg, ("operator", "pbw"))
    lo = max(nmin, 4)
    rational_ns = range(lo, nmax + 1) if nmax - lo >= 4 else None
    report = correspondence_suite(rd, f1, f2, lam, nmax, n_min=nmin, seed=cfg.seed, route=route,
                                  rational_ns=rational_ns)
    doc = _header("star converge", cfg)
    doc["summary"] = report.summary()
    if cfg.out:
        _emit(_comment_block("star converge", cfg) + report.to_csv(), cfg.out)
    else:
        doc["rows"] = report.rows
    sys.stdout.write(dump_json(doc))
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def _common(p: argparse.ArgumentParser, lam: bool = True):
    p.add_argument("--type", help="algebra type, e.g. A1, A2, B2")
    if lam:
        p.add_argument("--lambda", dest="lam", help="weight as 1,0 or w[1,0]")
    p.add_argument("--seed", type=int, help="master seed (default 0)")
    p.add_argument("--config", help="JSON file with default field values")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--threads", type=int, help="numba thread count")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="flagquant", description="Berezin quantization on flag manifolds.")
    ap.add_argument("--version", action="version", version=f"flagquant {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    alg = sub.add_parser("algebra", help="root data and representation summaries")
    alg_sub = alg.add_subparsers(dest="action", required=True)
    info = alg_sub.add_parser("info", help="dump the root datum and sample irreps as JSON")
    _common(info)

    sym = sub.add_parser("symbol", help="symbol evaluation and checks")
    sym_sub = sym.add_subparsers(dest="action", required=True)
    ev = sym_sub.add_parser("eval", help="CSV of (k, s_lambda u(k)) over Haar samples")
    _common(ev)
    ev.add_argument("--u", help="PBW element, e.g. \"(1/2+1 i) * F[a1] E[a1] + H[a1]\"")
    ev.add_argument("--samples", type=int, help="number of group samples (default 10)")
    ev.add_argument("--route", choices=["batched", "reference"], help="tensor contraction or normal ordering")
    chk = sym_sub.add_parser("check", help="run a symbol-calculus check, JSON output")
    chk.add_argument("suite", choices=CHECK_SUITES)
    _common(chk)
    chk.add_argument("--samples", type=int, help="sample count")
    chk.add_argument("--pairs", type=int, help="number of random (u, k) pairs")
    chk.add_argument("--degree", type=int, help="maximal PBW degree of random elements")
    chk.add_argument("--tol", type=float)

    star = sub.add_parser("star", help="star-product experiments")
    star_sub = star.add_subparsers(dest="action", required=True)
    conv = star_sub.add_parser("converge", help="e1/e2 table over n, CSV plus JSON summary")
    _common(conv)
    conv.add_argument("--f1", help="polynomial in coordinates, e.g. \"x1*y1 + z1^2\"")
    conv.add_argument("--f2", help="second polynomial")
    conv.add_argument("--nmax", type=int, help="largest level n")
    conv.add_argument("--nmin", type=int, help="smallest level n")
    conv.add_argument("--route", choices=["operator", "pbw"])

    run = sub.add_parser("run", help="run a verification suite")
    run.add_argument("suite", choices=SUITES)
    _common(run)
    run.add_argument("--nmax", type=int, help="largest level n")
    run.add_argument("--nmin", type=int, help="smallest level n")
    run.add_argument("--samples", type=int, help="sample count")
    run.add_argument("--pairs", type=int, help="number of random (u, k) pairs")
    run.add_argument("--degree", type=int, help="maximal PBW degree of random elements")
    run.add_argument("--t-grid", dest="t_grid", help="comma-separated t values")
    run.add_argument("--f1", help="polynomial in coordinates, e.g. \"x1*y1 + z1^2\"")
    run.add_argument("--f2", help="second polynomial")
    run.add_argument("--w", help="Weyl word as reflection indices, e.g. 0")
    run.add_argument("--tol", type=float, help="override the main tolerance")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = resolve_config(args)
        if cfg.threads:
            _kernels.set_threads(cfg.threads)
        if args.command == "algebra":
            return cmd_algebra_info(cfg)
        if args.command == "symbol" and args.action == "eval":
            return cmd_symbol_eval(cfg)
        if args.command == "symbol":
            cfg.suite = args.suite
            return cmd_run(cfg, f"symbol check {args.suite}")
        if args.command == "star":
            return cmd_star_converge(cfg)
        cfg.suite = args.suite
        return cmd_run(cfg, f"run {args.suite}")
    except (UsageError, ConfigurationError) as exc:
        sys.stderr.write(f"flagquant: error: {exc}\n")
        return 2
    except ResourceError as exc:
        sys.stderr.write(f"flagquant: resource limit: {exc}\n")
        return 3
    except FlagQuantError as exc:
        sys.stderr.write(f"flagquant: {type(exc).__name__}: {exc}\n")
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
