"""Quantization maps Q_n and star products *_{1/n} on an orbit Omega_lam.

A level n is realized on E^{n lam}.  Functions on Omega_lam are pulled back
to K through Psi_lam, and an operator basis pi(m) over PBW monomials m of
bounded degree is fitted to them by least squares on Haar samples.  The
error of a fit is always measured on a separate held-out sample set.

Two routes are provided:

``operator``   Q_n(f) is an operator on E^{n lam}; products are operator
               products and symbols are covariant symbols.
``pbw``        f o Psi_lam = s_{n lam}(u_f) is solved for u_f in the PBW span
               and f * g = s_{n lam}(u_f u_g).  This route needs no
               representation, so it also serves the Weyl-twisted families
               whose Hilbert spaces are E^{w.(n lam)}.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import ConfigurationError, NotInAlgebra, UsageError
from .group import CompactGroupElement
from .orbit import QuadratureSet, eval_on_orbit_many, haar_samples, psi_many
from .rep import Operator, build_irrep, coherent_vectors
from .rootsys import RootDatum, Weight
from .symbols import SampledFunction, monomial_symbols, s_lambda_values
from .uea import PBWElement, SymPolynomial, pbw_monomials, poisson_bracket_sym, principal_symbol
from . import _kernels

MEMBERSHIP_TOL = 1e-8
MAX_COND = 1e6


def _prune(design: np.ndarray, rel_tol: float = 1e-10) -> tuple:
    """Indices of a maximal well-separated independent column set, and its condition number."""
    scale = np.abs(design).max(axis=0)
    scale[scale == 0] = 1.0
    normed = design / scale
    _, r, piv = sla.qr(normed, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    rank = int((diag > rel_tol * diag[0]).sum())
    keep = np.sort(piv[:rank])
    sv = np.linalg.svd(normed[:, keep], compute_uv=False)
    return keep, scale[keep], float(sv[0] / sv[-1])


@dataclass
class SampleFamily:
    """Fit and held-out samples shared by every level of one experiment."""

    fit: QuadratureSet
    hold: QuadratureSet
    seed: int

    @classmethod
    def draw(cls, rd: RootDatum, n_fit: int, n_hold: int, seed: int) -> "SampleFamily":
        both = haar_samples(rd, n_fit + n_hold, "monte-carlo", seed=seed)
        return cls(both.subset(np.arange(n_fit)), both.subset(np.arange(n_fit, n_fit + n_hold)), seed)


class StarLevel:
    """One level n of the family A_{1/n} on Omega_lam."""

    def __init__(self, rd: RootDatum, lam: Weight, n: int, degree: int, samples: SampleFamily,
                 route: str = "operator", w=(), max_dim: int = 2000):
        if route not in ("operator", "pbw"):
            raise UsageError(f"unknown route {route!r}")
        if n < 1:
            raise UsageError("level n must be a positive integer")
        self.rd, self.lam, self.n, self.degree = rd, lam, int(n), int(degree)
        self.route, self.w = route, tuple(w)
        self.samples = samples
        self.level_weight = lam * self.n
        self.monomials = pbw_monomials(rd, self.degree)
        self.x_fit = psi_many(rd, lam, samples.fit.coords)
        self.x_hold = psi_many(rd, lam, samples.hold.coords)
        self.rep = None
        if route == "operator":
            self.rep = build_irrep(rd, self.level_weight, max_dim=max_dim)
            self.ops = np.array([self.rep.monomial_matrix(m).toarray() for m in self.monomials])
            self.v_fit = coherent_vectors(self.rep, samples.fit.coords)
            self.v_hold = coherent_vectors(self.rep, samples.hold.coords)
            self.d_fit = _kernels.expectation_values(self.v_fit, self.rep.gram, self.ops)
            self.d_hold = _kernels.expectation_values(self.v_hold, self.rep.gram, self.ops)
        else:
            self.d_fit = monomial_symbols(rd, self.level_weight, self.monomials, samples.fit.ad(inverse=True))
            self.d_hold = monomial_symbols(rd, self.level_weight, self.monomials, samples.hold.ad(inverse=True))
        self.keep, self.scale, self.cond = _prune(self.d_fit)
        self.basis_size = len(self.keep)
        if len(samples.fit) < 2 * self.basis_size:
            raise ConfigurationError(f"{len(samples.fit)} fit samples for {self.basis_size} basis functions")

    @property
    def hilbert_dim(self) -> int:
        if self.rep is not None:
            return self.rep.dim
        return self.rd.weyl_dimension(self.rd.act(self.w, self.level_weight, shifted=True))

    # -- fitting ------------------------------------------------------------
    def coefficients(self, f: SymPolynomial, min_norm: bool = False) -> np.ndarray:
        """Coefficients over ``monomials`` of the quantization of f; raises NotInAlgebra.

        By default only the pruned independent columns are used; ``min_norm``
        solves over every monomial instead, which gives another preimage.
        """
        if f.rd is not self.rd:
            raise UsageError("polynomial over a different root datum")
        target = eval_on_orbit_many(f, self.x_fit)
        c = np.zeros(len(self.monomials), dtype=complex)
        if min_norm:
            scale = np.abs(self.d_fit).max(axis=0)
            scale[scale == 0] = 1.0
            sol, *_ = np.linalg.lstsq(self.d_fit / scale, target, rcond=1e-10)
            c[:] = sol / scale
        else:
            a = self.d_fit[:, self.keep] / self.scale
            sol, *_ = np.linalg.lstsq(a, target, rcond=None)
            c[self.keep] = sol / self.scale
        hold = eval_on_orbit_many(f, self.x_hold)
        resid = float(np.abs(self.d_hold @ c - hold).max() / max(1.0, np.abs(hold).max()))
        if resid > MEMBERSHIP_TOL:
            raise NotInAlgebra(self.n, resid, MEMBERSHIP_TOL)
        return c

    def quantize(self, f: SymPolynomial) -> Operator:
        if self.route != "operator":
            raise UsageError("quantize returns operators on E^{n lam}; use the operator route")
        c = self.coefficients(f)
        return Operator(np.tensordot(c, self.ops, axes=1), self.rep)

    def preimage(self, f: SymPolynomial, min_norm: bool = False) -> PBWElement:
        c = self.coefficients(f, min_norm)
        return PBWElement(self.rd, {m: complex(x) for m, x in zip(self.monomials, c) if x != 0})

    def twisted_operator(self, f: SymPolynomial, max_dim: int = 2000, min_norm: bool = False) -> Operator:
        """tau(f) = pi_{w.(n lam)}(u_f) on the Hilbert space of the (possibly twisted) family."""
        from .rep import represent
        rep = build_irrep(self.rd, self.rd.act(self.w, self.level_weight, shifted=True), max_dim=max_dim)
        return represent(self.preimage(f, min_norm), rep)

    # -- products -----------------------------------------------------------
    def symbol_on_hold(self, op: Operator) -> np.ndarray:
        return _kernels.expectation_values(self.v_hold, self.rep.gram, op.matrix[None])[:, 0]

    def star_values(self, f1: SymPolynomial, f2: SymPolynomial) -> np.ndarray:
        """(f1 * f2) at the held-out orbit points."""
        if self.route == "operator":
            return self.symbol_on_hold(self.quantize(f1) @ self.quantize(f2))
        u = self.preimage(f1) * self.preimage(f2)
        return s_lambda_values(u, self.level_weight, self.samples.hold)

    def star(self, f1: SymPolynomial, f2: SymPolynomial) -> SampledFunction:
        return SampledFunction(self.samples.hold, self.star_values(f1, f2), tuple(self.lam.as_floats()),
                               "star-product", {"n": self.n})


def quantize(f: SymPolynomial, level: StarLevel) -> Operator:
    return level.quantize(f)


def star(f1: SymPolynomial, f2: SymPolynomial, level: StarLevel) -> SampledFunction:
    return level.star(f1, f2)


# ---------------------------------------------------------------------------
# experiments


def loglog_slope(xs, ys) -> float:
    xs, ys = np.asarray(xs, float), np.asarray(ys, float)
    ok = ys > 0
    if ok.sum() < 2:
        return float("-inf")
    return float(np.polyfit(np.log(xs[ok]), np.log(ys[ok]), 1)[0])


def fit_rational(ns, values, max_degree: int = 8, tol: float = 1e-6) -> dict:
    """Fit values(n) by p(s)/q(s), s = 1/n, q(0) = 1; the smallest passing degree wins.

    A finite value at s = 0 means no pole at n = infinity; in the variable n
    the fitted numerator degree never exceeds the denominator degree.
    """
    ns = np.asarray(ns, float)
    v = np.asarray(values, complex)
    s = 1.0 / ns
    sm = s.max()
    x = s / sm
    vmax = max(np.abs(v).max(), 1e-300)
    best = None
    for m in range(0, max_degree + 1):
        if 2 * m + 1 > len(ns):
            break
        vand = np.vander(x, m + 1, increasing=True)
        a = np.hstack([vand, -(v[:, None] * vand[:, 1:])])
        col = np.abs(a).max(axis=0)
        col[col == 0] = 1
        sol, *_ = np.linalg.lstsq(a / col, v, rcond=None)
        sol = sol / col
        p, q = sol[: m + 1], np.concatenate([[1.0], sol[m + 1:]])
        fitted = np.polyval(p[::-1], x) / np.polyval(q[::-1], x)
        resid = np.abs(fitted - v) / vmax
        sv = np.linalg.svd(a / col, compute_uv=False)
        cand = {"degree": m, "residual": float(resid.max()), "pointwise": resid.tolist(),
                "value_at_infinity": complex(p[0]), "cond": float(sv[0] / sv[-1]) if sv[-1] else float("inf"),
                "numerator_degree_n": m - int(np.flatnonzero(np.abs(p) > 1e-12 * np.abs(p).max())[0]) if np.abs(p).max() else 0,
                "denominator_degree_n": m}
        if best is None or cand["residual"] < best["residual"]:
            best = cand
        if cand["residual"] < tol:
            best = cand
            break
    best["passed"] = best["residual"] < tol
    return best


def pole_at_infinity(ns, values, degree: int) -> float:
    """Size of a c*n term when the fit ansatz is allowed one. Near zero: finite at infinity.

    Returns |c| max(n) / max|v|, the pole term's largest contribution relative to the data.
    """
    ns = np.asarray(ns, float)
    v = np.asarray(values, complex)
    x = (1.0 / ns) / (1.0 / ns).max()
    vand = np.vander(x, degree + 1, increasing=True)
    a = np.hstack([(1.0 / x)[:, None], vand, -(v[:, None] * vand[:, 1:])])
    col = np.abs(a).max(axis=0)
    col[col == 0] = 1
    sol, *_ = np.linalg.lstsq(a / col, v, rcond=None)
    c = sol[0] / col[0]
    return float(abs(c) * (1.0 / x).max() / max(np.abs(v).max(), 1e-300))


@dataclass
class ConvergenceReport:
    type: str
    lam: str
    f1: str
    f2: str
    seed: int
    route: str
    rows: list = field(default_factory=list)
    slope_e1: float = float("nan")
    slope_e2: float = float("nan")
    failures: list = field(default_factory=list)
    nesting_threshold: int | None = None
    weak_nesting: bool = True
    rational: dict | None = None

    def finish(self):
        self.rows.sort(key=lambda r: r["n"])
        good = [r for r in self.rows if r["status"] == "ok"]
        half = good[len(good) // 2:]
        self.slope_e1 = loglog_slope([r["n"] for r in half], [r["e1"] for r in half])
        self.slope_e2 = loglog_slope([r["n"] for r in half], [r["e2"] for r in half])
        self.failures = [r["n"] for r in self.rows if r["status"] != "ok"]
        self.nesting_threshold = (max(self.failures) + 1) if self.failures else (self.rows[0]["n"] if self.rows else None)
        ns = [r["n"] for r in self.rows]
        # failures must form an initial segment of the scanned range
        self.weak_nesting = self.failures == ns[: len(self.failures)]
        return self

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "e1", "e2", "rational_residual", "cond", "status", "linear_identity"])
        for r in self.rows:
            w.writerow([r["n"], _num(r["e1"]), _num(r["e2"]), _num(r.get("rational_residual")),
                        _num(r["cond"]), r["status"], _num(r.get("linear_identity"))])
        return buf.getvalue()

    def summary(self) -> dict:
        return {
            "type": self.type, "lambda": self.lam, "f1": self.f1, "f2": self.f2, "seed": self.seed,
            "route": self.route, "slope_e1": self.slope_e1, "slope_e2": self.slope_e2,
            "failures": self.failures, "nesting_threshold": self.nesting_threshold,
            "weak_nesting": self.weak_nesting,
            "max_linear_identity": max((r.get("linear_identity") or 0.0 for r in self.rows), default=0.0),
            "rational": None if self.rational is None else {
                k: (_num(v) if isinstance(v, (float, complex)) else v)
                for k, v in self.rational.items() if k != "pointwise"},
        }


def _num(x):
    if x is None:
        return ""
    if isinstance(x, complex):
        return f"{x.real!r}{x.imag:+.17g}j"
    return repr(float(x))


def _linear_pair(rd: RootDatum) -> tuple:
    """Two coordinate functions X~, Y~ with a nonzero bracket, from the compact basis."""
    from .group import compact_basis
    cb = compact_basis(rd)
    x = SymPolynomial.linear(rd, [complex(c) for c in cb[:, rd.rank]])          # (E-F) on the first root
    y = SymPolynomial.linear(rd, [complex(c) for c in cb[:, rd.rank + rd.n_pos]])  # i(E+F) on the first root
    return x, y


def linear_identity_error(level: StarLevel) -> float:
    """max |n (X~ * Y~ - Y~ * X~) - i [X, Y]~| on held-out points."""
    from .group import compact_basis
    rd = level.rd
    cb = compact_basis(rd)
    x, y = _linear_pair(rd)
    lhs = level.n * (level.star_values(x, y) - level.star_values(y, x))
    br = poisson_bracket_sym(x, y)
    rhs = 1j * eval_on_orbit_many(br, level.x_hold)
    return float(np.abs(lhs - rhs).max())


def default_sample_sizes(rd: RootDatum, degree: int) -> tuple:
    m = len(pbw_monomials(rd, degree))
    return 2 * m, max(50, m)


def correspondence_suite(rd: RootDatum, f1: SymPolynomial, f2: SymPolynomial, lam: Weight, n_max: int,
                         n_min: int = 1, seed: int = 0, route: str = "operator", w=(),
                         rational_ns=None, max_dim: int = 2000, progress=None) -> ConvergenceReport:
    """Run the star product at n = n_min..n_max and collect e1, e2 and the linear identity."""
    reg = rd.regularity(lam)
    if not reg.relatively_regular:
        raise ConfigurationError(f"{lam} is not relatively regular")
    degree = max(f1.degree, f2.degree, 1)
    n_fit, n_hold = default_sample_sizes(rd, degree)
    fam = SampleFamily.draw(rd, n_fit, n_hold, seed)
    prod = (f1 * f2)
    pb = poisson_bracket_sym(f1, f2)
    report = ConvergenceReport(rd.label, str(lam), str(f1), str(f2), seed, route)
    values_at_x = {}
    redrawn = False
    for n in range(n_min, n_max + 1):
        level = StarLevel(rd, lam, n, degree, fam, route=route, w=w, max_dim=max_dim)
        if level.cond > MAX_COND and not redrawn:
            fam = SampleFamily.draw(rd, n_fit, n_hold, seed + 1)
            redrawn = True
            level = StarLevel(rd, lam, n, degree, fam, route=route, w=w, max_dim=max_dim)
        row = {"n": n, "cond": level.cond, "e1": None, "e2": None, "status": "ok"}
        try:
            s12 = level.star_values(f1, f2)
            s21 = level.star_values(f2, f1)
            exact = eval_on_orbit_many(prod, level.x_hold)
            bracket = eval_on_orbit_many(pb, level.x_hold)
            row["e1"] = float(np.abs(s12 - exact).max())
            row["e2"] = float(np.abs(n * (s12 - s21) - 1j * bracket).max())
            values_at_x[n] = complex(s12[0])
        except NotInAlgebra as exc:
            row["status"] = f"not-in-algebra ({exc.residual:.3g})"
        try:
            row["linear_identity"] = linear_identity_error(level)
        except NotInAlgebra:
            row["linear_identity"] = None
        report.rows.append(row)
        if progress:
            progress(row)
    if rational_ns is not None:
        ns = [n for n in rational_ns if n in values_at_x]
        if len(ns) >= 3:
            fit = fit_rational(ns, [values_at_x[n] for n in ns])
            report.rational = fit
            for n, r in zip(ns, fit["pointwise"]):
                next(row for row in report.rows if row["n"] == n)["rational_residual"] = r
    return report.finish()


def rationality_check(rd: RootDatum, f1: SymPolynomial, f2: SymPolynomial, lam: Weight, ns,
                      seed: int = 0, route: str = "operator", max_dim: int = 2000) -> dict:
    """Rational fit of n -> (f1 * f2)(x) at the first held-out orbit point x."""
    degree = max(f1.degree, f2.degree, 1)
    n_fit, n_hold = default_sample_sizes(rd, degree)
    fam = SampleFamily.draw(rd, n_fit, n_hold, seed)
    vals = []
    for n in ns:
        level = StarLevel(rd, lam, n, degree, fam, route=route, max_dim=max_dim)
        vals.append(complex(level.star_values(f1, f2)[0]))
    fit = fit_rational(list(ns), vals)
    x = psi_many(rd, lam, fam.hold.coords[:1])
    fit["classical_value"] = complex(eval_on_orbit_many(f1 * f2, x)[0])
    fit["limit_error"] = abs(fit["value_at_infinity"] - fit["classical_value"])
    fit["pole_at_infinity"] = pole_at_infinity(ns, vals, fit["degree"])
    fit["ns"] = list(ns)
    fit["values"] = vals
    return fit


def large_weight_error(u: PBWElement, lam, k: CompactGroupElement, t_grid) -> dict:
    """t^-d s_{t lam} u(k) against i^-d (principal symbol)(Psi_lam(k))."""
    rd = u.rd
    d, top = principal_symbol(u)
    samples = QuadratureSet.from_elements([k])
    lamv = np.asarray(lam.as_floats() if isinstance(lam, Weight) else lam, float)
    x = psi_many(rd, lamv, samples.coords)
    limit = complex(eval_on_orbit_many(top, x)[0]) * (1j) ** (-d)
    rows = []
    for t in t_grid:
        val = complex(s_lambda_values(u, tuple(t * lamv), samples)[0]) / t ** d
        rows.append({"t": float(t), "value": val, "error": abs(val - limit)})
    ts = [r["t"] for r in rows]
    errs = [r["error"] for r in rows]
    return {"degree": d, "limit": limit, "rows": rows, "slope": loglog_slope(ts, errs),
            "max_error": max(errs)}


def twisted_quantization_demo(rd: RootDatum, lam: Weight, w=(), n_max: int = 10, f1: SymPolynomial | None = None,
                  f2: SymPolynomial | None = None, seed: int = 0, rational_ns=None) -> dict:
    """Berezin quantization family A_{1/n} represented on E^{w.(n lam)}."""
    w = tuple(w)
    wl = rd.act(w, lam)
    wdot = rd.act(w, lam, shifted=True)
    if not (wl.dominant and wdot.dominant and wl.integral):
        raise ConfigurationError(f"w={list(w)} does not make w lam and w.lam dominant for lam={lam}")
    for n in range(1, n_max + 1):
        target = rd.act(w, lam * n, shifted=True)
        if not target.dominant:
            raise ConfigurationError(f"w.(n lam) is not dominant at n={n}")
    if f1 is None or f2 is None:
        x, y = _linear_pair(rd)
        f1, f2 = x * x, x * y
    route = "operator" if not w else "pbw"
    if route == "operator" and not lam.dominant:
        route = "pbw"
    report = correspondence_suite(rd, f1, f2, lam, n_max, seed=seed, route=route, w=w, rational_ns=rational_ns)
    dims = {n: rd.weyl_dimension(rd.act(w, lam * n, shifted=True)) for n in range(1, n_max + 1)}
    # tau must not depend on the chosen preimage: a pruned solve and a
    # minimum-norm solve over all monomials give different u_f
    degree = max(f1.degree, f2.degree, 1)
    n_fit, n_hold = default_sample_sizes(rd, degree)
    fam = SampleFamily.draw(rd, n_fit, n_hold, seed)
    consistency = []
    for n in range(1, min(n_max, 6) + 1):
        lvl = StarLevel(rd, lam, n, degree, fam, route="pbw", w=w)
        try:
            a = lvl.twisted_operator(f1)
            b = lvl.twisted_operator(f1, min_norm=True)
        except NotInAlgebra:
            continue
        consistency.append({"n": n, "dim": a.rep.dim,
                            "preimage_gap": float(np.abs(a.matrix - b.matrix).max() / max(1.0, a.norm()))})
    return {"type": rd.label, "lambda": str(lam), "w": list(w), "hilbert_dims": dims,
            "route": route, "report": report, "consistency": consistency}
