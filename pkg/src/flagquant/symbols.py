"""Symbol calculus on K: s_lam, covariant/contravariant symbols, mixed symbols.

Two routes compute s_lam u(k) = phi_lam(Ad(k^-1) u):

* :func:`s_lambda` substitutes the floating Ad-images of the letters and
  re-normal-orders with the PBW engine (reference path, one k at a time);
* :func:`s_lambda_values` contracts the precomputed tensor
  T[a1..ad] = phi_lam(X_{a1} ... X_{ad}) with Ad(k^-1) for a batch of k
  (fast path, see :mod:`._kernels`).
"""
from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from . import _kernels
from ._exact import to_complex
from .errors import InvariantViolation, UsageError
from .group import CompactGroupElement, weyl_lift
from .orbit import QuadratureSet, psi_many
from .rep import HighestWeightRep, Operator, build_irrep, coherent_vectors, represent
from .rootsys import RootDatum, Weight, build_root_system
from .uea import (PBWElement, _normal_word, check, hc_project, linear_substitute,
                  pbw_monomials)


def _lam_floats(lam) -> np.ndarray:
    if isinstance(lam, Weight):
        return np.array(lam.as_floats())
    return np.asarray(lam, dtype=float)


@dataclass
class SampledFunction:
    """Values of a function on K at the points of a sample set."""

    samples: QuadratureSet
    values: np.ndarray
    lam: tuple | None = None
    provenance: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (len(self.samples),):
            raise UsageError("one value per sample is required")
        if not np.isfinite(self.values).all():
            raise InvariantViolation("sampled function has non-finite values")

    def integral(self) -> tuple:
        return self.samples.integrate(self.values)

    def orbit_points(self, lam) -> np.ndarray:
        """Chevalley coordinates of Psi_lam at the samples (the pushforward index)."""
        return psi_many(self.samples.rd, lam, self.samples.coords)

    def __sub__(self, other: "SampledFunction") -> np.ndarray:
        if other.samples is not self.samples:
            raise UsageError("functions on different sample sets")
        return self.values - other.values


# ---------------------------------------------------------------------------
# s_lambda


def s_lambda(u: PBWElement, lam, k: CompactGroupElement) -> complex:
    """phi_lam(Ad(k^-1) u) through floating normal ordering."""
    mat = k.inverse().ad_matrix()
    v = linear_substitute(u, mat)
    return hc_project(v).evaluate(tuple(_lam_floats(lam)))


@functools.lru_cache(maxsize=None)
def _phi_table(label: str, d: int):
    """Zero-weight words of length d with their Cartan projections.

    Returns (idx, coeff matrix P, monomial keys) so that
    T[idx[t]] = sum_m P[t, m] prod(lam[j] for j in keys[m]).
    """
    rd = build_root_system(label)
    wts = np.array(rd.basis_weight)
    h0 = rd.h_index[0]
    h_set = set(rd.h_index)
    words, polys = [], []
    for word in itertools.product(range(rd.dim), repeat=d):
        if wts[list(word)].sum(axis=0).any():
            continue
        terms = {}
        for m, c in _normal_word(rd, tuple(word)).items():
            if all(a in h_set for a in m):
                terms[tuple(a - h0 for a in m)] = c
        if terms:
            words.append(word)
            polys.append(terms)
    keys = sorted({m for p in polys for m in p}, key=lambda m: (len(m), m))
    col = {m: i for i, m in enumerate(keys)}
    pmat = np.zeros((len(words), len(keys)))
    for t, p in enumerate(polys):
        for m, c in p.items():
            pmat[t, col[m]] = float(c)
    idx = np.array(words, dtype=np.int64).reshape(len(words), d)
    return idx, pmat, tuple(keys)


def phi_tensor(rd: RootDatum, lam, d: int) -> tuple:
    """Sparse (idx, values) of T[a1..ad] = phi_lam(X_{a1} ... X_{ad})."""
    idx, pmat, keys = _phi_table(rd.label, d)
    lv = _lam_floats(lam)
    mon = np.array([np.prod(lv[list(m)]) if m else 1.0 for m in keys])
    return idx, (pmat @ mon).astype(complex) if len(keys) else np.zeros(0, dtype=complex)


def _group_by_degree(monomials) -> dict:
    out: dict = {}
    for i, m in enumerate(monomials):
        out.setdefault(len(m), []).append(i)
    return out


def monomial_symbols(rd: RootDatum, lam, monomials, ad_inv: np.ndarray) -> np.ndarray:
    """Matrix S[n, i] = s_lam(monomial_i)(k_n) given Ad(k_n^-1) of shape (N, dim, dim)."""
    n = ad_inv.shape[0]
    out = np.zeros((n, len(monomials)), dtype=complex)
    for d, cols in _group_by_degree(monomials).items():
        if d == 0:
            out[:, cols] = 1.0
            continue
        idx, tv = phi_tensor(rd, lam, d)
        words = np.array([monomials[i] for i in cols], dtype=np.int64)
        out[:, cols] = _kernels.phi_contract(ad_inv, idx, tv, words)
    return out


def s_lambda_values(u: PBWElement, lam, samples: QuadratureSet) -> np.ndarray:
    """s_lam u at every sample (tensor-contraction route)."""
    monos = list(u.terms)
    if not monos:
        return np.zeros(len(samples), dtype=complex)
    coeffs = np.array([to_complex(u.terms[m]) for m in monos])
    return monomial_symbols(u.rd, lam, monos, samples.ad(inverse=True)) @ coeffs


def s_lambda_function(u: PBWElement, lam, samples: QuadratureSet) -> SampledFunction:
    return SampledFunction(samples, s_lambda_values(u, lam, samples), tuple(_lam_floats(lam)), "s-map")


# ---------------------------------------------------------------------------
# covariant / contravariant


def covariant_symbol(A: Operator, k: CompactGroupElement) -> complex:
    """<A k v, k v> in the contravariant form."""
    rep = A.rep
    vec = coherent_vectors(rep, k.coords(max(1, len(k.factors)))[None])[0]
    return rep.inner(A.matrix @ vec, vec)


def covariant_values(ops, samples: QuadratureSet, base: np.ndarray | None = None,
                     vectors: np.ndarray | None = None) -> np.ndarray:
    """Matrix V[n, i] = <B_i w_n, w_n> with w_n = k_n v (or k_n base)."""
    ops = list(ops)
    rep = ops[0].rep
    if vectors is None:
        vectors = coherent_vectors(rep, samples.coords, base)
    mats = np.array([op.matrix for op in ops])
    return _kernels.expectation_values(vectors, rep.gram, mats)


def covariant_function(A: Operator, samples: QuadratureSet) -> SampledFunction:
    return SampledFunction(samples, covariant_values([A], samples)[:, 0], tuple(A.rep.lam.as_floats()), "covariant")


def contravariant_reconstruct(g: SampledFunction, rep: HighestWeightRep,
                              base: np.ndarray | None = None) -> Operator:
    """B = q sum_n w_n g(k_n) P_{k_n}, P_k the orthogonal projector onto k v (or k base)."""
    vecs = coherent_vectors(rep, g.samples.coords, base)
    c = rep.dim * g.samples.weights * g.values
    # P x = <x, w> w = w (w^H G x)
    mat = (vecs.T * c) @ vecs.conj() @ rep.gram
    return Operator(mat, rep)


def trace_pairing(u1: PBWElement, u2: PBWElement, lam: Weight, samples: QuadratureSet) -> dict:
    """Both sides of q int s_lam(u1) s_{w0.lam'}(u2) dk = tr pi_lam(u1) pi_lam'(u2)^t.

    The transpose is taken through the invariant pairing of E^lam and
    E^lam'; the identity pi_lam'(u)^t = pi_lam(check u) gives a second,
    independent evaluation of the trace side.
    """
    from .rep import duality_pairing
    rd = u1.rd
    rep = build_irrep(rd, lam)
    dual = build_irrep(rd, rd.dual_weight(lam))
    level = rd.act(rd.w0, rd.dual_weight(lam), shifted=True)
    f = s_lambda_values(u1, lam, samples)
    g = s_lambda_values(u2, level, samples)
    lhs, se = samples.integrate(rep.dim * f * g)
    a = represent(u1, rep).matrix
    p = duality_pairing(rep, dual)
    bt = (p @ represent(u2, dual).matrix @ np.linalg.inv(p)).T
    rhs = complex(np.trace(a @ bt))
    rhs_check = complex(np.trace(a @ represent(check(u2), rep).matrix))
    return {"lhs": lhs, "stderr": se, "rhs": rhs, "rhs_check": rhs_check,
            "difference": abs(lhs - rhs), "transpose_difference": abs(rhs - rhs_check)}


# ---------------------------------------------------------------------------
# mixed symbols


def spanning_monomials(rep: HighestWeightRep, degree: int | None = None, order: str = "forward",
                       rng=None) -> tuple:
    """PBW monomials whose images span End E^lam, with the coefficient solve data.

    Returns (monomials, matrices (M, q*q)).  ``order`` permutes the candidate
    list before the greedy pivoted selection, which yields different
    preimages of the same operator.
    """
    rd = rep.rd
    if degree is None:
        degree = max(1, int(np.ceil(2 * float(rd.height(rep.lam)))))
    cands = pbw_monomials(rd, degree)
    if order == "reverse":
        cands = cands[::-1]
    elif order == "random":
        rng = np.random.default_rng(0) if rng is None else rng
        cands = [cands[i] for i in rng.permutation(len(cands))]
    mats = np.array([rep.monomial_matrix(m).toarray().ravel() for m in cands])
    _, r, piv = sla.qr(mats.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    rank = int((diag > 1e-9 * diag[0]).sum())
    if rank < rep.dim ** 2:
        raise InvariantViolation(f"monomials of degree <= {degree} span only {rank} of {rep.dim ** 2} dimensions")
    chosen = sorted(piv[:rank])
    return [cands[i] for i in chosen], mats[chosen]


def operator_preimage(A: Operator, degree: int | None = None, order: str = "forward", rng=None) -> PBWElement:
    """Some u with pi_lam(u) = A (floating coefficients)."""
    monos, mats = spanning_monomials(A.rep, degree, order, rng)
    coeffs = np.linalg.solve(mats.T, A.matrix.ravel())
    return PBWElement(A.rep.rd, {m: complex(c) for m, c in zip(monos, coeffs)})


def mixed_symbol(A: Operator, w, samples: QuadratureSet, degree: int | None = None,
                 order: str = "forward", rng=None) -> SampledFunction:
    """s_{w.lam}(u) for a PBW preimage u of A."""
    rep = A.rep
    rd = rep.rd
    u = operator_preimage(A, degree, order, rng)
    level = rd.act(tuple(w), rep.lam, shifted=True)
    return SampledFunction(samples, s_lambda_values(u, level, samples), tuple(level.as_floats()),
                           "mixed", {"w": list(w)})


def reconstruct_from_w0(g: SampledFunction, rep: HighestWeightRep) -> Operator:
    """Contravariant reconstruction against the lowest-weight system {k w0~ v}."""
    rd = rep.rd
    lowest = coherent_vectors(rep, weyl_lift(rd, rd.w0).coords()[None])[0]
    return contravariant_reconstruct(g, rep, base=lowest)


def coxeter_twist_check(u: PBWElement, lam: Weight, k: CompactGroupElement) -> complex:
    """s_{w0.lam'} u(k) - s_{w0.lam} check(u)(k w0~^-1)."""
    rd = u.rd
    lift = weyl_lift(rd, rd.w0)
    a = s_lambda(u, rd.act(rd.w0, rd.dual_weight(lam), shifted=True), k)
    b = s_lambda(check(u), rd.act(rd.w0, lam, shifted=True), k * lift.inverse())
    return a - b


def coxeter_twist_values(u: PBWElement, lam: Weight, samples: QuadratureSet) -> np.ndarray:
    """Batched version of :func:`coxeter_twist_check` over a sample set."""
    rd = u.rd
    lift = weyl_lift(rd, rd.w0)
    a = s_lambda_values(u, rd.act(rd.w0, rd.dual_weight(lam), shifted=True), samples)
    b = s_lambda_values(check(u), rd.act(rd.w0, lam, shifted=True), samples.right_multiply(lift.inverse()))
    return a - b


# ---------------------------------------------------------------------------
# right shifts by the stabilizer


def right_shift_derivative(u: PBWElement, lam, y_coords, k: CompactGroupElement | None = None) -> complex:
    """d/dt s_lam u(k exp(tY)) at t = 0, computed exactly as -phi_lam(ad(Y) Ad(k^-1) u)."""
    from .group import compact_basis
    rd = u.rd
    yc = compact_basis(rd) @ np.asarray(y_coords, dtype=float)
    y = PBWElement.from_vector(rd, yc)
    v = u if k is None else linear_substitute(u, k.inverse().ad_matrix())
    comm = y * v - v * y
    return -hc_project(comm).evaluate(tuple(_lam_floats(lam)))


def right_shift_variation(u: PBWElement, lam, samples: QuadratureSet, y_coords, t: float) -> float:
    """max_n |s_lam u(k_n exp(tY)) - s_lam u(k_n)|."""
    rd = u.rd
    shift = CompactGroupElement.exp(rd, np.asarray(y_coords, dtype=float) * t)
    base = s_lambda_values(u, lam, samples)
    moved = s_lambda_values(u, lam, samples.right_multiply(shift))
    return float(np.abs(moved - base).max())
