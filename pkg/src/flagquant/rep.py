"""Finite-dimensional irreducible representations with their contravariant form.

The weight basis is the one produced by :mod:`._hwmodule` (words in the simple
lowering operators applied to the highest vector).  It is not orthonormal:
the Gram matrix ``G`` of the contravariant form is kept explicitly and the
inner product is ``<x, y> = y^H G x`` (linear in the first argument).
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.linalg import expm
import scipy.linalg as sla
from sympy.polys.domains import QQ, QQ_I
from sympy.polys.matrices import DomainMatrix

from ._exact import to_complex
from ._hwmodule import build_lowering_module
from .errors import InvariantViolation, ResourceError, UsageError
from .group import CompactGroupElement, compact_basis
from .rootsys import RootDatum, Weight
from .uea import PBWElement

DEFAULT_MAX_DIM = 200
DENSE_LIMIT = 24


def _dm_to_numpy(m: DomainMatrix) -> np.ndarray:
    rows, cols = m.shape
    out = np.zeros((rows, cols), dtype=complex)
    for i, row in m.to_dod().items():
        for j, c in row.items():
            out[i, j] = to_complex(c) if m.domain == QQ_I else float(c)
    return out


class HighestWeightRep:
    """E^lambda for dominant integral lambda."""

    def __init__(self, rd: RootDatum, lam: Weight, max_dim: int = DEFAULT_MAX_DIM):
        if lam.rank != rd.rank:
            raise UsageError(f"weight {lam} has rank {lam.rank}, expected {rd.rank}")
        if not lam.integral or not lam.dominant:
            raise UsageError(f"{lam} is not dominant integral")
        expected = rd.weyl_dimension(lam)
        if expected > max_dim:
            raise ResourceError(f"dim E^{lam} = {expected} exceeds the cap {max_dim}")
        self.rd = rd
        self.lam = lam
        module = build_lowering_module(rd.cartan, [int(c) for c in lam.coords], max_dim=max_dim)
        if module.dim != expected:
            raise InvariantViolation(f"built dimension {module.dim} != Weyl dimension {expected}")
        self.module = module
        self.dim = module.dim
        self.weights = [Weight(w) for w in module.weights]
        self.gram_exact = module.gram_matrix()
        self.gen_exact = self._generators()
        self.gram = _dm_to_numpy(self.gram_exact).real
        self.gen = np.array([_dm_to_numpy(m) for m in self.gen_exact])
        self.gen_sparse = [sp.csr_matrix(g) for g in self.gen]
        cb = compact_basis(rd)
        self.compact_gen = np.einsum("aj,apq->jpq", cb, self.gen)
        self._mono_cache: dict = {(): sp.identity(self.dim, dtype=complex, format="csr")}

    def _generators(self) -> list:
        rd, m = self.rd, self.module
        e = [None] * rd.n_pos
        f = [None] * rd.n_pos
        for i in range(rd.rank):
            e[i], f[i] = m.e_matrix(i), m.f_matrix(i)
        for k in range(rd.n_pos):
            if k in rd.recipe:
                i, b, nval = rd.recipe[k]
                e[k] = (e[i] * e[b] - e[b] * e[i]) * QQ(1, nval)
                f[k] = (f[b] * f[i] - f[i] * f[b]) * QQ(1, nval)
        h = [m.h_matrix(j) for j in range(rd.rank)]
        return f + h + e

    def __repr__(self):
        return f"HighestWeightRep({self.rd.label}, {self.lam}, dim={self.dim})"

    @property
    def highest_vector(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[0] = 1
        return v

    def inner(self, x: np.ndarray, y: np.ndarray) -> complex:
        return complex(np.conj(y) @ self.gram @ x)

    def monomial_matrix(self, mono: tuple) -> sp.csr_matrix:
        """pi(X_{m0} ... X_{mk}) as a sparse matrix (memoized by prefix)."""
        hit = self._mono_cache.get(mono)
        if hit is None:
            hit = self.monomial_matrix(mono[:-1]) @ self.gen_sparse[mono[-1]]
            self._mono_cache[mono] = hit
        return hit

    def weight_multiset(self) -> list:
        return sorted(w.coords for w in self.weights)


@functools.lru_cache(maxsize=64)
def _cached_irrep(label: str, coords: tuple, max_dim: int) -> HighestWeightRep:
    from .rootsys import build_root_system
    return HighestWeightRep(build_root_system(label), Weight(coords), max_dim)


def build_irrep(rd: RootDatum, lam: Weight, max_dim: int = DEFAULT_MAX_DIM) -> HighestWeightRep:
    return _cached_irrep(rd.label, lam.coords, max_dim)


@dataclass
class Operator:
    """Matrix acting on a :class:`HighestWeightRep`, in its weight basis."""

    matrix: np.ndarray
    rep: HighestWeightRep = field(repr=False)

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=complex)
        if self.matrix.shape != (self.rep.dim, self.rep.dim):
            raise UsageError(f"operator shape {self.matrix.shape} does not match dim {self.rep.dim}")

    def _same(self, other):
        if other.rep is not self.rep:
            raise UsageError("operators on different representations")

    def __matmul__(self, other: "Operator") -> "Operator":
        self._same(other)
        return Operator(self.matrix @ other.matrix, self.rep)

    def __add__(self, other: "Operator") -> "Operator":
        self._same(other)
        return Operator(self.matrix + other.matrix, self.rep)

    def __sub__(self, other: "Operator") -> "Operator":
        self._same(other)
        return Operator(self.matrix - other.matrix, self.rep)

    def __mul__(self, s) -> "Operator":
        return Operator(self.matrix * s, self.rep)

    __rmul__ = __mul__

    def adjoint(self) -> "Operator":
        g = self.rep.gram
        return Operator(np.linalg.solve(g, self.matrix.conj().T @ g), self.rep)

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def norm(self) -> float:
        return float(np.abs(self.matrix).max()) if self.matrix.size else 0.0

    @classmethod
    def identity(cls, rep: HighestWeightRep) -> "Operator":
        return cls(np.eye(rep.dim), rep)


def _check_rd(u: PBWElement, rep: HighestWeightRep):
    if u.rd is not rep.rd:
        raise UsageError(f"element over {u.rd.label} cannot act on a {rep.rd.label} representation")


def represent(u: PBWElement, rep: HighestWeightRep) -> Operator:
    """Floating matrix of pi_lambda(u)."""
    _check_rd(u, rep)
    out = sp.csr_matrix((rep.dim, rep.dim), dtype=complex)
    for m, c in u.terms.items():
        out = out + rep.monomial_matrix(m) * to_complex(c)
    return Operator(out.toarray(), rep)


def represent_exact(u: PBWElement, rep: HighestWeightRep) -> DomainMatrix:
    """Exact matrix over QQ_I; ``u`` must have exact coefficients."""
    _check_rd(u, rep)
    if not u.exact:
        raise UsageError("represent_exact needs exact coefficients")
    q = rep.dim
    gens = [g.convert_to(QQ_I) for g in rep.gen_exact]
    out = DomainMatrix({}, (q, q), QQ_I)
    for m, c in u.terms.items():
        mat = DomainMatrix({i: {i: QQ_I(1, 0)} for i in range(q)}, (q, q), QQ_I)
        for a in m:
            mat = mat * gens[a]
        out = out + mat * c
    return out


def compact_generator(rep: HighestWeightRep, coords) -> np.ndarray:
    """pi(Y) for Y with the given compact-basis coordinates."""
    return np.einsum("j,jpq->pq", np.asarray(coords, dtype=float), rep.compact_gen)


def group_action(k: CompactGroupElement, rep: HighestWeightRep) -> Operator:
    """pi_lambda(k) as a dense operator."""
    if k.label != rep.rd.label:
        raise UsageError("group element and representation of different types")
    out = np.eye(rep.dim, dtype=complex)
    for f in k.factors:
        out = out @ expm(compact_generator(rep, f))
    return Operator(out, rep)


def apply_group(rep: HighestWeightRep, coords: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """pi(k_n) x_n for factor coordinates (N, F, dim) and vectors (N, q)."""
    coords = np.asarray(coords, dtype=float)
    out = np.array(vectors, dtype=complex, copy=True)
    if rep.dim <= DENSE_LIMIT:
        step = max(1, (1 << 22) // (rep.dim * rep.dim))
        for s in range(0, coords.shape[0], step):
            blk = out[s:s + step]
            for f in range(coords.shape[1] - 1, -1, -1):
                c = coords[s:s + step, f]
                if not c.any():
                    continue
                gens = rep.compact_gen.reshape(rep.compact_gen.shape[0], -1)
                mats = expm((c.astype(complex) @ gens).reshape(-1, rep.dim, rep.dim))
                blk = np.matmul(mats, blk[:, :, None])[:, :, 0]
            out[s:s + step] = blk
        return out
    # pi(Y) is skew-Hermitian in an orthonormal frame z = L^H x with G = L L^H
    chol, frame = _orthonormal_frame(rep)
    z = (chol.conj().T @ out.T).T
    step = max(1, (1 << 21) // (rep.dim * rep.dim))
    for s in range(0, coords.shape[0], step):
        blk = z[s:s + step]
        for f in range(coords.shape[1] - 1, -1, -1):
            c = coords[s:s + step, f]
            if not c.any():
                continue
            q = rep.dim
            herm = (c.astype(complex) @ (-1j * frame).reshape(frame.shape[0], q * q)).reshape(-1, q, q)
            vals, vecs = np.linalg.eigh(herm)
            coef = np.matmul(vecs.conj().transpose(0, 2, 1), blk[:, :, None])[:, :, 0]
            blk = np.matmul(vecs, (np.exp(1j * vals) * coef)[:, :, None])[:, :, 0]
        z[s:s + step] = blk
    return sla.solve_triangular(chol.conj().T, z.T, lower=False).T


def _orthonormal_frame(rep: HighestWeightRep) -> tuple:
    cached = rep.__dict__.get("_frame")
    if cached is None:
        chol = np.linalg.cholesky(rep.gram).astype(complex)
        inv_h = np.linalg.inv(chol.conj().T)
        # chol^H pi(Y) chol^{-H}
        frame = chol.conj().T @ rep.compact_gen @ inv_h
        cached = (chol, frame)
        rep.__dict__["_frame"] = cached
    return cached


def coherent_vectors(rep: HighestWeightRep, coords: np.ndarray, base: np.ndarray | None = None) -> np.ndarray:
    """Rows pi(k_n) v (or pi(k_n) base) for factor coordinates of shape (N, F, dim)."""
    base = rep.highest_vector if base is None else np.asarray(base, dtype=complex)
    return apply_group(rep, coords, np.broadcast_to(base, (coords.shape[0], rep.dim)))


def duality_pairing(rep: HighestWeightRep, dual: HighestWeightRep) -> np.ndarray:
    """Matrix P with x . (P y) the invariant pairing E^lambda x E^lambda' -> C.

    Solves the intertwining equations pi(X)^T P + P pi'(X) = 0 for the simple
    generators; the solution space is one-dimensional for the dual module.
    """
    q = rep.dim
    if dual.dim != q:
        raise UsageError("dual representation has a different dimension")
    rows = []
    eye = np.eye(q)
    rd = rep.rd
    for a in list(rd.e_index[: rd.rank]) + list(rd.f_index[: rd.rank]) + list(rd.h_index):
        # vec(A^T P + P B) = (I kron A^T + B^T kron I) vec(P) in column-major order
        rows.append(np.kron(eye, rep.gen[a].T) + np.kron(dual.gen[a].T, eye))
    mat = np.vstack(rows)
    _, s, vh = np.linalg.svd(mat)
    null = vh[-1].conj()
    if s[-1] > 1e-8 * max(1.0, s[0]) or (len(s) > 1 and s[-2] < 1e-8 * max(1.0, s[0])):
        raise InvariantViolation("duality pairing is not unique")
    p = null.reshape(q, q, order="F")
    return p / p[np.unravel_index(np.abs(p).argmax(), p.shape)]
