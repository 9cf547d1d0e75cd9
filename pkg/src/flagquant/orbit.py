"""Adjoint orbits, Haar sampling and the orbit map.

The orbit map sends k to Ad(k)(iH^lam).  With this choice the defining
identity ``i s_lam X(k) = (X, Psi_lam(k))`` holds for the symbol map
``s_lam u(k) = phi_lam(Ad(k^-1) u)``, and Psi(k l) = Ad(k) Psi(l).
"""
from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_legendre
from scipy.stats import unitary_group

from .errors import ConfigurationError, UsageError
from .group import (CompactGroupElement, ad_compact, ad_matrices, compact_basis,
                    weyl_lift)
from .rootsys import RootDatum, Weight, build_root_system
from .uea import SymPolynomial

__all__ = [
    "CompactGroupElement", "OrbitPoint", "QuadratureSet", "ad_matrix", "psi", "psi_many",
    "stabilizer_basis", "haar_samples", "iwasawa", "eval_on_orbit", "killing_matrix",
    "weyl_lift", "w0_lift", "unitary_to_element", "defining_matrix",
]


@functools.lru_cache(maxsize=None)
def _killing(label: str) -> np.ndarray:
    rd = build_root_system(label)
    out = np.array([[float(x) for x in row] for row in rd.killing])
    out.setflags(write=False)
    return out


def killing_matrix(rd: RootDatum) -> np.ndarray:
    return _killing(rd.label)


@dataclass(frozen=True)
class OrbitPoint:
    """Element of k given by real coordinates in the compact basis."""

    label: str
    coords: tuple

    @property
    def chevalley(self) -> np.ndarray:
        return compact_basis(build_root_system(self.label)) @ np.asarray(self.coords, dtype=float)

    @classmethod
    def from_chevalley(cls, rd: RootDatum, x) -> "OrbitPoint":
        y = np.linalg.solve(compact_basis(rd), np.asarray(x, dtype=complex))
        if np.abs(y.imag).max(initial=0.0) > 1e-8 * max(1.0, np.abs(y).max()):
            raise UsageError("vector is not in the compact real form")
        return cls(rd.label, tuple(float(v) for v in y.real))

    def killing_norm(self) -> float:
        x = self.chevalley
        return float((x @ killing_matrix(build_root_system(self.label)) @ x).real)


def ad_matrix(k: CompactGroupElement) -> np.ndarray:
    return k.ad_matrix()


def coroot_vector(rd: RootDatum, lam) -> np.ndarray:
    """Chevalley coordinates of H^lam (lam a Weight or float tuple)."""
    coords = lam.coords if isinstance(lam, Weight) else tuple(lam)
    inv = np.array([[float(x) for x in row] for row in rd._killing_cartan_inv])
    out = np.zeros(rd.dim, dtype=complex)
    out[list(rd.h_index)] = inv @ np.array([float(c) for c in coords])
    return out


def psi_many(rd: RootDatum, lam, coords: np.ndarray) -> np.ndarray:
    """Chevalley coordinates of Psi_lam(k_n), shape (N, dim)."""
    ad = ad_matrices(rd, coords)
    return ad @ (1j * coroot_vector(rd, lam))


def psi(rd: RootDatum, lam, k: CompactGroupElement) -> OrbitPoint:
    x = k.ad_matrix() @ (1j * coroot_vector(rd, lam))
    return OrbitPoint.from_chevalley(rd, x)


def stabilizer_basis(rd: RootDatum, lam: Weight) -> list:
    """Compact-basis coordinate vectors spanning the centralizer of iH^lam."""
    out = []
    for j in range(rd.rank):
        v = np.zeros(rd.dim)
        v[j] = 1
        out.append(v)
    for k in rd.stabilizer_roots(lam):
        for off in (rd.rank, rd.rank + rd.n_pos):
            v = np.zeros(rd.dim)
            v[off + k] = 1
            out.append(v)
    return out


def eval_on_orbit(p: SymPolynomial, x) -> complex:
    """Substitute X~_a -> B(X_a, x) and evaluate."""
    rd = p.rd
    xc = x.chevalley if isinstance(x, OrbitPoint) else np.asarray(x)
    return p.evaluate(killing_matrix(rd) @ xc)


def eval_on_orbit_many(p: SymPolynomial, xs: np.ndarray) -> np.ndarray:
    return p.evaluate_many(np.asarray(xs) @ killing_matrix(p.rd).T)


def w0_lift(rd: RootDatum) -> CompactGroupElement:
    return weyl_lift(rd, rd.w0)


# ---------------------------------------------------------------------------
# sample sets


@dataclass
class QuadratureSet:
    """Weighted group elements; ``coords`` has shape (N, F, dim)."""

    label: str
    coords: np.ndarray
    weights: np.ndarray
    mode: str = "explicit"
    seed: int | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.coords = np.asarray(self.coords, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.coords.ndim != 3 or self.coords.shape[0] != self.weights.shape[0]:
            raise UsageError("coords must be (N, F, dim) with one weight per sample")
        if (self.weights < 0).any():
            raise UsageError("quadrature weights must be non-negative")
        self._ad: dict = {}

    def __len__(self):
        return self.coords.shape[0]

    @property
    def rd(self) -> RootDatum:
        return build_root_system(self.label)

    def element(self, i: int) -> CompactGroupElement:
        return CompactGroupElement(self.label, tuple(map(tuple, self.coords[i])))

    def elements(self) -> list:
        return [self.element(i) for i in range(len(self))]

    @classmethod
    def from_elements(cls, elements, weights=None) -> "QuadratureSet":
        elements = list(elements)
        if not elements:
            raise UsageError("empty sample list")
        label = elements[0].label
        nf = max(1, max(len(k.factors) for k in elements))
        coords = np.array([k.coords(nf) for k in elements])
        w = np.full(len(elements), 1 / len(elements)) if weights is None else np.asarray(weights)
        return cls(label, coords, w)

    def ad(self, inverse: bool = False) -> np.ndarray:
        if inverse not in self._ad:
            self._ad[inverse] = ad_matrices(self.rd, self.coords, inverse=inverse)
        return self._ad[inverse]

    def right_multiply(self, k: CompactGroupElement) -> "QuadratureSet":
        """Samples k_n * k with the same weights."""
        extra = np.broadcast_to(k.coords(max(1, len(k.factors))), (len(self),) + (max(1, len(k.factors)), self.coords.shape[2]))
        return QuadratureSet(self.label, np.concatenate([self.coords, extra], axis=1), self.weights,
                             self.mode, self.seed, dict(self.meta))

    def left_multiply(self, k: CompactGroupElement) -> "QuadratureSet":
        extra = np.broadcast_to(k.coords(max(1, len(k.factors))), (len(self),) + (max(1, len(k.factors)), self.coords.shape[2]))
        return QuadratureSet(self.label, np.concatenate([extra, self.coords], axis=1), self.weights,
                             self.mode, self.seed, dict(self.meta))

    def subset(self, idx) -> "QuadratureSet":
        w = self.weights[idx]
        return QuadratureSet(self.label, self.coords[idx], w / w.sum(), self.mode, self.seed, dict(self.meta))

    def integrate(self, values: np.ndarray) -> tuple:
        """(weighted mean, standard error); the error is 0 for deterministic rules."""
        values = np.asarray(values)
        mean = complex(self.weights @ values)
        if self.mode == "quadrature":
            return mean, 0.0
        resid = values - mean
        se = float(np.sqrt(np.sum(self.weights ** 2 * np.abs(resid) ** 2)))
        return mean, se

    def to_json(self) -> str:
        return json.dumps({
            "type": self.label, "mode": self.mode, "seed": self.seed, "meta": self.meta,
            "weights": self.weights.tolist(), "coords": self.coords.tolist(),
        })

    @classmethod
    def from_json(cls, text: str) -> "QuadratureSet":
        d = json.loads(text)
        return cls(d["type"], np.array(d["coords"], dtype=float).reshape(len(d["weights"]), -1, build_root_system(d["type"]).dim),
                   np.array(d["weights"]), d["mode"], d["seed"], d.get("meta", {}))


def _euler_a1(degree: int) -> QuadratureSet:
    """exp(a iH) exp(b (E-F)) exp(c iH); exact for matrix coefficients of total spin <= degree."""
    na, nc, nx = 2 * degree + 1, 2 * degree + 1, degree + 1
    a = np.pi * np.arange(na) / na
    c = 2 * np.pi * np.arange(nc) / nc
    x, wx = roots_legendre(nx)
    b = np.arccos(x) / 2
    A, B, Cc = np.meshgrid(a, b, c, indexing="ij")
    W = np.broadcast_to((wx / 2)[None, :, None], A.shape) / (na * nc)
    n = A.size
    coords = np.zeros((n, 3, 3))
    coords[:, 0, 0] = A.ravel()
    coords[:, 1, 1] = B.ravel()
    coords[:, 2, 0] = Cc.ravel()
    return QuadratureSet("A1", coords, W.ravel().copy(), "quadrature", None, {"degree": degree})


@functools.lru_cache(maxsize=None)
def _defining_frame(label: str):
    """Compact generators in an orthonormal frame of the defining rep (type A)."""
    from .rep import build_irrep
    rd = build_root_system(label)
    rep = build_irrep(rd, rd.fundamental_weights[0])
    s = np.sqrt(np.diag(rep.gram))
    if np.abs(rep.gram - np.diag(np.diag(rep.gram))).max() > 0:
        raise ConfigurationError("defining representation has a non-diagonal Gram matrix")
    gens = np.array([(s[:, None] * g) / s[None, :] for g in rep.compact_gen])   # (dim, q, q)
    q = rep.dim
    mat = gens.reshape(rd.dim, q * q).T
    system = np.vstack([mat.real, mat.imag])
    return gens, np.linalg.pinv(system), q


def defining_matrix(k: CompactGroupElement) -> np.ndarray:
    """Unitary matrix of k in the orthonormal frame of the defining rep (type A)."""
    from scipy.linalg import expm
    if k.label[0] != "A":
        raise ConfigurationError("defining matrices are only provided for type A")
    gens, _, q = _defining_frame(k.label)
    out = np.eye(q, dtype=complex)
    for f in k.factors:
        out = out @ expm(np.einsum("j,jpq->pq", np.asarray(f), gens))
    return out


def _log_unitary(u: np.ndarray) -> np.ndarray:
    """Traceless skew-Hermitian logarithms of special unitary matrices, batched."""
    vals, vecs = np.linalg.eig(u)
    ang = np.angle(vals)
    turns = np.rint(ang.sum(axis=1) / (2 * np.pi)).astype(int)
    for n in np.flatnonzero(turns):
        order = np.argsort(ang[n])
        t = turns[n]
        if t > 0:
            ang[n, order[-t:]] -= 2 * np.pi
        else:
            ang[n, order[:-t]] += 2 * np.pi
    inv = np.linalg.inv(vecs)
    return np.einsum("nij,nj,njk->nik", vecs, 1j * ang, inv)


def unitary_to_element(label: str, u: np.ndarray) -> np.ndarray:
    """Compact coordinates y with exp(Y) = u, for a batch (N, q, q) of special unitaries."""
    gens, pinv, q = _defining_frame(label)
    logs = _log_unitary(np.asarray(u).reshape(-1, q, q))
    flat = logs.reshape(logs.shape[0], q * q)
    rhs = np.hstack([flat.real, flat.imag])
    return rhs @ pinv.T


def _haar_type_a(rd: RootDatum, n: int, rng) -> QuadratureSet:
    q = rd.rank + 1
    u = unitary_group.rvs(q, size=n, random_state=rng).reshape(n, q, q)
    det = np.linalg.det(u)
    u = u / (det ** (1.0 / q))[:, None, None]
    y = unitary_to_element(rd.label, u)
    return QuadratureSet(rd.label, y[:, None, :], np.full(n, 1.0 / n), "monte-carlo")


_RADIAL_CELLS = 128


def _haar_exponential(rd: RootDatum, n: int, rng) -> QuadratureSet:
    """Importance sampling in exponential coordinates with the Haar Jacobian.

    The Haar density in y = log k is prod_alpha sinc(alpha(y) / 2 pi) on the
    region max |alpha(y)| < 2 pi.  Draw a uniform direction u, then a radius
    from a piecewise-constant tabulation of r^(d-1) jac(r u) on [0, r_max(u)];
    the weight is the exact ratio target / proposal, so the estimate is
    unbiased whatever the tabulation error.
    """
    d = rd.dim
    cb = compact_basis(rd)
    gram = -(cb.T @ killing_matrix(rd) @ cb).real      # positive definite on k
    chol = np.linalg.cholesky(gram)
    adc = ad_compact(rd)
    z = rng.normal(size=(n, d))
    u = np.linalg.solve(chol.T, (z / np.linalg.norm(z, axis=1, keepdims=True)).T).T
    theta = np.abs(np.linalg.eigvals(np.einsum("nj,jab->nab", u, adc)).imag)     # (n, d)
    r_max = 2 * np.pi / theta.max(axis=1)
    edges = np.linspace(0.0, 1.0, _RADIAL_CELLS + 1)
    mids = 0.5 * (edges[1:] + edges[:-1])
    ys = np.empty((n, d))
    ws = np.empty(n)
    step = max(1, (1 << 20) // (_RADIAL_CELLS * d))
    for s in range(0, n, step):
        th, rm = theta[s:s + step], r_max[s:s + step]
        # density on the unit interval t = r / r_max; cell masses from midpoints
        rr = mids[None, :] * rm[:, None]
        dens = rr ** (d - 1) * np.prod(np.sinc(rr[:, :, None] * th[:, None, :] / (2 * np.pi)), axis=2)
        mass = dens / dens.sum(axis=1, keepdims=True)
        cdf = np.cumsum(mass, axis=1)
        v = rng.uniform(size=rm.shape[0])
        cell = np.minimum((cdf < v[:, None]).sum(axis=1), _RADIAL_CELLS - 1)
        lo = np.where(cell > 0, cdf[np.arange(cell.size), cell - 1], 0.0)
        frac = (v - lo) / mass[np.arange(cell.size), cell]
        t = edges[cell] + np.clip(frac, 0.0, 1.0) / _RADIAL_CELLS
        r = t * rm
        # proposal density of r along the ray: mass / cell width (in r units)
        prop = mass[np.arange(cell.size), cell] * _RADIAL_CELLS / rm
        jac = np.prod(np.sinc(r[:, None] * th / (2 * np.pi)), axis=1)
        ys[s:s + step] = r[:, None] * u[s:s + step]
        # y = r u: Lebesgue density in y is p(u) p(r|u) / r^(d-1)
        ws[s:s + step] = jac * r ** (d - 1) / prop
    return QuadratureSet(rd.label, ys[:, None, :], ws / ws.sum(), "monte-carlo")


def haar_samples(rd: RootDatum, n: int, mode: str = "monte-carlo", seed: int = 0) -> QuadratureSet:
    """Haar-distributed samples.

    ``mode="quadrature"`` (A1 only) returns an Euler-angle product rule that is
    exact for products of matrix coefficients whose spins add up to at most
    ``n`` (spin 1/2 for the defining representation).  ``mode="monte-carlo"``
    returns ``n`` seeded samples.
    """
    if mode == "quadrature":
        if rd.label != "A1":
            raise ConfigurationError(f"exact quadrature is only available for A1, not {rd.label}")
        return _euler_a1(int(math.ceil(n)))
    if mode != "monte-carlo":
        raise UsageError(f"unknown sampling mode {mode!r}")
    rng = np.random.default_rng(seed)
    out = _haar_type_a(rd, n, rng) if rd.label[0] == "A" else _haar_exponential(rd, n, rng)
    out.seed = seed
    return out


def iwasawa(g: np.ndarray) -> tuple:
    """g = k a n with k unitary, a positive diagonal, n upper unitriangular."""
    g = np.asarray(g, dtype=complex)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise UsageError("iwasawa needs a square matrix")
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    if np.abs(d).min() < 1e-14 * max(1.0, np.abs(r).max()):
        raise UsageError("matrix is singular")
    phase = d / np.abs(d)
    k = q * phase[None, :]
    r = r / phase[:, None]
    a = np.diag(np.abs(d))
    n = r / np.abs(d)[:, None]
    return k, a, n
