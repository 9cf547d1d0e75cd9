"""Compact real form and group elements given as words of exponentials.

The compact basis of k is ordered ``[iH_j] + [E_a - F_a] + [i(E_a + F_a)]``
(Cartan part, then one pair per positive root in root order).  A group
element is a product ``exp(Y_1) exp(Y_2) ...`` with each ``Y_f`` a real
coordinate vector in that basis; a word of (basis index, angle) pairs is the
special case of one-hot factors.
"""
from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import UsageError
from .rootsys import RootDatum, build_root_system


@functools.lru_cache(maxsize=None)
def _compact_basis(label: str) -> np.ndarray:
    rd = build_root_system(label)
    cols = []
    for j in range(rd.rank):
        v = np.zeros(rd.dim, dtype=complex)
        v[rd.h_index[j]] = 1j
        cols.append(v)
    for k in range(rd.n_pos):
        v = np.zeros(rd.dim, dtype=complex)
        v[rd.e_index[k]], v[rd.f_index[k]] = 1, -1
        cols.append(v)
    for k in range(rd.n_pos):
        v = np.zeros(rd.dim, dtype=complex)
        v[rd.e_index[k]], v[rd.f_index[k]] = 1j, 1j
        cols.append(v)
    out = np.array(cols).T
    out.setflags(write=False)
    return out


def compact_basis(rd: RootDatum) -> np.ndarray:
    """Matrix whose column j holds the Chevalley coordinates of compact basis element j."""
    return _compact_basis(rd.label)


def compact_labels(rd: RootDatum) -> list:
    out = [f"iH[a{j + 1}]" for j in range(rd.rank)]
    out += [f"(E-F)[{rd.root_label(r)}]" for r in rd.positive_roots]
    out += [f"i(E+F)[{rd.root_label(r)}]" for r in rd.positive_roots]
    return out


@functools.lru_cache(maxsize=None)
def _ad_chevalley(label: str) -> np.ndarray:
    rd = build_root_system(label)
    out = np.array(rd.ad_int, dtype=float)
    out.setflags(write=False)
    return out


def ad_chevalley(rd: RootDatum) -> np.ndarray:
    """ad[a][c, b] = coefficient of X_c in [X_a, X_b]."""
    return _ad_chevalley(rd.label)


@functools.lru_cache(maxsize=None)
def _ad_compact(label: str) -> np.ndarray:
    rd = build_root_system(label)
    out = np.einsum("aj,acb->jcb", _compact_basis(label), _ad_chevalley(label))
    out.setflags(write=False)
    return out


def ad_compact(rd: RootDatum) -> np.ndarray:
    """ad of each compact basis element, in Chevalley coordinates; shape (dim, dim, dim)."""
    return _ad_compact(rd.label)


def ad_matrices(rd: RootDatum, coords: np.ndarray, inverse: bool = False) -> np.ndarray:
    """Batched Ad(k) (or Ad(k^-1)) for factor coordinates of shape (N, F, dim)."""
    coords = np.asarray(coords, dtype=float)
    n, nf, _ = coords.shape
    adc = ad_compact(rd)
    out = np.broadcast_to(np.eye(rd.dim, dtype=complex), (n, rd.dim, rd.dim)).copy()
    order = range(nf - 1, -1, -1) if inverse else range(nf)
    sign = -1.0 if inverse else 1.0
    for f in order:
        c = coords[:, f, :]
        if not c.any():
            continue
        gen = np.einsum("nj,jcb->ncb", sign * c, adc)
        out = out @ expm(gen)
    return out


@dataclass(frozen=True)
class CompactGroupElement:
    """k = exp(Y_1) exp(Y_2) ... with Y_f given by compact-basis coordinates."""

    label: str
    factors: tuple = ()

    def __post_init__(self):
        dim = build_root_system(self.label).dim
        facs = tuple(tuple(float(x) for x in f) for f in self.factors)
        if any(len(f) != dim for f in facs):
            raise UsageError(f"factor coordinates must have length {dim}")
        object.__setattr__(self, "factors", facs)

    @property
    def rd(self) -> RootDatum:
        return build_root_system(self.label)

    @classmethod
    def identity(cls, rd: RootDatum) -> "CompactGroupElement":
        return cls(rd.label, ())

    @classmethod
    def from_word(cls, rd: RootDatum, word) -> "CompactGroupElement":
        """``word`` is a sequence of (compact basis index, angle) pairs."""
        facs = []
        for j, angle in word:
            if not 0 <= j < rd.dim:
                raise UsageError(f"compact basis index {j} out of range")
            v = [0.0] * rd.dim
            v[j] = float(angle)
            facs.append(v)
        return cls(rd.label, tuple(facs))

    @classmethod
    def exp(cls, rd: RootDatum, coords) -> "CompactGroupElement":
        return cls(rd.label, (tuple(coords),))

    @classmethod
    def random(cls, rd: RootDatum, rng, n_factors: int = 2, scale: float = math.pi) -> "CompactGroupElement":
        return cls(rd.label, tuple(tuple(rng.uniform(-scale, scale, rd.dim)) for _ in range(n_factors)))

    def __mul__(self, other: "CompactGroupElement") -> "CompactGroupElement":
        if other.label != self.label:
            raise UsageError("group elements of different types")
        return CompactGroupElement(self.label, self.factors + other.factors)

    def inverse(self) -> "CompactGroupElement":
        return CompactGroupElement(self.label, tuple(tuple(-x for x in f) for f in reversed(self.factors)))

    def coords(self, n_factors: int | None = None) -> np.ndarray:
        nf = len(self.factors) if n_factors is None else n_factors
        out = np.zeros((nf, build_root_system(self.label).dim))
        if self.factors:
            out[: len(self.factors)] = np.array(self.factors)
        return out

    def ad_matrix(self) -> np.ndarray:
        rd = self.rd
        if not self.factors:
            return np.eye(rd.dim, dtype=complex)
        return ad_matrices(rd, self.coords()[None])[0]

    def to_json(self) -> dict:
        return {"type": self.label, "factors": [list(f) for f in self.factors]}

    @classmethod
    def from_json(cls, data: dict) -> "CompactGroupElement":
        return cls(data["type"], tuple(tuple(f) for f in data["factors"]))

    def word_string(self) -> str:
        """Compact text form used in CSV output."""
        return json.dumps([list(f) for f in self.factors], separators=(",", ":"))


def weyl_lift(rd: RootDatum, word) -> CompactGroupElement:
    """Product of exp((pi/2)(E_i - F_i)) over the letters of a Weyl word."""
    return CompactGroupElement.from_word(rd, [(rd.rank + i, math.pi / 2) for i in word])
