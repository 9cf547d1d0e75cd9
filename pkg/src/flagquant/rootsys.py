"""Root systems, Weyl groups and the Chevalley basis of a simple Lie algebra.

Conventions
-----------
* Cartan matrix ``A[i][j] = <alpha_i^vee, alpha_j> = alpha_j(H_i)``.
* Weights are stored by their simple-coroot pairings ``lam(H_1), ..., lam(H_r)``
  (fundamental-weight coordinates).
* Roots are stored as integer vectors over the simple roots.
* Chevalley basis order: ``F`` block, ``H`` block, ``E`` block; inside the
  root blocks positive roots are sorted by height, then lexicographically.
  This total order is also the PBW order used by :mod:`flagquant.uea`.
* Signs: for a non-simple positive root ``gamma`` let ``alpha_i`` be the
  simple root of smallest index with ``gamma - alpha_i`` a root (the
  extraspecial pair).  We set ``[E_i, E_{gamma-alpha_i}] = (p+1) E_gamma``
  with a plus sign, ``F_gamma`` is the contravariant adjoint of ``E_gamma``,
  and every other structure constant is computed, never chosen.
* The bilinear form is the Killing form ``tr(ad X ad Y)``.
"""
from __future__ import annotations

import functools
import re
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from ._hwmodule import build_lowering_module
from .errors import ConfigurationError, InvariantViolation, UsageError

# simple roots in an orthogonal epsilon basis; only ratios of lengths matter
_SIMPLE_ROOTS = {
    "A": lambda r: [tuple(1 if k == i else -1 if k == i + 1 else 0 for k in range(r + 1)) for i in range(r)],
    "B": lambda r: [tuple(1 if k == i else -1 if k == i + 1 else 0 for k in range(r)) for i in range(r - 1)]
    + [tuple(1 if k == r - 1 else 0 for k in range(r))],
    "C": lambda r: [tuple(1 if k == i else -1 if k == i + 1 else 0 for k in range(r)) for i in range(r - 1)]
    + [tuple(2 if k == r - 1 else 0 for k in range(r))],
    "G": lambda r: [(1, -1, 0), (-2, 1, 1)],
}
SUPPORTED_TYPES = ("A1", "A2", "A3", "B2", "B3", "C2", "C3", "G2")


@dataclass(frozen=True)
class Weight:
    """A point of h* given by its simple-coroot pairings."""

    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(Fraction(c) for c in self.coords))

    @property
    def rank(self) -> int:
        return len(self.coords)

    @property
    def dominant(self) -> bool:
        return all(c >= 0 for c in self.coords)

    @property
    def integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    def __add__(self, other: "Weight") -> "Weight":
        return Weight(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "Weight") -> "Weight":
        return Weight(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "Weight":
        return Weight(tuple(-a for a in self.coords))

    def __mul__(self, t) -> "Weight":
        return Weight(tuple(Fraction(t) * a for a in self.coords))

    __rmul__ = __mul__

    def __str__(self) -> str:
        return "w[" + ",".join(str(c) for c in self.coords) + "]"

    def as_floats(self) -> tuple:
        return tuple(float(c) for c in self.coords)

    @classmethod
    def parse(cls, text: str) -> "Weight":
        """Parse ``w[1,-1]``, ``[1/2,0]`` or ``1,-1``."""
        s = text.strip()
        m = re.fullmatch(r"(?:w)?\[?\s*([^\]]*?)\s*\]?", s)
        if not m or not m.group(1):
            raise UsageError(f"cannot parse weight {text!r}")
        try:
            return cls(tuple(Fraction(p.strip()) for p in m.group(1).split(",")))
        except ValueError as exc:
            raise UsageError(f"cannot parse weight {text!r}") from exc


@dataclass(frozen=True)
class Regularity:
    vanishing_roots: tuple       # Delta(lambda), signed root vectors
    relatively_regular: bool
    sigma: tuple | None          # simple-root indices when relatively regular


class RootDatum:
    """Root system, Weyl group and Chevalley structure constants of one simple type.

    Immutable after construction; build through :func:`build_root_system`.
    """

    def __init__(self, label: str):
        if label not in SUPPORTED_TYPES:
            raise ConfigurationError(f"unsupported type {label!r}; supported: {', '.join(SUPPORTED_TYPES)}")
        self.label = label
        family, rank = label[0], int(label[1:])
        self.rank = rank
        simple = _SIMPLE_ROOTS[family](rank)
        ip = lambda a, b: sum(Fraction(x) * y for x, y in zip(a, b))
        self.cartan = tuple(
            tuple(int(2 * ip(simple[i], simple[j]) / ip(simple[i], simple[i])) for j in range(rank))
            for i in range(rank)
        )
        # (alpha_i, alpha_i)/2 in units where the shortest simple root has length^2 = 2
        shortest = min(ip(s, s) for s in simple)
        self._half_len = tuple(ip(s, s) / shortest for s in simple)
        self.positive_roots = self._positive_roots()
        self.heights = tuple(sum(r) for r in self.positive_roots)
        self._root_index = {r: k for k, r in enumerate(self.positive_roots)}
        self.coroots = tuple(self._coroot(r) for r in self.positive_roots)
        self.rho = Weight((1,) * rank)
        self.fundamental_weights = tuple(Weight(tuple(int(i == j) for j in range(rank))) for i in range(rank))
        self._build_basis()
        self._build_weyl_group()
        self._build_structure_constants()
        self._build_killing()

    # -- roots ------------------------------------------------------------
    def _pair_coroot(self, i: int, root) -> int:
        """<alpha_i^vee, root> for ``root`` in simple-root coordinates."""
        return sum(self.cartan[i][j] * root[j] for j in range(self.rank))

    def _positive_roots(self) -> tuple:
        r = self.rank
        simple = [tuple(int(i == j) for j in range(r)) for i in range(r)]
        roots = set(simple)
        frontier = list(simple)
        while frontier:
            nxt = []
            for beta in frontier:
                for i in range(r):
                    # alpha_i-string through beta: p down, q = p - <alpha_i^vee, beta> up
                    p = 0
                    cur = beta
                    while True:
                        cur = tuple(c - (k == i) for k, c in enumerate(cur))
                        if cur in roots:
                            p += 1
                        else:
                            break
                    q = p - self._pair_coroot(i, beta)
                    if q > 0:
                        up = tuple(c + (k == i) for k, c in enumerate(beta))
                        if up not in roots:
                            roots.add(up)
                            nxt.append(up)
            frontier = nxt
        return tuple(sorted(roots, key=lambda a: (sum(a), tuple(-x for x in a))))

    def _root_len2(self, root) -> Fraction:
        # (alpha, alpha) with (alpha_i, alpha_j) = d_i A_ij, d_i = half_len_i
        r = self.rank
        return sum(root[i] * root[j] * self._half_len[i] * self.cartan[i][j] for i in range(r) for j in range(r))

    def _coroot(self, root) -> tuple:
        """Coefficients c with H_alpha = sum_j c_j H_j."""
        l2 = self._root_len2(root)
        return tuple(int(Fraction(2 * root[j] * self._half_len[j]) / l2) for j in range(self.rank))

    def is_root(self, vec) -> bool:
        vec = tuple(vec)
        return vec in self._root_index or tuple(-x for x in vec) in self._root_index

    def root_index(self, root) -> int:
        return self._root_index[tuple(root)]

    def root_label(self, root) -> str:
        parts = []
        for j, m in enumerate(root):
            if m:
                parts.append(("" if m == 1 else str(m)) + f"a{j + 1}")
        return "+".join(parts)

    def parse_root_label(self, label: str) -> tuple:
        vec = [0] * self.rank
        for part in label.replace(" ", "").split("+"):
            m = re.fullmatch(r"(\d*)a(\d+)", part)
            if not m or not 1 <= int(m.group(2)) <= self.rank:
                raise UsageError(f"bad root label {label!r}")
            vec[int(m.group(2)) - 1] += int(m.group(1) or 1)
        vec = tuple(vec)
        if vec not in self._root_index:
            raise UsageError(f"{label!r} is not a positive root of {self.label}")
        return vec

    @property
    def highest_root(self) -> tuple:
        return self.positive_roots[-1]

    def root_as_weight(self, root) -> Weight:
        return Weight(tuple(self._pair_coroot(i, root) for i in range(self.rank)))

    def pair(self, lam: Weight, k: int) -> Fraction:
        """lam(H_alpha) for the k-th positive root."""
        return sum(c * x for c, x in zip(self.coroots[k], lam.coords))

    # -- Chevalley basis ----------------------------------------------------
    def _build_basis(self):
        n = len(self.positive_roots)
        r = self.rank
        self.n_pos = n
        self.dim = 2 * n + r
        self.basis = tuple([("F", k) for k in range(n)] + [("H", j) for j in range(r)] + [("E", k) for k in range(n)])
        self.f_index = tuple(range(n))
        self.h_index = tuple(range(n, n + r))
        self.e_index = tuple(range(n + r, 2 * n + r))
        zero = (0,) * r
        self.basis_weight = tuple(
            tuple(-x for x in self.positive_roots[k]) if kind == "F" else zero if kind == "H" else self.positive_roots[k]
            for kind, k in self.basis
        )

    def basis_label(self, a: int) -> str:
        kind, k = self.basis[a]
        if kind == "H":
            return f"H[a{k + 1}]"
        return f"{kind}[{self.root_label(self.positive_roots[k])}]"

    def parse_basis_label(self, label: str) -> int:
        m = re.fullmatch(r"\s*([EFH])\[([^\]]+)\]\s*", label)
        if not m:
            raise UsageError(f"bad basis letter {label!r}")
        kind, body = m.groups()
        if kind == "H":
            mm = re.fullmatch(r"a(\d+)", body.strip())
            if not mm or not 1 <= int(mm.group(1)) <= self.rank:
                raise UsageError(f"bad Cartan letter {label!r}")
            return self.h_index[int(mm.group(1)) - 1]
        k = self.root_index(self.parse_root_label(body))
        return (self.e_index if kind == "E" else self.f_index)[k]

    def _build_structure_constants(self):
        module = build_lowering_module(self.cartan, self.root_as_weight(self.highest_root).coords)
        if module.dim != self.dim:
            raise InvariantViolation("adjoint module has wrong dimension")
        r, n = self.rank, self.n_pos
        e_mats: list = [None] * n
        f_mats: list = [None] * n
        recipe = {}
        for k, root in enumerate(self.positive_roots):
            if sum(root) == 1:
                i = root.index(1)
                e_mats[k], f_mats[k] = module.e_matrix(i), module.f_matrix(i)
                continue
            i = next(i for i in range(r) if root[i] > 0 and tuple(c - (m == i) for m, c in enumerate(root)) in self._root_index)
            beta = tuple(c - (m == i) for m, c in enumerate(root))
            b = self._root_index[beta]
            p = 0
            cur = beta
            while True:
                cur = tuple(c - (m == i) for m, c in enumerate(cur))
                if self.is_root(cur):
                    p += 1
                else:
                    break
            nval = p + 1
            ei, fi = module.e_matrix(i), module.f_matrix(i)
            e_mats[k] = (ei * e_mats[b] - e_mats[b] * ei) * QQ(1, nval)
            f_mats[k] = (f_mats[b] * fi - fi * f_mats[b]) * QQ(1, nval)
            recipe[k] = (i, b, nval)
        h_mats = [module.h_matrix(j) for j in range(r)]
        mats = f_mats + h_mats + e_mats
        self.recipe = recipe

        # H_alpha = [E_alpha, F_alpha] must be the coroot
        for k in range(n):
            lhs = e_mats[k] * f_mats[k] - f_mats[k] * e_mats[k]
            rhs = DomainMatrix({}, (self.dim, self.dim), QQ)
            for j, c in enumerate(self.coroots[k]):
                if c:
                    rhs = rhs + h_mats[j] * QQ(c)
            if lhs != rhs:
                raise InvariantViolation(f"[E,F] != H for root {self.positive_roots[k]}")

        diag_rows = [[h.to_dod().get(x, {}).get(x, QQ(0)) for h in h_mats] for x in range(self.dim)]
        brackets = [[() for _ in range(self.dim)] for _ in range(self.dim)]
        for a in range(self.dim):
            for b in range(a + 1, self.dim):
                comm = mats[a] * mats[b] - mats[b] * mats[a]
                if comm.is_zero_matrix:
                    continue
                wt = tuple(x + y for x, y in zip(self.basis_weight[a], self.basis_weight[b]))
                if any(wt):
                    if tuple(wt) in self._root_index:
                        c_idx = self.e_index[self._root_index[wt]]
                    else:
                        c_idx = self.f_index[self._root_index[tuple(-x for x in wt)]]
                    target = mats[c_idx].to_dod()
                    row = next(iter(target))
                    col = next(iter(target[row]))
                    coeff = comm.to_dod().get(row, {}).get(col, QQ(0)) / target[row][col]
                    terms = ((c_idx, coeff),)
                else:
                    # diagonal part solves sum_j c_j H_j = comm
                    d = comm.to_dod()
                    rhs = [d.get(x, {}).get(x, QQ(0)) for x in range(self.dim)]
                    mat = DomainMatrix(diag_rows, (self.dim, r), QQ)
                    vec = DomainMatrix([[v] for v in rhs], (self.dim, 1), QQ)
                    sol = (mat.transpose() * mat).lu_solve(mat.transpose() * vec).to_list()
                    terms = tuple((self.h_index[j], sol[j][0]) for j in range(r) if sol[j][0])
                check = DomainMatrix({}, (self.dim, self.dim), QQ)
                for c_idx, coeff in terms:
                    check = check + mats[c_idx] * coeff
                if check != comm:
                    raise InvariantViolation(f"bracket of basis {a},{b} not in expected weight space")
                for _, coeff in terms:
                    if coeff.denominator != 1:
                        raise InvariantViolation("non-integral structure constant")
                brackets[a][b] = tuple((c, int(coeff)) for c, coeff in terms)
                brackets[b][a] = tuple((c, -int(coeff)) for c, coeff in terms)
        self._brackets = tuple(tuple(row) for row in brackets)
        self._adjoint_module = module

    def bracket(self, a: int, b: int) -> tuple:
        """[X_a, X_b] as ``((c, coeff), ...)`` with integer coefficients."""
        return self._brackets[a][b]

    def structure_constant(self, alpha, beta) -> int:
        """N_{alpha,beta} for signed roots with [X_alpha, X_beta] = N X_{alpha+beta}."""
        a, b = self.root_basis_index(alpha), self.root_basis_index(beta)
        total = tuple(x + y for x, y in zip(alpha, beta))
        if not self.is_root(total):
            return 0
        c = self.root_basis_index(total)
        return dict(self.bracket(a, b)).get(c, 0)

    def root_basis_index(self, root) -> int:
        root = tuple(root)
        if root in self._root_index:
            return self.e_index[self._root_index[root]]
        return self.f_index[self._root_index[tuple(-x for x in root)]]

    # -- Killing form -----------------------------------------------------
    def _build_killing(self):
        d = self.dim
        ad = [[[0] * d for _ in range(d)] for _ in range(d)]  # ad[a][c][b] = coeff of X_c in [X_a, X_b]
        for a in range(d):
            for b in range(d):
                for c, coeff in self._brackets[a][b]:
                    ad[a][c][b] = coeff
        self.ad_int = ad
        killing = [[Fraction(0)] * d for _ in range(d)]
        for a in range(d):
            for b in range(a, d):
                s = sum(ad[a][c][e] * ad[b][e][c] for c in range(d) for e in range(d))
                killing[a][b] = killing[b][a] = Fraction(s)
        self.killing = tuple(tuple(row) for row in killing)
        hi = self.h_index
        self.killing_cartan = tuple(tuple(self.killing[i][j] for j in hi) for i in hi)
        mat = DomainMatrix([[QQ(x.numerator, x.denominator) for x in row] for row in self.killing_cartan],
                           (self.rank, self.rank), QQ)
        inv = mat.inv().to_list()
        self._killing_cartan_inv = tuple(tuple(Fraction(int(x.numerator), int(x.denominator)) for x in row) for row in inv)
        full = DomainMatrix([[QQ(x.numerator, x.denominator) for x in row] for row in self.killing], (d, d), QQ)
        finv = full.inv().to_list()
        self.killing_inverse = tuple(tuple(Fraction(int(x.numerator), int(x.denominator)) for x in row) for row in finv)

    # -- Weyl group -------------------------------------------------------
    def reflect(self, i: int, lam: Weight) -> Weight:
        # s_i(lam) = lam - lam(H_i) alpha_i, alpha_i(H_j) = A_ji
        li = lam.coords[i]
        return Weight(tuple(c - li * self.cartan[j][i] for j, c in enumerate(lam.coords)))

    def _build_weyl_group(self):
        start = self.rho
        seen = {start.coords: ()}
        queue = deque([(start, ())])
        while queue:
            lam, word = queue.popleft()
            for i in range(self.rank):
                img = self.reflect(i, lam)
                if img.coords not in seen:
                    # new word s_i w: s_i applied after w
                    seen[img.coords] = (i,) + word
                    queue.append((img, (i,) + word))
        self.weyl_words = tuple(sorted(seen.values(), key=lambda w: (len(w), w)))
        self.w0 = self.weyl_words[-1]

    def act(self, word, lam: Weight, shifted: bool = False) -> Weight:
        if shifted:
            return self.act(word, lam + self.rho) - self.rho
        for i in reversed(tuple(word)):
            if not 0 <= i < self.rank:
                raise UsageError(f"invalid simple reflection index {i}")
            lam = self.reflect(i, lam)
        return lam

    def act_on_root(self, word, root) -> tuple:
        root = tuple(root)
        for i in reversed(tuple(word)):
            c = self._pair_coroot(i, root)
            root = tuple(x - c * (k == i) for k, x in enumerate(root))
        return root

    def dual_weight(self, lam: Weight) -> Weight:
        """lambda' = -w0 lambda."""
        return -self.act(self.w0, lam)

    # -- pairings ---------------------------------------------------------
    def coroot_element(self, lam: Weight) -> tuple:
        """Coefficients c of H^lam = sum_j c_j H_j with (H, H^lam) = lam(H)."""
        inv = self._killing_cartan_inv
        return tuple(sum(inv[j][i] * lam.coords[i] for i in range(self.rank)) for j in range(self.rank))

    def form(self, lam: Weight, mu: Weight) -> Fraction:
        """(lam, mu) induced on h* by the Killing form: lam(H^mu)."""
        c = self.coroot_element(mu)
        return sum(x * y for x, y in zip(lam.coords, c))

    def height(self, lam: Weight) -> Fraction:
        """Sum of the coefficients of lam over the simple roots."""
        a = DomainMatrix([[QQ(self.cartan[i][j]) for j in range(self.rank)] for i in range(self.rank)],
                         (self.rank, self.rank), QQ)
        # lam(H_i) = sum_j A_ij m_j
        vec = DomainMatrix([[QQ(c.numerator, c.denominator)] for c in lam.coords], (self.rank, 1), QQ)
        sol = a.lu_solve(vec).to_list()
        return sum(Fraction(int(x[0].numerator), int(x[0].denominator)) for x in sol)

    def weyl_dimension(self, lam: Weight) -> int:
        num, den = Fraction(1), Fraction(1)
        for k in range(self.n_pos):
            num *= self.pair(lam + self.rho, k)
            den *= self.pair(self.rho, k)
        value = num / den
        if value.denominator != 1:
            raise UsageError(f"{lam} is not integral")
        return int(value)

    def regularity(self, lam: Weight) -> Regularity:
        zero = [k for k in range(self.n_pos) if self.pair(lam, k) == 0]
        zero_set = {self.positive_roots[k] for k in zero}
        vanishing = tuple(self.positive_roots[k] for k in zero) + tuple(
            tuple(-x for x in self.positive_roots[k]) for k in zero
        )
        ok = True
        for a in self.positive_roots:
            for b in self.positive_roots:
                s = tuple(x + y for x, y in zip(a, b))
                if s in zero_set and not (a in zero_set and b in zero_set):
                    ok = False
        sigma = tuple(i for i in range(self.rank) if tuple(int(i == j) for j in range(self.rank)) in zero_set)
        return Regularity(vanishing, ok, sigma if ok else None)

    def stabilizer_roots(self, lam: Weight) -> tuple:
        """Indices of the positive roots in Delta^+(lam)."""
        return tuple(k for k in range(self.n_pos) if self.pair(lam, k) == 0)

    def __repr__(self) -> str:
        return f"RootDatum({self.label!r})"

    def structure_table(self) -> list:
        """Rows (alpha, beta, N_{alpha,beta}) for positive alpha, beta with alpha+beta a root."""
        rows = []
        for a in self.positive_roots:
            for b in self.positive_roots:
                s = tuple(x + y for x, y in zip(a, b))
                if s in self._root_index:
                    rows.append((self.root_label(a), self.root_label(b), self.structure_constant(a, b)))
        return rows

    def info(self) -> dict:
        return {
            "type": self.label,
            "rank": self.rank,
            "dim": self.dim,
            "cartan_matrix": [list(r) for r in self.cartan],
            "positive_roots": [self.root_label(r) for r in self.positive_roots],
            "coroots": {self.root_label(r): list(c) for r, c in zip(self.positive_roots, self.coroots)},
            "rho": str(self.rho),
            "fundamental_weights": [str(w) for w in self.fundamental_weights],
            "weyl_order": len(self.weyl_words),
            "w0": list(self.w0),
            "killing_cartan": [[str(x) for x in row] for row in self.killing_cartan],
            "structure_constants": [list(r) for r in self.structure_table()],
        }


@functools.lru_cache(maxsize=None)
def build_root_system(label: str) -> RootDatum:
    return RootDatum(label)


def weyl_act(rd: RootDatum, word, lam: Weight, shifted: bool = False) -> Weight:
    return rd.act(word, lam, shifted)


def coroot_element(rd: RootDatum, lam: Weight) -> tuple:
    return rd.coroot_element(lam)


def regularity(rd: RootDatum, lam: Weight) -> Regularity:
    return rd.regularity(lam)
