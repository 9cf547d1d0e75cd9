"""Exact construction of a simple highest-weight module from a Cartan matrix.

Only the simple generators ``E_i, F_i, H_i`` and the relations

    [E_i, F_j] = delta_ij H_i,   [H_i, F_j] = -A_ij F_j,   E_i v = 0,  H_i v = lam_i v

are used, so the same routine bootstraps the adjoint representation (and
with it the structure constants) and builds every irrep later on.

Vectors of the module are words ``F_{j1} ... F_{jk} v``.  The contravariant
form satisfies <F_j x, y> = <x, E_j y>; it is computed level by level, a
maximal independent set of words per weight space is kept and everything
else is expressed in that basis.  Quotienting by the radical happens
implicitly: a candidate word whose Schur complement against the kept basis
vanishes is dependent modulo the radical.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from .errors import ResourceError


@dataclass
class LoweringModule:
    cartan: tuple
    highest_weight: tuple
    weights: list            # weight (tuple of ints) of each basis vector
    levels: list             # depth below the highest weight
    words: list              # simple-index word w with vector F_{w[0]} ... F_{w[-1]} v
    gram_blocks: dict        # weight -> list[list[mpq]]
    e_cols: list             # e_cols[i][b] = {b': coeff}: E_i b = sum coeff b'
    f_cols: list
    by_weight: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return len(self.weights)

    def _sparse(self, cols) -> DomainMatrix:
        rows: dict = {}
        for b, image in enumerate(cols):
            for b2, c in image.items():
                if c:
                    rows.setdefault(b2, {})[b] = QQ(c)
        return DomainMatrix(rows, (self.dim, self.dim), QQ)

    def e_matrix(self, i: int) -> DomainMatrix:
        return self._sparse(self.e_cols[i])

    def f_matrix(self, i: int) -> DomainMatrix:
        return self._sparse(self.f_cols[i])

    def h_matrix(self, i: int) -> DomainMatrix:
        rows = {b: {b: QQ(w[i])} for b, w in enumerate(self.weights) if w[i]}
        return DomainMatrix(rows, (self.dim, self.dim), QQ)

    def gram_matrix(self) -> DomainMatrix:
        rows: dict = {}
        for wt, ids in self.by_weight.items():
            block = self.gram_blocks[wt]
            for a, ia in enumerate(ids):
                for b, ib in enumerate(ids):
                    if block[a][b]:
                        rows.setdefault(ia, {})[ib] = block[a][b]
        return DomainMatrix(rows, (self.dim, self.dim), QQ)


def _inner(vec: dict, target: int, gram_row_of) -> "QQ.dtype":
    """<vec, target> for a coordinate dict ``vec`` in one weight space."""
    row = gram_row_of(target)
    return sum((c * row[b] for b, c in vec.items() if b in row), QQ(0))


def build_lowering_module(cartan, highest_weight, max_dim: int = 10_000) -> LoweringModule:
    """Build the simple module with the given highest weight (fundamental-weight coordinates).

    ``highest_weight`` must be dominant integral for the result to be finite;
    the caller checks that, here we only enforce ``max_dim``.
    """
    r = len(cartan)
    lam = tuple(int(x) for x in highest_weight)
    # simple root j expressed in fundamental-weight coordinates: alpha_j(H_i) = A_ij
    alpha = [tuple(cartan[i][j] for i in range(r)) for j in range(r)]

    weights = [lam]
    levels = [0]
    words: list = [()]
    by_weight = {lam: [0]}
    gram_blocks = {lam: [[QQ(1)]]}
    e_cols = [[{}] for _ in range(r)]
    f_cols = [[None] for _ in range(r)]
    position = {0: 0}  # id -> index inside its weight space

    # (Gram row lookup keyed by id, cached per weight block)
    def gram_row_of(b):
        wt = weights[b]
        ids = by_weight[wt]
        row = gram_blocks[wt][position[b]]
        return {ids[k]: row[k] for k in range(len(ids))}

    current = [0]
    level = 0
    while current:
        level += 1
        # candidates F_j b grouped by weight
        cands: dict = {}
        for b in current:
            for j in range(r):
                mu = tuple(weights[b][i] - alpha[j][i] for i in range(r))
                cands.setdefault(mu, []).append((j, b))
        new_ids = []
        for mu in sorted(cands, reverse=True):
            group = cands[mu]
            # E_i applied to each candidate, in coordinates of weight mu + alpha_i
            e_images = []
            for j, b in group:
                imgs = []
                for i in range(r):
                    out: dict = {}
                    for b1, c1 in e_cols[i][b].items():
                        for b2, c2 in f_cols[j][b1].items():
                            out[b2] = out.get(b2, QQ(0)) + c1 * c2
                    if i == j and weights[b][i]:
                        out[b] = out.get(b, QQ(0)) + QQ(weights[b][i])
                    imgs.append({k: v for k, v in out.items() if v})
                e_images.append(imgs)

            def cand_inner(a, c):
                # <F_ja b_a, F_jc b_c> = <E_jc F_ja b_a, b_c>
                jc, bc = group[c]
                return _inner(e_images[a][jc], bc, gram_row_of)

            n = len(group)
            full = [[None] * n for _ in range(n)]
            for a in range(n):
                for c in range(a, n):
                    full[a][c] = full[c][a] = cand_inner(a, c)

            chosen: list = []
            inv = None  # inverse Gram of the chosen set (DomainMatrix over QQ)
            for a in range(n):
                g = [full[a][c] for c in chosen]
                if chosen:
                    gv = DomainMatrix([[x] for x in g], (len(g), 1), QQ)
                    schur = full[a][a] - (gv.transpose() * inv * gv).to_list()[0][0]
                else:
                    schur = full[a][a]
                if schur:
                    chosen.append(a)
                    sub = DomainMatrix([[full[x][y] for y in chosen] for x in chosen],
                                       (len(chosen), len(chosen)), QQ)
                    inv = sub.inv()
            if not chosen:
                for j, b in group:
                    f_cols[j][b] = {}
                continue

            ids = []
            for a in chosen:
                j, b = group[a]
                nid = len(weights)
                weights.append(mu)
                levels.append(level)
                words.append((j,) + words[b])
                ids.append(nid)
                for i in range(r):
                    e_cols[i].append(e_images[a][i])
                    f_cols[i].append(None)
            by_weight[mu] = ids
            for k, nid in enumerate(ids):
                position[nid] = k
            gram_blocks[mu] = [[full[x][y] for y in chosen] for x in chosen]
            inv_rows = inv.to_list()
            for a in range(n):
                j, b = group[a]
                g = [full[a][c] for c in chosen]
                coords = {}
                for k, nid in enumerate(ids):
                    v = sum((inv_rows[k][m] * g[m] for m in range(len(g))), QQ(0))
                    if v:
                        coords[nid] = v
                f_cols[j][b] = coords
            new_ids.extend(ids)
            if len(weights) > max_dim:
                raise ResourceError(
                    f"module with highest weight {lam} exceeds dimension cap {max_dim}"
                )
        current = new_ids

    for i in range(r):
        f_cols[i] = [c if c is not None else {} for c in f_cols[i]]
    return LoweringModule(
        cartan=tuple(tuple(row) for row in cartan),
        highest_weight=lam,
        weights=weights,
        levels=levels,
        words=words,
        gram_blocks=gram_blocks,
        e_cols=e_cols,
        f_cols=f_cols,
        by_weight=by_weight,
    )
