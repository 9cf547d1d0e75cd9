"""Root data, Weyl group and Chevalley structure constants."""
import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from flagquant.errors import ConfigurationError, UsageError
from flagquant.rep import build_irrep, represent
from flagquant.rootsys import Weight, build_root_system
from flagquant.uea import PBWElement

from conftest import ALL_TYPES

# [TRIVIAL] classical tables: number of positive roots and Weyl group orders
TABLE = {
    "A1": (1, 2), "A2": (3, 6), "A3": (6, 24), "B2": (4, 8),
    "B3": (9, 48), "C2": (4, 8), "C3": (9, 48), "G2": (6, 12),
}


@pytest.mark.parametrize("label", ALL_TYPES)
def test_root_and_weyl_counts(label):
    rd = build_root_system(label)
    n_pos, order = TABLE[label]
    assert rd.n_pos == n_pos
    assert len(rd.weyl_words) == order
    assert rd.dim == 2 * n_pos + rd.rank
    assert len(rd.w0) == n_pos          # longest element has length |Delta+|


@pytest.mark.parametrize("label", ALL_TYPES)
def test_cartan_matrix_convention(label):
    rd = build_root_system(label)
    # A_ij = alpha_j(H_i): diagonal 2, and column j is the weight of alpha_j
    for j in range(rd.rank):
        simple = tuple(int(i == j) for i in range(rd.rank))
        col = rd.root_as_weight(simple).coords
        assert col == tuple(Fraction(rd.cartan[i][j]) for i in range(rd.rank))
    assert all(rd.cartan[i][i] == 2 for i in range(rd.rank))


@pytest.mark.parametrize("label", ALL_TYPES)
def test_jacobi_identity(label):
    rd = build_root_system(label)
    ad = np.array(rd.ad_int, dtype=float)        # ad[a][c][b]
    for a, b in itertools.combinations(range(rd.dim), 2):
        # ad([X_a, X_b]) = [ad X_a, ad X_b]
        lhs = sum(c * ad[k] for k, c in rd.bracket(a, b)) if rd.bracket(a, b) else np.zeros_like(ad[0])
        rhs = ad[a] @ ad[b] - ad[b] @ ad[a]
        assert np.array_equal(lhs, rhs)


@pytest.mark.parametrize("label", ALL_TYPES)
def test_chevalley_constants_are_plus_minus_p_plus_one(label):
    rd = build_root_system(label)
    signed = list(rd.positive_roots) + [tuple(-x for x in r) for r in rd.positive_roots]
    for a in signed:
        for b in signed:
            total = tuple(x + y for x, y in zip(a, b))
            if not any(total) or not rd.is_root(total):
                continue
            p = 0
            cur = b
            while True:
                cur = tuple(x - y for x, y in zip(cur, a))
                if rd.is_root(cur):
                    p += 1
                else:
                    break
            assert abs(rd.structure_constant(a, b)) == p + 1


@pytest.mark.parametrize("label", ["A1", "A2", "A3"])
def test_killing_form_matches_trace_form_on_defining_rep(label):
    # [DERIVED] Killing(X, Y) = 2(n+1) tr(XY) for sl(n+1)
    rd = build_root_system(label)
    rep = build_irrep(rd, rd.fundamental_weights[0])
    mats = [represent(PBWElement.letter(rd, a), rep).matrix for a in range(rd.dim)]
    for a in range(rd.dim):
        for b in range(rd.dim):
            expected = 2 * (rd.rank + 1) * np.trace(mats[a] @ mats[b])
            assert abs(float(rd.killing[a][b]) - expected) < 1e-12


def test_sl2_killing_value(a1):
    # [TRIVIAL] B(H, H) = 8 for sl2
    assert a1.killing_cartan == ((Fraction(8),),)


@pytest.mark.parametrize("label", ALL_TYPES)
def test_w0_sends_rho_to_minus_rho(label):
    rd = build_root_system(label)
    assert rd.act(rd.w0, rd.rho) == -rd.rho
    assert rd.act(rd.w0, rd.rho, shifted=True) == -3 * rd.rho   # w0(2 rho) - rho


@pytest.mark.parametrize("label", ALL_TYPES)
def test_weyl_group_preserves_form(label):
    rd = build_root_system(label)
    lam, mu = Weight((1,) + (0,) * (rd.rank - 1)), rd.rho
    for w in rd.weyl_words:
        assert rd.form(rd.act(w, lam), rd.act(w, mu)) == rd.form(lam, mu)


@pytest.mark.parametrize("label", ALL_TYPES)
def test_form_is_symmetric_and_positive(label):
    rd = build_root_system(label)
    basis = rd.fundamental_weights
    gram = [[rd.form(a, b) for b in basis] for a in basis]
    assert gram == [list(r) for r in zip(*gram)]
    assert np.all(np.linalg.eigvalsh(np.array(gram, dtype=float)) > 0)


def test_height_of_highest_root():
    # [TRIVIAL] Coxeter number minus one
    for label, h in {"A2": 2, "A3": 3, "B2": 3, "C3": 5, "G2": 5}.items():
        rd = build_root_system(label)
        assert rd.height(rd.root_as_weight(rd.highest_root)) == h


def _hook_content_dim(partition, n):
    # [DERIVED] dimension of the sl(n) irrep with Young diagram `partition`
    num = den = 1
    conj = [sum(1 for p in partition if p > j) for j in range(partition[0])] if partition else []
    for i, row in enumerate(partition):
        for j in range(row):
            num *= n + j - i
            den *= (row - j - 1) + (conj[j] - i - 1) + 1
    return num // den


@pytest.mark.parametrize("label", ["A1", "A2", "A3"])
@given(data=st.data())
def test_weyl_dimension_matches_hook_content(label, data):
    rd = build_root_system(label)
    coords = tuple(data.draw(st.integers(0, 4)) for _ in range(rd.rank))
    partition = [sum(coords[i:]) for i in range(rd.rank)]
    partition = [p for p in partition if p > 0]
    assert rd.weyl_dimension(Weight(coords)) == _hook_content_dim(partition, rd.rank + 1)


@pytest.mark.parametrize("text,expected", [
    ("w[1,-1]", (1, -1)), ("[1/2,0]", (Fraction(1, 2), 0)), ("2, 3", (2, 3)), ("7", (7,)),
])
def test_weight_parse(text, expected):
    assert Weight.parse(text).coords == tuple(Fraction(x) for x in expected)


@pytest.mark.parametrize("text", ["", "w[]", "a,b", "1,,2"])
def test_weight_parse_rejects(text):
    with pytest.raises(UsageError):
        Weight.parse(text)


def test_unsupported_type():
    with pytest.raises(ConfigurationError):
        build_root_system("E8")


@pytest.mark.parametrize("label", ALL_TYPES)
def test_basis_labels_round_trip(label):
    rd = build_root_system(label)
    for a in range(rd.dim):
        assert rd.parse_basis_label(rd.basis_label(a)) == a


@pytest.mark.parametrize("label,lam,regular", [
    ("A2", (1, 1), True), ("A2", (1, 0), True), ("A2", (1, -1), False),
    ("B2", (0, 1), True), ("G2", (0, 0), True),
])
def test_relative_regularity(label, lam, regular):
    rd = build_root_system(label)
    assert rd.regularity(Weight(lam)).relatively_regular is regular


def test_dual_weight_a2(a2):
    # [TRIVIAL] -w0 swaps the two fundamental weights of A2
    assert a2.dual_weight(Weight((1, 0))) == Weight((0, 1))
