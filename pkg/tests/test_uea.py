"""Exact PBW algebra: ordering, products, projections, symbols."""
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from sympy.polys.domains import QQ, QQ_I
from sympy.polys.matrices import DomainMatrix

from flagquant._exact import to_complex
from flagquant.errors import ResourceError, UsageError
from flagquant.rep import build_irrep, represent, represent_exact
from flagquant.rootsys import Weight, build_root_system
from flagquant.uea import (PBWElement, SymPolynomial, casimir, check, commutator, hc_project,
                           normal_order, phi, poisson_bracket_sym, principal_symbol, random_element,
                           random_sym, symmetrize, theta)

from conftest import SMALL_TYPES

seeds = st.integers(0, 2**31 - 1)


def _faithful(rd):
    # adjoint and a fundamental rep together separate low-degree elements
    return build_irrep(rd, rd.fundamental_weights[0])


@pytest.mark.parametrize("label", SMALL_TYPES)
@given(seed=seeds)
def test_product_is_associative(label, seed):
    rd = build_root_system(label)
    rng = np.random.default_rng(seed)
    a, b, c = (random_element(rd, 2, rng, n_terms=2) for _ in range(3))
    assert (a * b) * c == a * (b * c)


@pytest.mark.parametrize("label", ["A1", "A2", "B2"])
@given(seed=seeds)
def test_representation_is_a_homomorphism(label, seed):
    # [DERIVED] matrix multiplication is the oracle for the PBW product
    rd = build_root_system(label)
    rng = np.random.default_rng(seed)
    rep = _faithful(rd)
    a = random_element(rd, 2, rng, n_terms=3)
    b = random_element(rd, 2, rng, n_terms=3)
    lhs = represent(a * b, rep).matrix
    rhs = represent(a, rep).matrix @ represent(b, rep).matrix
    assert np.allclose(lhs, rhs, atol=1e-10)


@pytest.mark.parametrize("label", SMALL_TYPES)
@given(seed=seeds)
def test_normal_ordering_is_confluent(label, seed):
    rd = build_root_system(label)
    rng = np.random.default_rng(seed)
    word = tuple(int(x) for x in rng.integers(0, rd.dim, size=int(rng.integers(2, 6))))
    assert normal_order(rd, word, rng=np.random.default_rng(seed + 1)) == normal_order(rd, word)


@pytest.mark.parametrize("label", SMALL_TYPES)
def test_letter_commutators_match_brackets(label):
    rd = build_root_system(label)
    for a in range(rd.dim):
        for b in range(rd.dim):
            lhs = commutator(PBWElement.letter(rd, a), PBWElement.letter(rd, b))
            rhs = PBWElement(rd, {(c,): k for c, k in rd.bracket(a, b)})
            assert lhs == rhs


def test_sl2_relations(a1):
    e, f, h = (PBWElement.letter(a1, x) for x in ("E[a1]", "F[a1]", "H[a1]"))
    assert commutator(e, f) == h
    assert commutator(h, e) == e * 2
    assert commutator(h, f) == f * -2


@pytest.mark.parametrize("label", SMALL_TYPES)
@given(seed=seeds)
def test_parse_round_trip_exact(label, seed):
    rd = build_root_system(label)
    u = random_element(rd, 3, np.random.default_rng(seed), n_terms=3)
    assert PBWElement.parse(rd, str(u)) == u


@given(seed=seeds)
def test_parse_round_trip_float(seed):
    rd = build_root_system("A2")
    u = random_element(rd, 2, np.random.default_rng(seed), n_terms=3, exact=False)
    assert PBWElement.parse(rd, str(u)).allclose(u, 0.0)


def test_parse_reorders_words(a1):
    # F E is already normal order in F < H < E; E F = F E + H
    u = PBWElement.parse(a1, "E[a1] F[a1]")
    assert u == PBWElement.parse(a1, "F[a1] E[a1] + H[a1]")


@pytest.mark.parametrize("text", ["X[a1]", "E[a3]", "(1+ i) *"])
def test_parse_rejects_garbage(a1, text):
    with pytest.raises(UsageError):
        PBWElement.parse(a1, text)


def test_degree_cap(a1):
    with pytest.raises(ResourceError):
        normal_order(a1, (0,) * 64)


@pytest.mark.parametrize("label", SMALL_TYPES)
@given(seed=seeds)
def test_involutions(label, seed):
    rd = build_root_system(label)
    rng = np.random.default_rng(seed)
    u, v = random_element(rd, 2, rng, n_terms=2), random_element(rd, 2, rng, n_terms=2)
    assert check(check(u)) == u
    assert theta(theta(u)) == u
    assert check(u * v) == check(v) * check(u)
    assert theta(u * v) == theta(u) * theta(v)


@pytest.mark.parametrize("label", ["A1", "A2"])
@given(seed=seeds)
def test_theta_is_the_hermitian_adjoint_up_to_check(label, seed):
    # [DERIVED] pi(check(theta(u))) is the adjoint of pi(u) for the contravariant form
    rd = build_root_system(label)
    rep = _faithful(rd)
    u = random_element(rd, 2, np.random.default_rng(seed), n_terms=3)
    adj = represent(u, rep).adjoint().matrix
    assert np.allclose(represent(check(theta(u)), rep).matrix, adj, atol=1e-10)


@pytest.mark.parametrize("label", SMALL_TYPES)
@given(seed=seeds)
def test_hc_projection_kills_the_two_sided_part(label, seed):
    rd = build_root_system(label)
    rng = np.random.default_rng(seed)
    u = random_element(rd, 2, rng, n_terms=2)
    f = PBWElement.letter(rd, rd.f_index[int(rng.integers(rd.n_pos))])
    e = PBWElement.letter(rd, rd.e_index[int(rng.integers(rd.n_pos))])
    assert not hc_project(f * u).terms
    assert not hc_project(u * e).terms


@pytest.mark.parametrize("label", ["A1", "A2", "B2"])
@given(seed=seeds)
def test_phi_is_the_highest_weight_matrix_entry(label, seed):
    # [DERIVED] phi_lam(u) = <pi(u) v, v> / <v, v> on the highest weight vector
    rd = build_root_system(label)
    lam = rd.rho
    rep = build_irrep(rd, lam)
    u = random_element(rd, 3, np.random.default_rng(seed), n_terms=4)
    v = rep.highest_vector
    expected = rep.inner(represent(u, rep).matrix @ v, v) / rep.inner(v, v)
    assert abs(to_complex(phi(u, lam)) - expected) < 1e-9


def test_phi_on_cartan(a2):
    lam = Weight((2, 5))
    for j in range(2):
        assert to_complex(phi(PBWElement.letter(a2, a2.h_index[j]), lam)) == lam.coords[j]


@pytest.mark.parametrize("label,lam", [("A1", (3,)), ("A2", (1, 1)), ("B2", (1, 0)), ("G2", (1, 0))])
def test_casimir_scalar(label, lam):
    rd = build_root_system(label)
    lam = Weight(lam)
    rep = build_irrep(rd, lam)
    c = rd.form(lam, lam + rd.rho * 2)
    expected = DomainMatrix.eye(rep.dim, QQ_I) * QQ_I(QQ(c.numerator, c.denominator), 0)
    assert represent_exact(casimir(rd), rep) == expected


@pytest.mark.parametrize("label", SMALL_TYPES)
def test_casimir_is_central(label):
    rd = build_root_system(label)
    cas = casimir(rd)
    for a in range(rd.dim):
        assert commutator(cas, PBWElement.letter(rd, a)).is_zero


@pytest.mark.parametrize("label", SMALL_TYPES)
@given(seed=seeds)
def test_commutator_symbol_is_poisson_bracket(label, seed):
    rd = build_root_system(label)
    rng = np.random.default_rng(seed)
    u1 = random_element(rd, 2, rng, n_terms=2, homogeneous=True)
    u2 = random_element(rd, 2, rng, n_terms=2, homogeneous=True)
    d = u1.degree + u2.degree
    assert principal_symbol(u1 * u2) == (d, principal_symbol(u1)[1] * principal_symbol(u2)[1])
    comm = commutator(u1, u2)
    top = SymPolynomial(rd, dict(comm.homogeneous(d - 1).terms))
    assert top == poisson_bracket_sym(principal_symbol(u1)[1], principal_symbol(u2)[1])


@pytest.mark.parametrize("label", ["A1", "A2"])
@given(seed=seeds)
def test_poisson_bracket_jacobi(label, seed):
    rd = build_root_system(label)
    rng = np.random.default_rng(seed)
    p, q, r = (random_sym(rd, 2, rng, n_terms=2) for _ in range(3))
    pb = poisson_bracket_sym
    total = pb(p, pb(q, r)) + pb(q, pb(r, p)) + pb(r, pb(p, q))
    assert total == SymPolynomial(rd)


@pytest.mark.parametrize("label", SMALL_TYPES)
@given(seed=seeds, d=st.integers(1, 4))
def test_symmetrization_is_a_section(label, seed, d):
    rd = build_root_system(label)
    p = random_sym(rd, d, np.random.default_rng(seed))
    assert principal_symbol(symmetrize(p)) == (d, p)


def test_symmetrization_of_two_letters(a1):
    e, f = a1.e_index[0], a1.f_index[0]
    p = SymPolynomial.variable(a1, e) * SymPolynomial.variable(a1, f)
    half = PBWElement.parse(a1, "F[a1] E[a1]") + PBWElement.parse(a1, "H[a1]") * Fraction(1, 2)
    assert symmetrize(p) == half


def test_sympolynomial_evaluation(a1):
    x = SymPolynomial.variable(a1, 0)
    y = SymPolynomial.variable(a1, 2)
    p = x * x * 3 + y * QQ_I(0, 1)
    assert p.evaluate([2.0, 0.0, 1.0]) == pytest.approx(12 + 1j)
    vals = np.array([[1.0, 0, 0], [0, 0, 2.0]])
    assert np.allclose(p.evaluate_many(vals), [3, 2j])
