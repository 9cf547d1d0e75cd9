"""The s-map, covariant/contravariant symbols and mixed symbols."""
import numpy as np
import pytest
from hypothesis import given, strategies as st

from flagquant.group import CompactGroupElement
from flagquant.orbit import QuadratureSet, haar_samples
from flagquant.rep import Operator, build_irrep, group_action, represent
from flagquant.rootsys import Weight, build_root_system
from flagquant.symbols import (SampledFunction, contravariant_reconstruct, covariant_function,
                               covariant_symbol, coxeter_twist_values, mixed_symbol, operator_preimage,
                               right_shift_derivative, s_lambda, s_lambda_values, trace_pairing)
from flagquant.uea import PBWElement, linear_substitute, random_element

seeds = st.integers(0, 2**31 - 1)
DOMINANT = [("A1", (1,)), ("A1", (3,)), ("A2", (1, 0)), ("A2", (1, 1)), ("B2", (0, 1))]


@pytest.mark.parametrize("label,lam", DOMINANT)
@given(seed=seeds)
def test_s_map_equals_coherent_state_expectation(label, lam, seed):
    # [DERIVED] matrices + expm: <pi(u) k v, k v> for the highest weight vector v
    rd = build_root_system(label)
    lam = Weight(lam)
    rng = np.random.default_rng(seed)
    rep = build_irrep(rd, lam)
    u = random_element(rd, 3, rng, n_terms=4)
    k = CompactGroupElement.random(rd, rng)
    g = group_action(k, rep).matrix
    v = g @ rep.highest_vector
    expected = rep.inner(represent(u, rep).matrix @ v, v)
    assert abs(s_lambda(u, lam, k) - expected) < 1e-9 * max(1.0, u.max_abs())
    assert abs(covariant_symbol(represent(u, rep), k) - expected) < 1e-9 * max(1.0, u.max_abs())


@pytest.mark.parametrize("label", ["A1", "A2", "B2", "G2"])
@given(seed=seeds)
def test_batched_route_matches_reference(label, seed):
    rd = build_root_system(label)
    rng = np.random.default_rng(seed)
    lam = Weight(tuple(rng.integers(-2, 3, size=rd.rank)))     # any weight, not only dominant
    u = random_element(rd, 3, rng, n_terms=4)
    qs = haar_samples(rd, 4, seed=seed % 1000)
    ref = np.array([s_lambda(u, lam, k) for k in qs.elements()])
    assert np.allclose(s_lambda_values(u, lam, qs), ref, atol=1e-9 * max(1.0, u.max_abs()))


@pytest.mark.parametrize("label", ["A1", "A2"])
def test_s_map_at_identity(label):
    rd = build_root_system(label)
    lam = Weight(tuple(range(2, 2 + rd.rank)))
    e = CompactGroupElement.identity(rd)
    assert s_lambda(PBWElement.one(rd), lam, e) == pytest.approx(1)
    for j in range(rd.rank):
        assert s_lambda(PBWElement.letter(rd, rd.h_index[j]), lam, e) == pytest.approx(float(lam.coords[j]))
    for k in range(rd.n_pos):
        assert s_lambda(PBWElement.letter(rd, rd.e_index[k]), lam, e) == pytest.approx(0)


@pytest.mark.parametrize("label", ["A1", "A2"])
@given(seed=seeds)
def test_s_map_is_equivariant(label, seed):
    # s(Ad(g) u)(k) = s(u)(g^-1 k)
    rd = build_root_system(label)
    rng = np.random.default_rng(seed)
    lam = rd.rho
    u = random_element(rd, 2, rng, n_terms=3)
    g, k = CompactGroupElement.random(rd, rng), CompactGroupElement.random(rd, rng)
    moved = linear_substitute(u, g.ad_matrix())
    assert abs(s_lambda(moved, lam, k) - s_lambda(u, lam, g.inverse() * k)) < 1e-9 * max(1, u.max_abs())


@pytest.mark.parametrize("label,lam", [("A1", (1,)), ("A1", (2,)), ("A2", (1, 1))])
def test_right_shift_derivative_matches_finite_difference(label, lam):
    rd = build_root_system(label)
    lam = Weight(lam)
    rng = np.random.default_rng(7)
    u = random_element(rd, 2, rng, n_terms=3)
    k = CompactGroupElement.random(rd, rng)
    y = rng.normal(size=rd.dim)
    h = 1e-5
    fwd = s_lambda(u, lam, k * CompactGroupElement.exp(rd, h * y))
    bwd = s_lambda(u, lam, k * CompactGroupElement.exp(rd, -h * y))
    assert abs(right_shift_derivative(u, lam, y, k) - (fwd - bwd) / (2 * h)) < 1e-6 * max(1, u.max_abs())


def test_cartan_shift_leaves_the_symbol_invariant(a2):
    # the Cartan torus fixes the base point for any weight
    lam = Weight((1, 1))
    u = random_element(a2, 3, np.random.default_rng(1), n_terms=4)
    y = np.zeros(a2.dim)
    y[0] = 1.0
    k = CompactGroupElement.random(a2, np.random.default_rng(2))
    assert abs(right_shift_derivative(u, lam, y, k)) < 1e-10 * max(1, u.max_abs())


@pytest.mark.parametrize("spin", [1, 2, 3])
def test_reconstruct_identity_with_exact_quadrature(spin):
    rd = build_root_system("A1")
    rep = build_irrep(rd, Weight((spin,)))
    qs = haar_samples(rd, spin, mode="quadrature")
    one = SampledFunction(qs, np.ones(len(qs)))
    assert np.allclose(contravariant_reconstruct(one, rep).matrix, np.eye(rep.dim), atol=1e-12)


def test_covariant_of_reconstruct_is_berezin_transform():
    # the covariant symbol of the contravariant reconstruction of a constant is that constant
    rd = build_root_system("A1")
    rep = build_irrep(rd, Weight((2,)))
    qs = haar_samples(rd, 4, mode="quadrature")
    b = contravariant_reconstruct(SampledFunction(qs, np.full(len(qs), 2.5)), rep)
    assert np.allclose(covariant_function(b, qs).values, 2.5)


@pytest.mark.parametrize("label,lam", [("A1", (2,)), ("A2", (1, 0))])
def test_trace_pairing(label, lam):
    rd = build_root_system(label)
    lam = Weight(lam)
    rng = np.random.default_rng(0)
    u1, u2 = random_element(rd, 2, rng, n_terms=3), random_element(rd, 2, rng, n_terms=3)
    qs = haar_samples(rd, 6, mode="quadrature") if label == "A1" else haar_samples(rd, 40000, seed=1)
    out = trace_pairing(u1, u2, lam, qs)
    assert out["transpose_difference"] < 1e-9 * max(1, abs(out["rhs"]))
    tol = 1e-9 * max(1, abs(out["rhs"])) if label == "A1" else 4 * out["stderr"] + 1e-12
    assert out["difference"] < tol


@pytest.mark.parametrize("label,lam", [("A1", (1,)), ("A2", (1, 0)), ("A2", (0, 1))])
def test_coxeter_twist(label, lam):
    rd = build_root_system(label)
    u = random_element(rd, 3, np.random.default_rng(4), n_terms=4)
    qs = haar_samples(rd, 10, seed=3)
    assert np.abs(coxeter_twist_values(u, Weight(lam), qs)).max() < 1e-9 * max(1, u.max_abs())


@pytest.mark.parametrize("label,lam", [("A1", (2,)), ("A2", (1, 0))])
def test_mixed_symbol_at_identity_is_covariant(label, lam):
    rd = build_root_system(label)
    rep = build_irrep(rd, Weight(lam))
    rng = np.random.default_rng(5)
    a = Operator(rng.normal(size=(rep.dim, rep.dim)) + 1j * rng.normal(size=(rep.dim, rep.dim)), rep)
    qs = haar_samples(rd, 8, seed=2)
    assert np.allclose(mixed_symbol(a, (), qs).values, covariant_function(a, qs).values, atol=1e-9)
    # a different preimage gives the same symbol
    other = mixed_symbol(a, (), qs, order="reverse")
    assert np.allclose(other.values, covariant_function(a, qs).values, atol=1e-9)


def test_operator_preimage(a2):
    rep = build_irrep(a2, Weight((1, 0)))
    rng = np.random.default_rng(0)
    a = Operator(rng.normal(size=(3, 3)), rep)
    u = operator_preimage(a)
    assert np.allclose(represent(u, rep).matrix, a.matrix, atol=1e-10)


def test_sampled_function_rejects_bad_shapes(a1):
    qs = haar_samples(a1, 3, seed=0)
    with pytest.raises(Exception):
        SampledFunction(qs, np.ones(2))
