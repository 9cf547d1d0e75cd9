"""Adjoint action, orbit map, Haar sampling and quadrature."""
import numpy as np
import pytest
from hypothesis import given, strategies as st

from flagquant.errors import ConfigurationError
from flagquant.group import CompactGroupElement, ad_compact, compact_basis, weyl_lift
from flagquant.orbit import (QuadratureSet, coroot_vector, defining_matrix, haar_samples, killing_matrix,
                             psi, psi_many, stabilizer_basis, w0_lift)
from flagquant.rep import apply_group, build_irrep, coherent_vectors
from flagquant.rootsys import Weight, build_root_system

seeds = st.integers(0, 2**31 - 1)
LABELS = ["A1", "A2", "B2", "G2"]


def _bracket_matrix(rd, x):
    ad = np.array(rd.ad_int, dtype=float)      # ad[a][c][b]
    return np.einsum("a,acb->cb", x, ad)


@pytest.mark.parametrize("label", LABELS)
@given(seed=seeds)
def test_ad_is_a_killing_automorphism(label, seed):
    rd = build_root_system(label)
    rng = np.random.default_rng(seed)
    g = CompactGroupElement.random(rd, rng).ad_matrix()
    kill = killing_matrix(rd)
    assert np.allclose(g.T @ kill @ g, kill, atol=1e-9)
    x, y = rng.normal(size=rd.dim), rng.normal(size=rd.dim)
    lhs = g @ (_bracket_matrix(rd, x) @ y)
    rhs = _bracket_matrix(rd, g @ x) @ (g @ y)
    assert np.allclose(lhs, rhs, atol=1e-9)


@pytest.mark.parametrize("label", LABELS)
@given(seed=seeds)
def test_inverse(label, seed):
    rd = build_root_system(label)
    k = CompactGroupElement.random(rd, np.random.default_rng(seed))
    assert np.allclose((k * k.inverse()).ad_matrix(), np.eye(rd.dim), atol=1e-10)


def test_group_element_json_round_trip(a2):
    k = CompactGroupElement.random(a2, np.random.default_rng(1))
    assert CompactGroupElement.from_json(k.to_json()) == k


@pytest.mark.parametrize("label", LABELS)
def test_compact_basis_is_real_form(label):
    rd = build_root_system(label)
    # Killing form is negative definite on the compact real form
    cb = compact_basis(rd)
    gram = (cb.T @ killing_matrix(rd) @ cb)
    assert np.allclose(gram.imag, 0)
    assert np.all(np.linalg.eigvalsh(gram.real) < 0)
    # in compact coordinates ad(Y) is a real matrix
    inv = np.linalg.inv(cb)
    real = np.einsum("cd,jde,ef->jcf", inv, ad_compact(rd), cb)
    assert np.allclose(real.imag, 0, atol=1e-12)


@pytest.mark.parametrize("label,lam", [("A1", (1,)), ("A2", (1, 0)), ("A2", (1, 1)), ("B2", (0, 1))])
@given(seed=seeds)
def test_orbit_map(label, lam, seed):
    rd = build_root_system(label)
    lam = Weight(lam)
    rng = np.random.default_rng(seed)
    k1, k2 = CompactGroupElement.random(rd, rng), CompactGroupElement.random(rd, rng)
    # Psi(e) = i H^lam, and the Killing norm is -(lam, lam) on the whole orbit
    assert np.allclose(psi(rd, lam, CompactGroupElement.identity(rd)).chevalley, 1j * coroot_vector(rd, lam))
    assert psi(rd, lam, k1).killing_norm() == pytest.approx(-float(rd.form(lam, lam)))
    # equivariance: Psi(k1 k2) = Ad(k1) Psi(k2)
    lhs = psi(rd, lam, k1 * k2).chevalley
    assert np.allclose(lhs, k1.ad_matrix() @ psi(rd, lam, k2).chevalley, atol=1e-10)
    assert np.allclose(psi_many(rd, lam, (k1 * k2).coords()[None])[0], lhs, atol=1e-10)


@pytest.mark.parametrize("label,lam,n", [("A2", (1, 0), 4), ("A2", (1, 1), 2), ("B2", (1, 0), 4),
                                         ("A1", (2,), 1)])
def test_stabilizer_fixes_the_base_point(label, lam, n):
    # n = dim of the centralizer: rank plus 2 per stabilizer root
    rd = build_root_system(label)
    lam = Weight(lam)
    basis = stabilizer_basis(rd, lam)
    assert len(basis) == n
    x0 = 1j * coroot_vector(rd, lam)
    for y in basis:
        k = CompactGroupElement.exp(rd, 0.7 * y)
        assert np.allclose(k.ad_matrix() @ x0, x0, atol=1e-10)


@pytest.mark.parametrize("label", LABELS)
def test_w0_lift_reverses_the_base_point(label):
    rd = build_root_system(label)
    lam = rd.rho
    img = w0_lift(rd).ad_matrix() @ coroot_vector(rd, lam)
    assert np.allclose(img, coroot_vector(rd, rd.act(rd.w0, lam)), atol=1e-10)


@pytest.mark.parametrize("word", [(0,), (1,), (0, 1)])
def test_weyl_lift_acts_on_the_cartan(a2, word):
    lam = Weight((2, -1))
    img = weyl_lift(a2, word).ad_matrix() @ coroot_vector(a2, lam)
    assert np.allclose(img, coroot_vector(a2, a2.act(word, lam)), atol=1e-10)


@pytest.mark.parametrize("spin", [1, 2, 4])
def test_a1_quadrature_schur_orthogonality(spin):
    # [DERIVED] Schur: integral of |<pi(k) v, v>|^2 over the group is 1/dim
    rd = build_root_system("A1")
    rep = build_irrep(rd, Weight((spin,)))
    q = haar_samples(rd, spin, mode="quadrature")
    vs = coherent_vectors(rep, q.coords)
    vals = np.abs(vs[:, 0] * rep.gram[0, 0]) ** 2
    mean, se = q.integrate(vals)
    assert se == 0.0
    assert abs(mean - 1 / rep.dim) < 1e-12


def test_quadrature_only_for_a1(a2):
    with pytest.raises(ConfigurationError):
        haar_samples(a2, 3, mode="quadrature")


@pytest.mark.parametrize("label", ["A2", "A3"])
def test_type_a_monte_carlo_moments(label):
    # [DERIVED] for Haar U(q): E|U_11|^2 = 1/q, E|U_11|^4 = 2/(q(q+1))
    rd = build_root_system(label)
    qs = haar_samples(rd, 20000, seed=5)
    u11 = np.array([defining_matrix(k)[0, 0] for k in qs.elements()[:4000]])
    q = rd.rank + 1
    for vals, target in ((np.abs(u11) ** 2, 1 / q), (np.abs(u11) ** 4, 2 / (q * (q + 1)))):
        mean, se = vals.mean(), vals.std() / np.sqrt(len(vals))
        assert abs(mean - target) < 4 * se


def _characters(rep, qs):
    tr = np.zeros(len(qs), dtype=complex)
    for i in range(rep.dim):
        e = np.zeros(rep.dim)
        e[i] = 1
        tr += apply_group(rep, qs.coords, np.broadcast_to(e, (len(qs), rep.dim)))[:, i]
    return tr


@pytest.mark.parametrize("label,lam", [("B2", (1, 0)), ("B2", (0, 1)), ("G2", (1, 0))])
def test_importance_sampler_character_orthogonality(label, lam):
    # [DERIVED] for a nontrivial irrep: mean chi = 0 and mean |chi|^2 = 1
    rd = build_root_system(label)
    rep = build_irrep(rd, Weight(lam))
    qs = haar_samples(rd, 20000, seed=4)
    chi = _characters(rep, qs)
    m1, se1 = qs.integrate(chi)
    m2, se2 = qs.integrate(np.abs(chi) ** 2)
    assert abs(m1) < 4 * se1
    assert abs(m2 - 1) < 4 * se2


def test_importance_sampler_is_nearly_unweighted():
    rd = build_root_system("G2")
    w = haar_samples(rd, 5000, seed=0).weights
    assert 1 / np.sum(w ** 2) > 0.8 * len(w)


def test_samples_are_seeded(a2):
    a = haar_samples(a2, 50, seed=11)
    b = haar_samples(a2, 50, seed=11)
    c = haar_samples(a2, 50, seed=12)
    assert np.array_equal(a.coords, b.coords)
    assert not np.array_equal(a.coords, c.coords)


def test_quadrature_json_round_trip(a2):
    qs = haar_samples(a2, 7, seed=1)
    back = QuadratureSet.from_json(qs.to_json())
    assert np.array_equal(back.coords, qs.coords)
    assert np.array_equal(back.weights, qs.weights)
    assert back.mode == qs.mode and back.seed == qs.seed
