"""Highest-weight modules, their contravariant form and group action."""
import numpy as np
import pytest
from hypothesis import given, strategies as st

from flagquant.errors import ResourceError, UsageError
from flagquant.group import CompactGroupElement
from flagquant.rep import (Operator, apply_group, build_irrep, coherent_vectors, duality_pairing,
                           group_action, represent, HighestWeightRep)
from flagquant.rootsys import Weight, build_root_system
from flagquant.uea import PBWElement

CASES = [("A1", (1,)), ("A1", (4,)), ("A2", (1, 0)), ("A2", (1, 1)), ("A2", (2, 1)),
         ("B2", (1, 0)), ("B2", (0, 1)), ("C2", (1, 1)), ("G2", (1, 0)), ("A3", (0, 1, 0))]


@pytest.mark.parametrize("label,lam", CASES)
def test_dimension_and_highest_weight(label, lam):
    rd = build_root_system(label)
    rep = build_irrep(rd, Weight(lam))
    assert rep.dim == rd.weyl_dimension(Weight(lam))
    assert rep.weights[0] == Weight(lam)


@pytest.mark.parametrize("label,lam", CASES)
def test_generators_satisfy_brackets(label, lam):
    rd = build_root_system(label)
    rep = build_irrep(rd, Weight(lam))
    g = rep.gen
    for a in range(rd.dim):
        for b in range(a + 1, rd.dim):
            lhs = g[a] @ g[b] - g[b] @ g[a]
            rhs = sum((c * g[k] for k, c in rd.bracket(a, b)), np.zeros_like(g[0]))
            assert np.allclose(lhs, rhs, atol=1e-12)


@pytest.mark.parametrize("label,lam", CASES)
def test_contravariant_form(label, lam):
    rd = build_root_system(label)
    rep = build_irrep(rd, Weight(lam))
    assert np.all(np.linalg.eigvalsh(rep.gram) > 0)
    # pi(E_a)^dagger = pi(F_a) for the contravariant form
    for k in range(rd.n_pos):
        e = Operator(rep.gen[rd.e_index[k]], rep)
        assert np.allclose(e.adjoint().matrix, rep.gen[rd.f_index[k]], atol=1e-12)


def test_sl2_weights():
    # [TRIVIAL] spin-n/2 weights n, n-2, ..., -n
    rd = build_root_system("A1")
    rep = build_irrep(rd, Weight((5,)))
    assert sorted(int(w.coords[0]) for w in rep.weights) == list(range(-5, 6, 2))


def test_adjoint_weights_of_a2():
    # [TRIVIAL] the adjoint module has the roots plus a doubled zero weight
    rd = build_root_system("A2")
    rep = build_irrep(rd, Weight((1, 1)))
    roots = [rd.root_as_weight(r).coords for r in rd.positive_roots]
    expected = sorted(roots + [tuple(-c for c in r) for r in roots] + [(0, 0), (0, 0)])
    assert rep.weight_multiset() == expected


@pytest.mark.parametrize("label,lam", [("A1", (3,)), ("A2", (1, 1)), ("B2", (1, 1))])
@given(seed=st.integers(0, 2**31 - 1))
def test_group_action_is_unitary(label, lam, seed):
    rd = build_root_system(label)
    rep = build_irrep(rd, Weight(lam))
    k = CompactGroupElement.random(rd, np.random.default_rng(seed))
    u = group_action(k, rep).matrix
    assert np.allclose(u.conj().T @ rep.gram @ u, rep.gram, atol=1e-10)


@pytest.mark.parametrize("label,lam", [("A1", (3,)), ("A1", (30,)), ("A2", (1, 1)), ("A2", (6, 0)),
                                       ("B2", (2, 1))])
def test_batched_action_matches_dense(label, lam):
    # large modules take the eigendecomposition route; small ones the batched expm
    rd = build_root_system(label)
    rep = build_irrep(rd, Weight(lam))
    rng = np.random.default_rng(3)
    ks = [CompactGroupElement.random(rd, rng, n_factors=2) for _ in range(5)]
    coords = np.array([k.coords() for k in ks])
    # random vectors of unit invariant norm; compare in that norm (the Gram
    # matrix of a large module spans dozens of orders of magnitude)
    scale = 1 / np.sqrt(np.diag(rep.gram))
    vecs = (rng.normal(size=(5, rep.dim)) + 1j * rng.normal(size=(5, rep.dim))) * scale
    got = apply_group(rep, coords, vecs)
    for k, v, g in zip(ks, vecs, got):
        d = group_action(k, rep).matrix @ v - g
        err = np.sqrt(abs(rep.inner(d, d)) / abs(rep.inner(v, v)))
        assert err < 1e-9


def test_coherent_vectors_have_unit_norm():
    rd = build_root_system("A2")
    rep = build_irrep(rd, Weight((2, 1)))
    coords = np.random.default_rng(0).uniform(-3, 3, size=(20, 1, rd.dim))
    vs = coherent_vectors(rep, coords)
    norms = np.einsum("np,pq,nq->n", vs.conj(), rep.gram, vs).real
    assert np.allclose(norms, 1.0)


def test_represent_letters():
    rd = build_root_system("A2")
    rep = build_irrep(rd, Weight((1, 0)))
    for a in range(rd.dim):
        assert np.allclose(represent(PBWElement.letter(rd, a), rep).matrix, rep.gen[a])


def test_duality_pairing_is_invariant():
    rd = build_root_system("A2")
    lam = Weight((2, 1))
    rep, dual = build_irrep(rd, lam), build_irrep(rd, rd.dual_weight(lam))
    p = duality_pairing(rep, dual)
    assert np.abs(p).max() > 0
    for a in range(rd.dim):
        assert np.allclose(rep.gen[a].T @ p + p @ dual.gen[a], 0, atol=1e-10)


def test_dimension_cap():
    rd = build_root_system("A2")
    with pytest.raises(ResourceError):
        HighestWeightRep(rd, Weight((9, 9)), max_dim=50)


@pytest.mark.parametrize("lam", [(1, -1), (1,), (0.5, 0)])
def test_rejects_non_dominant(lam):
    rd = build_root_system("A2")
    with pytest.raises(UsageError):
        HighestWeightRep(rd, Weight(lam))
