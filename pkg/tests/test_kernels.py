"""numba and numpy backends of the hot kernels agree."""
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from flagquant import _kernels

needs_numba = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not importable")


def _both(fn, *args):
    prev = _kernels.backend()
    try:
        _kernels.set_backend("numpy")
        a = fn(*args)
        _kernels.set_backend("numba")
        b = fn(*args)
    finally:
        _kernels.set_backend(prev)
    return a, b


def _cplx(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


@needs_numba
@given(seed=st.integers(0, 2**31 - 1), n=st.integers(1, 30), dim=st.integers(1, 6), d=st.integers(1, 4),
       nnz=st.integers(1, 12), w=st.integers(1, 8))
def test_phi_contract_backends_agree(seed, n, dim, d, nnz, w):
    rng = np.random.default_rng(seed)
    args = (_cplx(rng, n, dim, dim), rng.integers(0, dim, (nnz, d)), _cplx(rng, nnz), rng.integers(0, dim, (w, d)))
    a, b = _both(_kernels.phi_contract, *args)
    assert np.allclose(a, b, atol=1e-12 * max(1, np.abs(a).max()))


@needs_numba
@given(seed=st.integers(0, 2**31 - 1), n=st.integers(1, 30), q=st.integers(1, 9), nb=st.integers(1, 5))
def test_expectation_backends_agree(seed, n, q, nb):
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(q, q))
    args = (_cplx(rng, n, q), g @ g.T + q * np.eye(q), _cplx(rng, nb, q, q))
    a, b = _both(_kernels.expectation_values, *args)
    assert np.allclose(a, b, atol=1e-12 * max(1, np.abs(a).max()))


def test_phi_contract_definition():
    rng = np.random.default_rng(0)
    m = _cplx(rng, 3, 4, 4)
    idx = np.array([[0, 1], [2, 3]])
    tv = np.array([1.0, 2.0j])
    words = np.array([[1, 2]])
    out = _kernels.phi_contract(m, idx, tv, words)
    expected = m[:, 0, 1] * m[:, 1, 2] + 2j * m[:, 2, 1] * m[:, 3, 2]
    assert np.allclose(out[:, 0], expected)


def test_empty_inputs():
    out = _kernels.phi_contract(np.zeros((2, 3, 3)), np.zeros((0, 1), int), np.zeros(0), np.zeros((4, 1), int))
    assert out.shape == (2, 4) and not out.any()


def test_unknown_backend():
    with pytest.raises(Exception):
        _kernels.set_backend("fortran")


def test_env_switch_selects_numpy():
    code = "from flagquant import _kernels; print(_kernels.backend())"
    env = dict(os.environ, FLAGQUANT_NUMBA="0")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
