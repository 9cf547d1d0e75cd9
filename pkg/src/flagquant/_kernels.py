"""Hot loops with a numba implementation and a pure-numpy fallback.

``FLAGQUANT_NUMBA=0`` selects the numpy path (also used when numba is not
importable).  ``FLAGQUANT_THREADS`` caps numba's thread pool.

Kernels:

* :func:`phi_contract` evaluates phi_lam(Ad(k^-1) X_{w1} ... X_{wd}) for a batch
  of adjoint matrices and a batch of words, given the sparse tensor
  T[a1..ad] = phi_lam(X_{a1} ... X_{ad}).
* :func:`expectation_values` evaluates <B_i w_n, w_n> = w_n^H G B_i w_n.
"""
from __future__ import annotations

import os

import numpy as np

_FLAG = os.environ.get("FLAGQUANT_NUMBA", "1").strip().lower()
_WANT_NUMBA = _FLAG not in ("0", "false", "no", "off")

try:  # pragma: no cover - depends on the environment
    if not _WANT_NUMBA:
        raise ImportError
    # the bundled TBB is too old for numba; the workqueue layer needs nothing extra
    os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")
    import numba
    from numba import njit, prange

    _threads = os.environ.get("FLAGQUANT_THREADS")
    if _threads:
        numba.set_num_threads(max(1, min(int(_threads), numba.config.NUMBA_NUM_THREADS)))
    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

_backend = "numba" if HAVE_NUMBA else "numpy"


def backend() -> str:
    return _backend


def set_backend(name: str) -> str:
    """Switch between ``"numba"`` and ``"numpy"``; returns the previous backend."""
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise ValueError("numba is not available (or disabled by FLAGQUANT_NUMBA=0)")
    prev, _backend = _backend, name
    return prev


# ---------------------------------------------------------------------------
# numpy versions

_CHUNK = 1 << 21


def _phi_contract_np(m, idx, tv, words):
    n = m.shape[0]
    w, d = words.shape
    nnz = idx.shape[0]
    out = np.empty((n, w), dtype=complex)
    step = max(1, _CHUNK // max(1, w * nnz))
    for s in range(0, n, step):
        blk = m[s:s + step]
        prod = np.ones((blk.shape[0], w, nnz), dtype=complex)
        for j in range(d):
            prod *= blk[:, idx[:, j][None, :], words[:, j][:, None]]
        out[s:s + step] = prod @ tv
    return out


def _expectation_np(vecs, gram, mats):
    left = vecs.conj() @ gram            # (N, q)
    # sum_pq left[n,p] B[i,p,q] vecs[n,q]
    tmp = np.einsum("np,ipq->niq", left, mats, optimize=True)
    return np.einsum("niq,nq->ni", tmp, vecs, optimize=True)


# ---------------------------------------------------------------------------
# numba versions

if HAVE_NUMBA:  # pragma: no branch

    @njit(parallel=True, cache=True)
    def _phi_contract_nb(m, idx, tv, words):
        n = m.shape[0]
        w, d = words.shape
        nnz = idx.shape[0]
        out = np.empty((n, w), dtype=np.complex128)
        for s in prange(n):
            for a in range(w):
                acc = 0j
                for t in range(nnz):
                    p = tv[t]
                    for j in range(d):
                        p *= m[s, idx[t, j], words[a, j]]
                    acc += p
                out[s, a] = acc
        return out

    @njit(parallel=True, cache=True)
    def _expectation_nb(vecs, gram, mats):
        # one BLAS matmul per operator, then a fused row-wise reduction
        n, q = vecs.shape
        nb = mats.shape[0]
        left = np.conj(vecs) @ gram
        vt = np.ascontiguousarray(vecs.T)
        out = np.empty((n, nb), dtype=np.complex128)
        for i in range(nb):
            mv = mats[i] @ vt              # (q, n)
            for s in prange(n):
                acc = 0j
                for p in range(q):
                    acc += left[s, p] * mv[p, s]
                out[s, i] = acc
        return out


def phi_contract(m: np.ndarray, idx: np.ndarray, tv: np.ndarray, words: np.ndarray) -> np.ndarray:
    """out[n, w] = sum_t tv[t] prod_j m[n, idx[t, j], words[w, j]]."""
    m = np.ascontiguousarray(m, dtype=np.complex128)
    idx = np.ascontiguousarray(idx, dtype=np.int64)
    tv = np.ascontiguousarray(tv, dtype=np.complex128)
    words = np.ascontiguousarray(words, dtype=np.int64)
    if idx.shape[0] == 0 or words.shape[0] == 0:
        return np.zeros((m.shape[0], words.shape[0]), dtype=complex)
    if _backend == "numba":
        return _phi_contract_nb(m, idx, tv, words)
    return _phi_contract_np(m, idx, tv, words)


def expectation_values(vecs: np.ndarray, gram: np.ndarray, mats: np.ndarray) -> np.ndarray:
    """out[n, i] = vecs[n]^H gram mats[i] vecs[n]."""
    vecs = np.ascontiguousarray(vecs, dtype=np.complex128)
    gram = np.ascontiguousarray(gram, dtype=np.complex128)
    mats = np.ascontiguousarray(mats, dtype=np.complex128)
    if _backend == "numba":
        return _expectation_nb(vecs, gram, mats)
    return _expectation_np(vecs, gram, mats)


def set_threads(n: int) -> None:
    """Cap numba's worker pool (no-op on the numpy backend)."""
    if HAVE_NUMBA:
        numba.set_num_threads(max(1, min(int(n), numba.config.NUMBA_NUM_THREADS)))
