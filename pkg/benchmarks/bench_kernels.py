"""Compare the numba and numpy backends of the two hot kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--seed 0]

Inputs are shaped like a degree-3 symbol evaluation on A2 (phi_contract)
and a level-n expectation sweep (expectation_values).  Each kernel is run
once to warm the JIT, then timed; the max deviation between backends is
reported so a speedup never hides a wrong answer.
"""
import argparse
import time

import numpy as np

from flagquant import _kernels


def _phi_inputs(rng, n=20000, dim=8, d=3, nnz=60, words=40):
    m = rng.standard_normal((n, dim, dim)) + 1j * rng.standard_normal((n, dim, dim))
    idx = rng.integers(0, dim, size=(nnz, d))
    tv = rng.standard_normal(nnz) + 1j * rng.standard_normal(nnz)
    w = rng.integers(0, dim, size=(words, d))
    return m, idx, tv, w


def _exp_inputs(rng, n=4000, q=36, nb=8):
    vecs = rng.standard_normal((n, q)) + 1j * rng.standard_normal((n, q))
    g = rng.standard_normal((q, q))
    gram = g @ g.T + q * np.eye(q)
    mats = rng.standard_normal((nb, q, q)) + 1j * rng.standard_normal((nb, q, q))
    return vecs, gram, mats


def _time(fn, args, repeat):
    fn(*args)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if not _kernels.HAVE_NUMBA:
        print("numba not importable; only the numpy backend is available")
        return 1
    rng = np.random.default_rng(args.seed)
    cases = [("phi_contract", _kernels.phi_contract, _phi_inputs(rng)),
             ("expectation_values", _kernels.expectation_values, _exp_inputs(rng))]
    print(f"{'kernel':<20}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>10}{'max |diff|':>14}")
    previous = _kernels.backend()
    try:
        for name, fn, inputs in cases:
            _kernels.set_backend("numpy")
            t_np, ref = _time(fn, inputs, args.repeat)
            _kernels.set_backend("numba")
            t_nb, out = _time(fn, inputs, args.repeat)
            diff = float(np.max(np.abs(out - ref)) / max(1.0, np.max(np.abs(ref))))
            print(f"{name:<20}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>10.2f}{diff:>14.2e}")
    finally:
        _kernels.set_backend(previous)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
