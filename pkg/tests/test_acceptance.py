"""Acceptance criteria: one PASS/FAIL line per criterion.

Run with pytest (the lines appear in the terminal summary) or directly:

    python3 tests/test_acceptance.py
"""
import time

import pytest

from flagquant.rootsys import build_root_system
from flagquant.suites import run_suite

RESULTS: dict = {}
_CACHE: dict = {}


def _fmt(x):
    return f"{x:.3g}" if isinstance(x, float) else str(x)


def _collect(results, budget=None, started=None):
    """(passed, detail) from a list of SuiteResults plus an optional time budget."""
    failing = [f"{r.suite}[{r.type} {r.lam}]: {f}" for r in results for f in r.failures()]
    ok = not failing
    detail = []
    if budget is not None:
        elapsed = time.perf_counter() - started
        ok = ok and elapsed < budget
        detail.append(f"runtime {elapsed:.1f}s < {budget:.0f}s")
    detail += failing[:4]
    return ok, "; ".join(detail)


def _worst(results, needle):
    vals = [c.value for r in results for c in r.checks if needle in c.name and isinstance(c.value, float)]
    return max(vals) if vals else float("nan")


def criterion_1():
    t0 = time.perf_counter()
    res = [run_suite("prop2", build_root_system("A1"), lams=["1", "2", "3"], n_pairs=50, tol=1e-7),
           run_suite("prop2", build_root_system("A2"), lams=["1,0", "1,1"], n_pairs=50, tol=1e-7)]
    ok, detail = _collect(res, 60, t0)
    return ok, f"worst error {_fmt(_worst(res, 's_lambda'))} < 1e-7; {detail}"


def criterion_2():
    t0 = time.perf_counter()
    a1, a2 = build_root_system("A1"), build_root_system("A2")
    res = [run_suite("parseval", a1, lam="1", tol=1e-7), run_suite("lemma4", a1, lam="1", tol=1e-7),
           run_suite("parseval", a2, lam="1,0", n_samples=200000, n_sigma=3),
           run_suite("lemma4", a2, lam="1,0", n_samples=200000)]
    ok, detail = _collect(res, 120, t0)
    sig = _worst(res[2:], "standard errors")
    return ok, f"A1 worst {_fmt(_worst(res[:2], ''))} < 1e-7, A2 worst {_fmt(sig)} sigma < 3; {detail}"


def criterion_3():
    a1, a2 = build_root_system("A1"), build_root_system("A2")
    res = [run_suite("theorem2", a1, lam="1", tol=1e-7), run_suite("theorem2", a2, lam="1,0", tol=1e-7),
           run_suite("theorem2", a2, lam="1,1", tol=1e-7),
           run_suite("theorem2", a2, lam="1,-1", witness_threshold=0.1)]
    ok, detail = _collect(res)
    wit = _worst(res[3:], "normalized")
    return ok, (f"invariance {_fmt(_worst(res[:3], 'invariance'))} < 1e-7, "
                f"witness derivative {_fmt(wit)} > 0.1; {detail}")


def criterion_4():
    a1, a2 = build_root_system("A1"), build_root_system("A2")
    res = [run_suite("prop3", a1, lam="1"), run_suite("prop3", a2, lam="1,0"), run_suite("prop3", a2, lam="1,1")]
    slopes = [c.value for r in res for c in r.checks if c.name.startswith("error slope")]
    inside = sum(-1.2 <= s <= -0.8 for s in slopes)
    ok, detail = _collect(res)
    return ok, f"{inside}/{len(slopes)} slopes in [-1.2, -0.8], Cartan errors exactly zero; {detail}"


def _converge():
    if "converge" not in _CACHE:
        t0 = time.perf_counter()
        out = [run_suite("converge", build_root_system("A1"), lam="1", n_max=40),
               run_suite("converge", build_root_system("A2"), lam="1,0", n_max=15)]
        _CACHE["converge"] = (out, t0, time.perf_counter())
    return _CACHE["converge"]


def criterion_5():
    out, t0, t1 = _converge()
    res = [r for r, _ in out]
    failing = [f for r in res for f in r.failures() if "nesting" not in f]
    elapsed = t1 - t0
    ok = not failing and elapsed < 600
    slopes = ", ".join(f"{rep.type} e1 {rep.slope_e1:.3f} e2 {rep.slope_e2:.3f}" for _, rep in out)
    lin = max(rep.summary()["max_linear_identity"] for _, rep in out)
    return ok, f"{slopes} <= -0.8; linear identity {lin:.2g} < 1e-8; runtime {elapsed:.0f}s < 600s; {failing[:3]}"


def criterion_6():
    res = [run_suite("rationality", build_root_system("A1"), lam="1", ns=range(4, 25), tol=1e-6),
           run_suite("rationality", build_root_system("A2"), lam="1,0", ns=range(4, 25), tol=1e-6)]
    ok, detail = _collect(res)
    return ok, f"worst residual {_fmt(_worst(res, 'residual'))} < 1e-6 with deg p <= deg q; {detail}"


def criterion_7():
    out, _, _ = _converge()
    parts = [f"{rep.type}: failures {rep.failures} threshold {rep.nesting_threshold}" for _, rep in out]
    ok = all(rep.weak_nesting for _, rep in out)
    return ok, "; ".join(parts)


def criterion_8():
    res = [run_suite("algebra", build_root_system(t), max_degree=5) for t in ("A1", "A2", "B2", "G2")]
    ok, detail = _collect(res)
    return ok, f"{sum(len(r.checks) for r in res)} exact checks over A1, A2, B2, G2; {detail}"


def criterion_9():
    res = [run_suite("lemma6", build_root_system("A1"), lam="1", tol=1e-6),
           run_suite("lemma6", build_root_system("A2"), lam="1,0", tol=1e-6, n_recon=200000)]
    ok, detail = _collect(res)
    return ok, (f"twist {_fmt(_worst(res, 'Coxeter'))} < 1e-6, A1 reconstruct "
                f"{_fmt(_worst(res[:1], 'reconstruct'))} < 1e-6; {detail}")


CRITERIA = [
    ("1 covariant symbol equals s_lambda", criterion_1),
    ("2 Parseval, orthogonality, trace pairing", criterion_2),
    ("3 right invariance and irregular witness", criterion_3),
    ("4 large-weight limit of s_lambda", criterion_4),
    ("5 star product correspondence", criterion_5),
    ("6 rational dependence on 1/n", criterion_6),
    ("7 weak nesting", criterion_7),
    ("8 exact algebra identities", criterion_8),
    ("9 Coxeter twist and w0 reconstruction", criterion_9),
]


def evaluate(name, fn):
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:      # a crash is a failure of the criterion, not of the harness
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    line = f"{'PASS' if ok else 'FAIL'}  criterion {name}  ({time.perf_counter() - t0:.1f}s)  {detail}"
    RESULTS[name] = (ok, line)
    return ok, line


@pytest.mark.acceptance
@pytest.mark.parametrize("name,fn", CRITERIA, ids=[c[0].split()[0] for c in CRITERIA])
def test_criterion(name, fn):
    ok, line = evaluate(name, fn)
    print(line)
    assert ok, line


if __name__ == "__main__":
    bad = 0
    for name, fn in CRITERIA:
        ok, line = evaluate(name, fn)
        print(line, flush=True)
        bad += not ok
    raise SystemExit(1 if bad else 0)
