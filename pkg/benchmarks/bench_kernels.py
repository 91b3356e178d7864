"""Compare the compiled and pure-Python kernels.

Run from the repository root after ``pip install -e . --no-build-isolation``::

    python3 benchmarks/bench_kernels.py [--repeat 5]

Times the GA scoring and repair kernels on random segment sequences, the
polynomial root finder on root-MUSIC polynomials, and one full GA synthesis
per backend. Seeded runs must give identical rulers on both backends.
"""
import argparse
import math
import timeit

import numpy as np

from golomb_ranging import _fitness_py, _roots_py
from golomb_ranging.estimators import build_subspace, music_polynomial, snapshot
from golomb_ranging.ranging import PDoA, expand_to_measures, sample_marks
from golomb_ranging.rulers import MarkConstraint, Ruler
from golomb_ranging.tables import FRA_MARKS

try:
    from golomb_ranging import _fitness as _fitness_c
    from golomb_ranging._roots import aberth
except ImportError:
    raise SystemExit("compiled kernels not built; reinstall with Cython available")


def _best(stmt, repeat, number):
    return min(timeit.repeat(stmt, repeat=repeat, number=number)) / number


def bench_score(repeat):
    rng = np.random.default_rng(0)
    c = MarkConstraint.span(3 * 55)
    cases = [tuple(int(v) for v in rng.integers(1, 25, size=9)) for _ in range(200)]
    out = {}
    for name, mod in (("python", _fitness_py), ("cython", _fitness_c)):
        out[name] = _best(lambda: [mod.score_segments(s, c.mask, c.lo, c.hi) for s in cases],
                          repeat, 5) / len(cases)
    return out


def bench_repair(repeat):
    rng = np.random.default_rng(1)
    c = MarkConstraint.span(3 * 55)
    cases = [tuple(int(v) for v in rng.integers(1, 12, size=9)) for _ in range(50)]
    u = rng.random(3 * 2000)
    out = {}
    for name, mod in (("python", _fitness_py), ("cython", _fitness_c)):
        out[name] = _best(lambda: [mod.repair(s, 12, u, c.mask, c.lo, c.hi, 0) for s in cases],
                          repeat, 1) / len(cases)
    return out


def bench_roots(repeat):
    ruler = Ruler.from_marks(FRA_MARKS[0])
    rng = np.random.default_rng(2)
    polys = []
    for _ in range(20):
        s = expand_to_measures(sample_marks(20.0, ruler, PDoA(25e3, 50.0), rng), ruler)
        p = music_polynomial(build_subspace(snapshot(s.values)), s.indices)
        polys.append(p.coefficients[::-1])
    worst = 0.0
    for c in polys:
        a, ok = aberth(c)
        b = np.roots(c)
        assert ok
        worst = max(worst, max(float(np.min(np.abs(b - z))) for z in a))
    out = {
        "python": _best(lambda: [_roots_py.poly_roots(c) for c in polys], repeat, 1) / len(polys),
        "cython": _best(lambda: [aberth(c) for c in polys], repeat, 1) / len(polys),
    }
    return out, len(polys[0]) - 1, worst


def bench_synthesis(repeat):
    import importlib
    import os

    from golomb_ranging import ga, kernels

    results = {}
    for name in ("cython", "python"):
        if name == "python":
            os.environ["GOLOMB_RANGING_PURE_PYTHON"] = "1"
        else:
            os.environ.pop("GOLOMB_RANGING_PURE_PYTHON", None)
        importlib.reload(kernels)
        importlib.reload(ga)
        c = MarkConstraint.span(3 * 34)
        runs = []
        t = _best(lambda: runs.append(ga.synthesize_ruler(8, c, ga.GaConfig(),
                                                          np.random.default_rng(3))),
                  repeat, 1)
        results[name] = (t, runs[-1].ruler.marks)
    os.environ.pop("GOLOMB_RANGING_PURE_PYTHON", None)
    importlib.reload(kernels)
    importlib.reload(ga)
    return results


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    def line(label, t):
        print(f"{label:<34} python {1e6 * t['python']:10.1f} us   cython "
              f"{1e6 * t['cython']:10.1f} us   speedup {t['python'] / t['cython']:6.1f}x")

    line("score_segments (K=10)", bench_score(args.repeat))
    line("repair (K=10, <= 2000 tries)", bench_repair(args.repeat))
    roots, degree, worst = bench_roots(args.repeat)
    line(f"polynomial roots (degree {degree})", roots)
    print(f"{'':<34} max root mismatch vs numpy {worst:.1e}")
    syn = bench_synthesis(max(1, args.repeat // 5))
    line("synthesize_ruler (K=8)", {k: v[0] for k, v in syn.items()})
    same = syn["python"][1] == syn["cython"][1]
    print(f"{'':<34} identical rulers across backends: {same} {syn['cython'][1]}")
    if not same or not math.isfinite(worst):
        raise SystemExit(1)


if __name__ == "__main__":
    main()
