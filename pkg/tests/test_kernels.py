"""The compiled GA kernel and its pure-Python fallback must agree exactly."""
import numpy as np
import pytest

from golomb_ranging import _fitness_py, kernels
from golomb_ranging.rulers import MarkConstraint, Ruler, forbidden_count, measure_set

try:
    from golomb_ranging import _fitness as _fitness_c
except ImportError:  # extension not built
    _fitness_c = None

needs_ext = pytest.mark.skipif(_fitness_c is None, reason="compiled kernel not built")


def random_case(rng):
    k = int(rng.integers(2, 12))
    segs = tuple(int(v) for v in rng.integers(1, 15, size=k - 1))
    span = int(rng.integers(5, 120))
    holes = rng.integers(0, span + 1, size=int(rng.integers(0, span // 2 + 1)))
    c = MarkConstraint.span(span).without(int(h) for h in holes)
    return segs, c


def test_backend_reported():
    assert kernels.BACKEND in ("cython", "python")


def test_python_score_matches_ruler_oracles():
    rng = np.random.default_rng(1)
    for _ in range(300):
        segs, c = random_case(rng)
        n, r, f, t, over = _fitness_py.score_segments(segs, c.mask, c.lo, c.hi)
        ruler = Ruler.from_segments(segs)
        assert n == ruler.length
        assert r == measure_set(ruler).repetitions
        fc = forbidden_count(ruler, c)
        assert (f, t, over) == (fc.count, fc.shift, fc.oversized)


@needs_ext
def test_score_backends_agree():
    rng = np.random.default_rng(2)
    for _ in range(1000):
        segs, c = random_case(rng)
        assert (_fitness_c.score_segments(segs, c.mask, c.lo, c.hi)
                == _fitness_py.score_segments(segs, c.mask, c.lo, c.hi))


@needs_ext
def test_mutate_backends_agree():
    rng = np.random.default_rng(3)
    for _ in range(2000):
        segs, _ = random_case(rng)
        s_max = max(len(segs), int(rng.integers(2, 20)))
        u = rng.random(3)
        assert (tuple(_fitness_c.mutate_with(segs, s_max, *u))
                == _fitness_py.mutate_with(segs, s_max, *u))


@needs_ext
def test_repair_backends_agree():
    rng = np.random.default_rng(4)
    for _ in range(300):
        segs, c = random_case(rng)
        s_max = max(len(segs), 12)
        u = rng.random(3 * 64)
        target = int(rng.integers(0, 2)) * int(rng.integers(5, 60))
        a = _fitness_c.repair(segs, s_max, u, c.mask, c.lo, c.hi, target)
        b = _fitness_py.repair(segs, s_max, u, c.mask, c.lo, c.hi, target)
        assert (tuple(a[0]), tuple(a[1]), a[2]) == (tuple(b[0]), tuple(b[1]), b[2])


def test_fitness_value_target():
    assert _fitness_py.fitness_value(6, 0, 0, 0) == 6
    assert _fitness_py.fitness_value(2, 1, 0, 0) == 4
    # target length: shorter and longer rulers both pay
    assert _fitness_py.fitness_value(80, 0, 0, 87) == 94
    assert _fitness_py.fitness_value(90, 0, 0, 87) == 90
    assert _fitness_py.fitness_value(87, 0, 0, 87) == 87


def test_mutate_semantics():
    # u0 >= 0.5 swaps positions int(u1*n) and the u2-th of the others
    assert _fitness_py.mutate_with((1, 3, 2), 5, 0.9, 0.5, 0.9) == (1, 2, 3)
    # all-unit sequence cannot transmute: falls back to a swap
    assert _fitness_py.mutate_with((1, 1), 5, 0.1, 0.2, 0.3) == (1, 1)
    out = _fitness_py.mutate_with((1, 3, 2), 5, 0.1, 0.0, 0.0)
    assert out[0] == 1 and out != (1, 3, 2)
    for u1 in np.linspace(0, 0.999, 7):
        for u2 in np.linspace(0, 0.999, 7):
            out = _fitness_py.mutate_with((1, 3, 2), 5, 0.1, u1, u2)
            changed = [i for i in range(3) if out[i] != (1, 3, 2)[i]]
            assert len(changed) == 1 and changed[0] != 0
            assert 2 <= out[changed[0]] <= 5


def _match(a, b):
    return max(float(np.min(np.abs(b - x))) for x in a)


def test_poly_roots_matches_numpy():
    rng = np.random.default_rng(5)
    for n in (1, 2, 7, 40, 150):
        c = rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1)
        r = kernels.poly_roots(c)
        assert r.size == n
        assert _match(r, np.roots(c)) < 1e-8


def test_poly_roots_strips_zero_ends():
    # z^2 (z - 2)(z + 1j), with a zero leading coefficient
    c = np.concatenate([[0.0], np.poly([2.0, -1j]), [0.0, 0.0]])
    r = kernels.poly_roots(c)
    assert r.size == 4
    assert _match(r, np.array([2.0, -1j, 0.0, 0.0])) < 1e-12
    assert np.sum(r == 0) == 2


@needs_ext
def test_aberth_self_reciprocal():
    # roots in (z, 1/conj(z)) pairs, as in root-MUSIC
    from golomb_ranging._roots import aberth
    rng = np.random.default_rng(6)
    inner = 0.9 * np.exp(2j * np.pi * rng.random(30))
    roots = np.concatenate([inner, 1 / inner.conj()])
    c = np.poly(roots)
    r, ok = aberth(c)
    assert ok
    assert _match(r, roots) < 1e-8
