"""Backend selection for the hot kernels (GA fitness, polynomial roots).

The compiled extensions are used when importable; set the environment
variable ``GOLOMB_RANGING_PURE_PYTHON=1`` to force the pure-Python fallback.
"""
import os

import numpy as np

from . import _fitness_py, _roots_py

BACKEND = "python"
_impl = _fitness_py
_aberth = None

if not os.environ.get("GOLOMB_RANGING_PURE_PYTHON"):
    try:
        from . import _fitness as _impl
        from ._roots import aberth as _aberth
    except ImportError:
        _impl, _aberth = _fitness_py, None
    else:
        BACKEND = "cython"

score_segments = _impl.score_segments
fitness_value = _impl.fitness_value
mutate_with = _impl.mutate_with
repair = _impl.repair


def poly_roots(coeffs) -> np.ndarray:
    """Roots of a polynomial with coefficients in descending order.

    Compiled backend: Aberth-Ehrlich iteration, falling back to the companion
    eigensolve if it stalls. Pure-Python backend: ``numpy.roots``.
    """
    if _aberth is None:
        return _roots_py.poly_roots(coeffs)
    c = np.asarray(coeffs, dtype=complex)
    nz = np.flatnonzero(c)
    if nz.size == 0:
        return np.empty(0, dtype=complex)
    # leading zeros drop the degree; trailing zeros are roots at the origin
    c = c[nz[0]:nz[-1] + 1]
    roots, ok = _aberth(c)
    if not ok:
        return np.roots(c)
    return np.concatenate([roots, np.zeros(len(coeffs) - 1 - nz[-1], dtype=complex)])


__all__ = ["BACKEND", "score_segments", "fitness_value", "mutate_with", "repair", "poly_roots"]
