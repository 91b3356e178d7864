# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled polynomial root finder (Aberth-Ehrlich simultaneous iteration).

Much cheaper than a companion-matrix eigensolve for the degree ~2*nu_M
root-MUSIC polynomials: each sweep is O(n^2) with no matrix.
"""

import numpy as np
from libc.math cimport cos, sin, exp, log, M_PI, fabs, sqrt

cdef extern from "complex.h" nogil:
    double cabs(double complex)

DEF EPS = 2.220446049250313e-16


cdef inline void _newton_ratio(const double complex[:] a, const double[:] m, Py_ssize_t n,
                               double complex z,
                               double complex *ratio, double *resid, double *bound) nogil:
    """``p(z)/p'(z)``, ``|p(z)|`` and its rounding bound; ``a`` in descending order.

    Outside the unit disk the reversed polynomial in ``1/z`` is used so that
    Horner never overflows.
    """
    cdef Py_ssize_t k
    cdef double complex p, dp, y
    cdef double r, ab
    if cabs(z) <= 1.0:
        p = a[0]
        dp = 0
        ab = m[0]
        r = cabs(z)
        for k in range(1, n + 1):
            dp = dp * z + p
            p = p * z + a[k]
            ab = ab * r + m[k]
        resid[0] = cabs(p)
        bound[0] = ab
        if dp == 0:
            ratio[0] = 0
        else:
            ratio[0] = p / dp
    else:
        y = 1.0 / z
        r = cabs(y)
        p = a[n]
        dp = 0
        ab = m[n]
        for k in range(n - 1, -1, -1):
            dp = dp * y + p
            p = p * y + a[k]
            ab = ab * r + m[k]
        resid[0] = cabs(p)
        bound[0] = ab
        # p(z)/p'(z) = z q(y) / (n q(y) - y q'(y))
        dp = n * p - y * dp
        if dp == 0:
            ratio[0] = 0
        else:
            ratio[0] = z * p / dp


def aberth(coeffs, Py_ssize_t max_iter=300, double slack=64.0):
    """Roots of ``sum(coeffs[k] * z**(n-k))`` (descending, non-zero ends).

    Returns:
        (roots, converged): ``converged`` is False if any root failed to meet
        a backward error of ``slack`` ulps within ``max_iter`` sweeps.
    """
    cdef double complex[:] a = np.ascontiguousarray(coeffs, dtype=np.complex128)
    cdef Py_ssize_t n = a.shape[0] - 1
    if n < 1:
        return np.empty(0, dtype=np.complex128), True
    cdef double[:] m = np.abs(np.asarray(a))
    out = np.empty(n, dtype=np.complex128)
    cdef double complex[:] z = out
    cdef unsigned char[:] done = np.zeros(n, dtype=np.uint8)
    cdef Py_ssize_t i, j, it, left = n
    cdef double complex ratio, s, w
    cdef double resid, bound, sr, si, zr, zi, dr, di, den
    # start on the circle of the geometric-mean root modulus
    cdef double rad = exp((log(cabs(a[n])) - log(cabs(a[0]))) / n)
    cdef double th
    for i in range(n):
        th = 2.0 * M_PI * i / n + 0.4
        z[i] = rad * (cos(th) + 1j * sin(th))

    with nogil:
        for it in range(max_iter):
            if left == 0:
                break
            for i in range(n):
                if done[i]:
                    continue
                _newton_ratio(a, m, n, z[i], &ratio, &resid, &bound)
                if resid <= slack * EPS * bound:
                    done[i] = 1
                    left -= 1
                    continue
                sr = 0.0
                si = 0.0
                zr = z[i].real
                zi = z[i].imag
                for j in range(n):
                    if j != i:
                        dr = zr - z[j].real
                        di = zi - z[j].imag
                        den = 1.0 / (dr * dr + di * di)
                        sr = sr + dr * den
                        si = si - di * den
                s = sr + 1j * si
                w = ratio / (1.0 - ratio * s)
                z[i] = z[i] - w
                if cabs(w) <= EPS * cabs(z[i]):
                    done[i] = 1
                    left -= 1
    return out, left == 0
