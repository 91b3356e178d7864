# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled GA kernel; same contract as ``_fitness_py``."""

from libc.stdlib cimport malloc, calloc, free


cdef struct Score:
    long length
    long repeats
    long forbidden
    long shift
    int oversized


cdef int _score(long *seg, Py_ssize_t nseg, const unsigned char[:] admissible,
                long lo, long hi, long *marks, Score *out) except -1:
    cdef Py_ssize_t k = nseg + 1
    cdef Py_ssize_t i, j
    cdef long total = 0
    marks[0] = 0
    for i in range(nseg):
        total += seg[i]
        marks[i + 1] = total
    out.length = total

    cdef unsigned char *seen = <unsigned char *> calloc(total + 1, 1)
    if seen == NULL:
        raise MemoryError()
    cdef long repeats = 0
    cdef long d
    for i in range(1, k):
        for j in range(i):
            d = marks[i] - marks[j]
            if seen[d]:
                repeats += 1
            else:
                seen[d] = 1
    free(seen)
    out.repeats = repeats

    cdef long bad, v, t
    cdef long best = k + 1
    cdef long best_shift = lo
    if total > hi - lo:
        bad = 0
        for i in range(k):
            v = marks[i] + lo
            if v > hi or not admissible[v]:
                bad += 1
        out.forbidden = bad
        out.shift = lo
        out.oversized = 1
        return 0
    for t in range(lo, hi - total + 1):
        bad = 0
        for i in range(k):
            if not admissible[marks[i] + t]:
                bad += 1
                if bad >= best:
                    break
        if bad < best:
            best = bad
            best_shift = t
            if bad == 0:
                break
    out.forbidden = best
    out.shift = best_shift
    out.oversized = 0
    return 0


cdef inline long _fitness(Score *s, long target):
    cdef long scale
    if target <= 0:
        scale = s.length
    else:
        scale = target + (s.length - target if s.length >= target else target - s.length)
    return scale * (s.repeats + s.forbidden + 1)


cdef void _mutate(long *src, long *dst, Py_ssize_t n, long s_max,
                  double u0, double u1, double u2, long *scratch):
    cdef Py_ssize_t i, j, nmov = 0
    cdef long cur, v, nchoice, tmp
    for i in range(n):
        dst[i] = src[i]
    if u0 < 0.5:
        for i in range(n):
            if dst[i] != 1:
                scratch[nmov] = i
                nmov += 1
        if nmov > 0:
            i = scratch[<Py_ssize_t> (u1 * nmov)]
            cur = dst[i]
            nchoice = s_max - 1 - (1 if (2 <= cur and cur <= s_max) else 0)
            if nchoice > 0:
                v = 2 + <long> (u2 * nchoice)
                if 2 <= cur and cur <= v:
                    v += 1
                dst[i] = v
                return
    if n >= 2:
        i = <Py_ssize_t> (u1 * n)
        j = <Py_ssize_t> (u2 * (n - 1))
        if j >= i:
            j += 1
        tmp = dst[i]
        dst[i] = dst[j]
        dst[j] = tmp


def score_segments(segments, const unsigned char[:] admissible, long lo, long hi):
    cdef Py_ssize_t nseg = len(segments)
    cdef long *seg = <long *> malloc((2 * nseg + 1) * sizeof(long))
    if seg == NULL:
        raise MemoryError()
    cdef Py_ssize_t i
    for i in range(nseg):
        seg[i] = segments[i]
    cdef Score s
    try:
        _score(seg, nseg, admissible, lo, hi, seg + nseg, &s)
    finally:
        free(seg)
    return s.length, s.repeats, s.forbidden, s.shift, bool(s.oversized)


def fitness_value(long length, long repeats, long forbidden, long target):
    cdef Score s
    s.length = length
    s.repeats = repeats
    s.forbidden = forbidden
    return _fitness(&s, target)


def mutate_with(segments, long s_max, double u0, double u1, double u2):
    cdef Py_ssize_t n = len(segments)
    cdef long *buf = <long *> malloc((3 * n + 1) * sizeof(long))
    if buf == NULL:
        raise MemoryError()
    cdef Py_ssize_t i
    for i in range(n):
        buf[i] = segments[i]
    _mutate(buf, buf + n, n, s_max, u0, u1, u2, buf + 2 * n)
    out = tuple([buf[n + i] for i in range(n)])
    free(buf)
    return out


def repair(segments, long s_max, const double[:] uniforms,
           const unsigned char[:] admissible, long lo, long hi, long target):
    cdef Py_ssize_t n = len(segments)
    # cur | trial | scratch | marks
    cdef long *buf = <long *> malloc((4 * n + 2) * sizeof(long))
    if buf == NULL:
        raise MemoryError()
    cdef long *cur = buf
    cdef long *trial = buf + n
    cdef long *scratch = buf + 2 * n
    cdef long *marks = buf + 3 * n
    cdef Py_ssize_t i, b
    cdef Py_ssize_t used = 0
    cdef Py_ssize_t ntries = uniforms.shape[0] // 3
    cdef Score s, ts
    cdef long fit, tf
    try:
        for i in range(n):
            cur[i] = segments[i]
        _score(cur, n, admissible, lo, hi, marks, &s)
        fit = _fitness(&s, target)
        while used < ntries and s.repeats > 0:
            b = 3 * used
            _mutate(cur, trial, n, s_max, uniforms[b], uniforms[b + 1], uniforms[b + 2], scratch)
            used += 1
            _score(trial, n, admissible, lo, hi, marks, &ts)
            tf = _fitness(&ts, target)
            if tf < fit:
                for i in range(n):
                    cur[i] = trial[i]
                s = ts
                fit = tf
        out = tuple([cur[i] for i in range(n)])
    finally:
        free(buf)
    return out, (s.length, s.repeats, s.forbidden, s.shift, bool(s.oversized)), used
