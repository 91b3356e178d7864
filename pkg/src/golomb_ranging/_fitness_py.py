"""Pure-Python GA kernel (fallback for the compiled ``_fitness``).

Both backends consume the same caller-supplied uniforms, so a seeded run is
bit-identical whichever one is loaded.
"""


def score_segments(segments, admissible, lo, hi):
    """Score a segment sequence against an admissible-mark mask.

    Args:
        segments: consecutive-mark differences, all >= 1.
        admissible: bytes-like mask, ``admissible[v] != 0`` iff mark ``v`` is allowed.
            Must have length ``hi + 1``.
        lo: smallest admissible mark.
        hi: largest admissible mark.

    Returns:
        ``(length, repeats, forbidden, shift, oversized)`` where ``repeats`` counts
        duplicated pair differences and ``forbidden`` is the minimum, over all
        shifts keeping the ruler inside ``[lo, hi]``, of marks outside the mask.
    """
    marks = [0]
    total = 0
    for s in segments:
        total += s
        marks.append(total)
    length = total

    seen = bytearray(length + 1)
    repeats = 0
    k = len(marks)
    for i in range(1, k):
        mi = marks[i]
        for j in range(i):
            d = mi - marks[j]
            if seen[d]:
                repeats += 1
            else:
                seen[d] = 1

    if length > hi - lo:
        bad = 0
        for m in marks:
            v = m + lo
            if v > hi or not admissible[v]:
                bad += 1
        return length, repeats, bad, lo, True

    best = k + 1
    best_shift = lo
    for t in range(lo, hi - length + 1):
        bad = 0
        for m in marks:
            if not admissible[m + t]:
                bad += 1
                if bad >= best:
                    break
        if bad < best:
            best = bad
            best_shift = t
            if bad == 0:
                break
    return length, repeats, best, best_shift, False


def fitness_value(length, repeats, forbidden, target):
    scale = length if target <= 0 else target + abs(length - target)
    return scale * (repeats + forbidden + 1)


def mutate_with(segments, s_max, u0, u1, u2):
    """One elementary mutation driven by three uniforms in [0, 1).

    ``u0 < 0.5`` selects transmutation: a non-unit segment (picked by ``u1``) is
    redrawn from ``2..s_max`` minus its current value (picked by ``u2``).
    Otherwise, or when nothing can be transmuted, two distinct positions
    (``u1``, ``u2``) are swapped.
    """
    out = list(segments)
    n = len(out)
    if u0 < 0.5:
        movable = [i for i in range(n) if out[i] != 1]
        if movable:
            i = movable[int(u1 * len(movable))]
            cur = out[i]
            nchoice = s_max - 1 - (1 if 2 <= cur <= s_max else 0)
            if nchoice > 0:
                v = 2 + int(u2 * nchoice)
                if 2 <= cur <= v:
                    v += 1
                out[i] = v
                return tuple(out)
    if n >= 2:
        i = int(u1 * n)
        j = int(u2 * (n - 1))
        if j >= i:
            j += 1
        out[i], out[j] = out[j], out[i]
    return tuple(out)


def repair(segments, s_max, uniforms, admissible, lo, hi, target):
    """Hill-climb while the candidate has repeated measures.

    Each try consumes three uniforms and the mutant replaces the current
    candidate only if its fitness is strictly lower. Stops as soon as no
    measure repeats or the uniforms run out.

    Returns:
        ``(segments, (length, repeats, forbidden, shift, oversized), tries_used)``
    """
    cur = tuple(segments)
    score = score_segments(cur, admissible, lo, hi)
    fit = fitness_value(score[0], score[1], score[2], target)
    used = 0
    ntries = len(uniforms) // 3
    while used < ntries and score[1] > 0:
        b = 3 * used
        trial = mutate_with(cur, s_max, uniforms[b], uniforms[b + 1], uniforms[b + 2])
        used += 1
        ts = score_segments(trial, admissible, lo, hi)
        tf = fitness_value(ts[0], ts[1], ts[2], target)
        if tf < fit:
            cur, score, fit = trial, ts, tf
    return cur, score, used
