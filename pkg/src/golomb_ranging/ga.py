"""Pride-of-lions genetic algorithm for Golomb rulers under a mark constraint.

Candidates are segment sequences (differences of consecutive marks). A run
mutates a small random population until it holds at least one repetition-free
candidate, crowns the fittest such candidate as the dominant male, and then
evolves the population by crossing the male with every female. Orthogonal
groups are produced by repeated runs, each removing the marks already taken.

All randomness comes from one ``numpy.random.Generator``; the compiled and
pure-Python kernels consume the same draws, so seeded runs are reproducible
across backends.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import kernels
from .rulers import (ERQ, FRA, OPTIMAL_LENGTHS, MarkConstraint, Ruler,
                     RulerGroup)

log = logging.getLogger(__name__)

Segments = tuple[int, ...]

# tries handed to the kernel per call; uniforms are drawn in blocks of this size
_CHUNK = 256


@dataclass(frozen=True)
class GaConfig:
    """GA knobs. ``None`` fields resolve per order, see :meth:`resolve`.

    Attributes:
        population_size: P, number of candidates (male plus females).
        max_mutations: C, mutation tries per candidate repair (default ``200*K``).
        max_generations: G, crossover generations per restart.
        s_max: initial largest primary segment (default ``K-1``).
        max_escalations: how many times ``s_max`` may grow (default ``2*K``).
        max_restarts: populations evolved at a fixed ``s_max``; the best ruler wins.
        mutate_children: repair crossover children with repeated measures.
        require_feasible_male: only let children free of forbidden marks
            replace the male.
        seed: seed for the default generator.
    """

    population_size: int = 4
    max_mutations: int | None = None
    max_generations: int = 500
    s_max: int | None = None
    max_escalations: int | None = None
    max_restarts: int = 30
    mutate_children: bool = True
    require_feasible_male: bool = False
    seed: int = 0

    def resolve(self, order: int) -> GaConfig:
        cfg = replace(
            self,
            max_mutations=200 * order if self.max_mutations is None else self.max_mutations,
            s_max=order - 1 if self.s_max is None else self.s_max,
            max_escalations=2 * order if self.max_escalations is None else self.max_escalations,
        )
        if cfg.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if cfg.max_mutations < 1 or cfg.max_generations < 1 or cfg.max_restarts < 1:
            raise ValueError("max_mutations, max_generations and max_restarts must be >= 1")
        if cfg.s_max < order - 1:
            raise ValueError(f"s_max={cfg.s_max} is below K-1={order - 1}")
        return cfg


@dataclass(frozen=True)
class Score:
    fitness: int
    length: int
    repeats: int
    forbidden: int
    shift: int
    oversized: bool

    @property
    def feasible(self) -> bool:
        return self.repeats == 0 and self.forbidden == 0


class Scorer:
    """Memoized fitness ``N * (R + F + 1)`` against one constraint.

    With ``target_length`` set, ``N`` is replaced by ``target + |N - target|``
    so that only rulers of exactly that length reach the floor value.
    """

    def __init__(self, constraint: MarkConstraint, target_length: int | None = None):
        self.constraint = constraint
        self.target = target_length or 0
        self.mask = constraint.mask
        self.lo, self.hi = constraint.lo, constraint.hi
        self._cache: dict[Segments, Score] = {}

    def make(self, segments: Segments, raw) -> Score:
        n, r, f, t, over = raw
        score = Score(kernels.fitness_value(n, r, f, self.target), n, r, f, t, over)
        self._cache[segments] = score
        return score

    def __call__(self, segments: Segments) -> Score:
        hit = self._cache.get(segments)
        if hit is not None:
            return hit
        return self.make(segments, kernels.score_segments(segments, self.mask, self.lo, self.hi))


def fitness(candidate: Sequence[int], constraint: MarkConstraint,
            target_length: int | None = None) -> int:
    """``N * (R + F + 1)`` for one segment sequence."""
    return Scorer(constraint, target_length)(tuple(int(s) for s in candidate)).fitness


def _permutation_count(n: int, k: int) -> int:
    return math.perm(n, k) if n >= k else 0


def _draw(order: int, s_max: int, rng: np.random.Generator) -> Segments:
    return tuple(int(v) + 1 for v in rng.permutation(s_max)[:order - 1])


def init_population(order: int, config: GaConfig, rng: np.random.Generator,
                    s_max: int | None = None) -> list[Segments]:
    """Draw P distinct (K-1)-truncations of random permutations of ``1..s_max``."""
    s_max = config.s_max if s_max is None else s_max
    if s_max is None or s_max < order - 1:
        raise ValueError(f"s_max={s_max} is below K-1={order - 1}")
    size = config.population_size
    if size > _permutation_count(s_max, order - 1):
        raise ValueError(
            f"population of {size} exceeds the distinct sequences available "
            f"for K={order}, s_max={s_max}")
    population: list[Segments] = []
    seen = set()
    while len(population) < size:
        cand = _draw(order, s_max, rng)
        if cand not in seen:
            seen.add(cand)
            population.append(cand)
    return population


def mutate(candidate: Sequence[int], rng: np.random.Generator, s_max: int) -> Segments:
    """Apply one elementary mutation: transmutation or permutation, even odds.

    Transmutation redraws one non-unit segment from ``2..s_max`` (excluding its
    current value); permutation swaps two positions. With no segment eligible
    for transmutation the permutation branch is taken.
    """
    u0, u1, u2 = rng.random(3)
    return kernels.mutate_with(tuple(int(s) for s in candidate), s_max, u0, u1, u2)


def crossover(male: Sequence[int], female: Sequence[int],
              rng: np.random.Generator) -> Segments:
    """Copy of ``male`` with block ``[i, j]`` taken from ``female``."""
    if len(male) != len(female):
        raise ValueError("parents must have the same number of segments")
    i, j = sorted(int(v) for v in rng.integers(0, len(male), size=2))
    return tuple(male[:i]) + tuple(female[i:j + 1]) + tuple(male[j + 1:])


def repair(candidate: Segments, scorer: Scorer, rng: np.random.Generator,
           tries: int, s_max: int) -> Segments:
    """Mutate while measures repeat, keeping only strict fitness improvements."""
    cand = candidate
    score = scorer(cand)
    left = tries
    while left > 0 and score.repeats > 0:
        n = min(left, _CHUNK)
        cand, raw, used = kernels.repair(cand, s_max, rng.random(3 * n), scorer.mask,
                                         scorer.lo, scorer.hi, scorer.target)
        score = scorer.make(cand, raw)
        left -= used
    return cand


@dataclass
class GaBenchmark:
    length: int
    optimal_length: int

    @property
    def eta(self) -> float:
        return (self.length - self.optimal_length) / self.optimal_length


@dataclass
class GaResult:
    ruler: Ruler
    score: Score
    feasible: bool
    s_max: int
    escalations: int
    restarts: int
    generations: int
    male_history: list[int] = field(default_factory=list)
    benchmark: GaBenchmark | None = None


class Exhausted(RuntimeError):
    """A group member could not be synthesized; ``partial`` holds the rest."""

    def __init__(self, message, partial: list[Ruler]):
        super().__init__(message)
        self.partial = partial


def _select_male(population: list[Segments], scorer: Scorer) -> int | None:
    best = None
    for p, cand in enumerate(population):
        s = scorer(cand)
        if s.repeats == 0 and (best is None or s.fitness < scorer(population[best]).fitness):
            best = p
    return best


def _evolve(male: Segments, females: list[Segments], scorer: Scorer,
            rng: np.random.Generator, config: GaConfig, s_max: int,
            floor: int, history: list[int]) -> tuple[Segments, int]:
    keep = config.population_size - 1
    gen = 0
    for gen in range(1, config.max_generations + 1):
        children = [crossover(male, f, rng) for f in females]
        if config.mutate_children:
            children = [repair(c, scorer, rng, config.max_mutations, s_max) for c in children]
        male_fit = scorer(male).fitness
        best_child = None
        for c in children:
            s = scorer(c)
            if s.repeats or s.fitness >= male_fit or c == male:
                continue
            if config.require_feasible_male and s.forbidden:
                continue
            if best_child is None or s.fitness < scorer(best_child).fitness:
                best_child = c
        pool = list(females) + children
        if best_child is not None:
            pool.append(male)
            male = best_child
        seen = {male}
        unique = []
        for c in pool:
            if c not in seen:
                seen.add(c)
                unique.append(c)
        unique.sort(key=lambda c: scorer(c).fitness)  # stable, ties keep pool order
        females = unique[:keep]
        ms = scorer(male)
        history.append(ms.fitness)
        if ms.feasible and ms.fitness <= floor:
            break
    return male, gen


def _floor(order: int, target_length: int | None) -> int:
    if target_length:
        return target_length
    return OPTIMAL_LENGTHS.get(order, order * (order - 1) // 2)


def synthesize_ruler(order: int, constraint: MarkConstraint,
                     config: GaConfig | None = None,
                     rng: np.random.Generator | None = None,
                     target_length: int | None = None) -> GaResult:
    """Search for a Golomb ruler of the given order honoring ``constraint``.

    Populations are mutated until a repetition-free candidate appears
    (``s_max`` grows by one whenever none does) and then evolved for up to
    ``max_generations``. This is repeated ``max_restarts`` times and the
    fittest feasible male is returned, shifted onto admissible marks. Without
    any feasible male the best candidate is returned with ``feasible=False``.
    """
    if order < 2:
        raise ValueError("order must be >= 2")
    config = config or GaConfig()
    user_s_max = config.s_max
    config = config.resolve(order)
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    scorer = Scorer(constraint, target_length)
    floor = _floor(order, target_length)
    if constraint.hi - constraint.lo < order * (order - 1) // 2:
        log.warning("admissible range %d..%d is shorter than K(K-1)/2 = %d",
                    constraint.lo, constraint.hi, order * (order - 1) // 2)

    s_max = config.s_max
    if target_length and user_s_max is None:
        # start where a (K-1)-subset of 1..s_max sums to the target on average
        s_max = max(s_max, math.ceil(2 * target_length / (order - 1)) - 1)
    while _permutation_count(s_max, order - 1) < config.population_size:
        s_max += 1

    best: Segments | None = None
    best_history: list[int] = []
    fallback: Segments | None = None
    escalations = restarts = generations = 0
    while restarts < config.max_restarts:
        population = init_population(order, config, rng, s_max)
        seen = set()
        for p, cand in enumerate(population):
            cand = repair(cand, scorer, rng, config.max_mutations, s_max)
            while cand in seen:
                cand = repair(_draw(order, s_max, rng), scorer, rng, config.max_mutations, s_max)
            seen.add(cand)
            population[p] = cand
        m = _select_male(population, scorer)
        if m is None:
            fallback = min(population, key=lambda c: scorer(c).fitness)
            if escalations >= config.max_escalations:
                break
            s_max += 1
            escalations += 1
            continue
        restarts += 1
        male = population[m]
        females = population[:m] + population[m + 1:]
        history = [scorer(male).fitness]
        male, gens = _evolve(male, females, scorer, rng, config, s_max, floor, history)
        generations += gens
        score = scorer(male)
        ok = score.feasible and (not target_length or score.length == target_length)
        if ok and (best is None or score.fitness < scorer(best).fitness):
            best, best_history = male, history
        if best is not None and scorer(best).fitness <= floor:
            break
        if not ok:
            if fallback is None or score.fitness < scorer(fallback).fitness:
                fallback = male
            if escalations >= config.max_escalations:
                break
            s_max += 1
            escalations += 1

    feasible = best is not None
    if not feasible:
        log.warning("K=%d: no feasible ruler (escalations=%d, restarts=%d)",
                    order, escalations, restarts)
        best = fallback
    score = scorer(best)
    ruler = Ruler.from_segments(best, offset=score.shift)
    bench = GaBenchmark(ruler.length, OPTIMAL_LENGTHS[order]) if order in OPTIMAL_LENGTHS else None
    return GaResult(ruler, score, feasible, s_max, escalations, restarts,
                    generations, best_history, bench)


def synthesize_group(orders: Sequence[int], grouping: str, constraint: MarkConstraint,
                     config: GaConfig | None = None, rng: np.random.Generator | None = None,
                     target_length: int | None = None) -> RulerGroup:
    """Build mutually orthogonal rulers by successive GA runs.

    Each accepted ruler's marks are removed from the admissible set before
    the next run. ERQ groups pin every ruler to one length (``target_length``
    or, if omitted, the length of the first ruler found); FRA groups need a
    single common order.

    Raises:
        Exhausted: a member could not be synthesized. ``partial`` lists the
            rulers found before it.
    """
    grouping = grouping.upper()
    if grouping not in (ERQ, FRA):
        raise ValueError(f"unknown grouping {grouping!r}")
    if not orders:
        raise ValueError("at least one ruler is required")
    if grouping == FRA and len(set(orders)) != 1:
        raise ValueError("FRA groups share one order")
    config = config or GaConfig()
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    rulers: list[Ruler] = []
    remaining = constraint
    for i, k in enumerate(orders):
        target = None
        if grouping == ERQ:
            target = target_length or (rulers[0].length if rulers else None)
        res = synthesize_ruler(k, remaining, config, rng, target_length=target)
        if not res.feasible:
            raise Exhausted(f"ruler {i} (K={k}) could not be placed", rulers)
        rulers.append(res.ruler)
        left = remaining.admissible.difference(res.ruler.absolute)
        if not left and i + 1 < len(orders):
            raise Exhausted("admissible marks used up", rulers)
        if left:
            remaining = MarkConstraint(left)
    return RulerGroup(tuple(rulers), grouping)
