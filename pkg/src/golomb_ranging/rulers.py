"""Golomb ruler combinatorics: marks, measure sets, forbidden marks and groups.

Rulers are stored zero-based (first mark 0) with an explicit ``offset`` so that
shifted rulers, such as the ones laid out inside a shared span of cycles, keep
their absolute position.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, NamedTuple, Sequence

ERQ = "ERQ"
FRA = "FRA"
GROUPINGS = (ERQ, FRA)

# Shortest known (optimal) ruler length per order.
OPTIMAL_LENGTHS = {
    2: 1, 3: 3, 4: 6, 5: 11, 6: 17, 7: 25, 8: 34, 9: 44,
    10: 55, 11: 72, 12: 85, 13: 106, 14: 127, 15: 151,
}


@dataclass(frozen=True)
class Ruler:
    """Ordered mark set, stored relative to its first mark.

    Use :meth:`from_marks` to build one from absolute marks.
    """

    marks: tuple[int, ...]
    offset: int = 0

    def __post_init__(self):
        marks = tuple(int(m) for m in self.marks)
        if len(marks) < 2:
            raise ValueError("a ruler needs at least two marks")
        if marks[0] != 0:
            raise ValueError("marks must be zero-based; use Ruler.from_marks")
        if any(b <= a for a, b in zip(marks, marks[1:])):
            raise ValueError(f"marks must be strictly ascending: {marks}")
        if self.offset < 0:
            raise ValueError("offset must be non-negative")
        object.__setattr__(self, "marks", marks)

    @classmethod
    def from_marks(cls, marks: Iterable[int]) -> Ruler:
        marks = sorted(int(m) for m in marks)
        if not marks:
            raise ValueError("empty mark list")
        if marks[0] < 0:
            raise ValueError("marks must be non-negative")
        first = marks[0]
        return cls(tuple(m - first for m in marks), first)

    @classmethod
    def from_segments(cls, segments: Iterable[int], offset: int = 0) -> Ruler:
        marks = [0]
        for s in segments:
            if s < 1:
                raise ValueError("segments must be positive")
            marks.append(marks[-1] + int(s))
        return cls(tuple(marks), offset)

    @property
    def order(self) -> int:
        return len(self.marks)

    @property
    def length(self) -> int:
        return self.marks[-1]

    @property
    def absolute(self) -> tuple[int, ...]:
        return tuple(m + self.offset for m in self.marks)

    @property
    def segments(self) -> tuple[int, ...]:
        return tuple(b - a for a, b in zip(self.marks, self.marks[1:]))

    def shifted(self, offset: int) -> Ruler:
        return Ruler(self.marks, offset)

    def __len__(self):
        return len(self.marks)


@dataclass(frozen=True)
class MeasureSet:
    """Pairwise differences of a ruler as sorted ``(value, count)`` pairs."""

    values: tuple[int, ...]
    counts: tuple[int, ...]

    @property
    def distinct(self) -> tuple[int, ...]:
        return self.values

    @property
    def M(self) -> int:
        return len(self.values)

    @property
    def size(self) -> int:
        return sum(self.counts)

    @property
    def repetitions(self) -> int:
        return self.size - self.M

    @property
    def multiset(self) -> tuple[int, ...]:
        return tuple(v for v, c in zip(self.values, self.counts) for _ in range(c))


def measure_set(ruler: Ruler) -> MeasureSet:
    counts = Counter(b - a for a, b in combinations(ruler.marks, 2))
    values = tuple(sorted(counts))
    return MeasureSet(values, tuple(counts[v] for v in values))


def is_golomb(ruler: Ruler) -> bool:
    return measure_set(ruler).repetitions == 0


@dataclass(frozen=True)
class MarkConstraint:
    """Set of admissible marks."""

    admissible: frozenset[int]
    _mask: bytes = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        adm = frozenset(int(m) for m in self.admissible)
        if not adm:
            raise ValueError("admissible mark set is empty")
        if min(adm) < 0:
            raise ValueError("admissible marks must be non-negative")
        object.__setattr__(self, "admissible", adm)
        mask = bytearray(max(adm) + 1)
        for m in adm:
            mask[m] = 1
        object.__setattr__(self, "_mask", bytes(mask))

    @classmethod
    def span(cls, hi: int, lo: int = 0) -> MarkConstraint:
        return cls(frozenset(range(lo, hi + 1)))

    @property
    def lo(self) -> int:
        return min(self.admissible)

    @property
    def hi(self) -> int:
        return len(self._mask) - 1

    @property
    def mask(self) -> bytes:
        return self._mask

    def without(self, marks: Iterable[int]) -> MarkConstraint:
        return MarkConstraint(self.admissible.difference(marks))

    def __contains__(self, mark):
        return mark in self.admissible


class ForbiddenCount(NamedTuple):
    count: int
    shift: int
    oversized: bool


def forbidden_count(ruler: Ruler, constraint: MarkConstraint) -> ForbiddenCount:
    """Fewest inadmissible marks over every shift that keeps the ruler in range.

    When the ruler is longer than the admissible range it is clamped at the
    lowest admissible mark and the result is flagged ``oversized``.
    """
    lo, hi = constraint.lo, constraint.hi
    mask = constraint.mask
    if ruler.length > hi - lo:
        bad = sum(1 for m in ruler.marks if m + lo > hi or not mask[m + lo])
        return ForbiddenCount(bad, lo, True)
    best, best_shift = ruler.order + 1, lo
    for t in range(lo, hi - ruler.length + 1):
        bad = sum(1 for m in ruler.marks if not mask[m + t])
        if bad < best:
            best, best_shift = bad, t
            if bad == 0:
                break
    return ForbiddenCount(best, best_shift, False)


@dataclass(frozen=True)
class RulerGroup:
    rulers: tuple[Ruler, ...]
    grouping: str

    def __post_init__(self):
        object.__setattr__(self, "rulers", tuple(self.rulers))
        if self.grouping not in GROUPINGS:
            raise ValueError(f"grouping must be one of {GROUPINGS}")

    @property
    def span(self) -> int:
        return max(r.absolute[-1] for r in self.rulers)


def check_group(group: RulerGroup) -> list[str]:
    """Return the list of orthogonality/grouping violations (empty if valid)."""
    violations = []
    rulers = group.rulers
    if len(rulers) < 2:
        violations.append("a group needs at least two rulers")
    for i, r in enumerate(rulers):
        if not is_golomb(r):
            violations.append(f"ruler {i} is not a Golomb ruler")
    for (i, a), (j, b) in combinations(enumerate(rulers), 2):
        shared = sorted(set(a.absolute) & set(b.absolute))
        if shared:
            violations.append(f"rulers {i} and {j} share marks {shared}")
    if group.grouping == ERQ:
        lengths = {r.length for r in rulers}
        if len(lengths) > 1:
            violations.append(f"ERQ rulers differ in length: {sorted(lengths)}")
    else:
        orders = {r.order for r in rulers}
        if len(orders) > 1:
            violations.append(f"FRA rulers differ in order: {sorted(orders)}")
    return violations


# -- JSON-lines ruler files -------------------------------------------------

def ruler_record(ruler: Ruler, group: str | None = None,
                 grouping: str | None = None) -> dict:
    return {"marks": list(ruler.absolute), "group": group, "grouping": grouping}


def write_rulers(path, records: Sequence[dict], extra: Sequence[dict] = ()) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in list(records) + list(extra):
            fh.write(json.dumps(rec, sort_keys=False) + "\n")


class RulerEntry(NamedTuple):
    ruler: Ruler
    group: str | None
    grouping: str | None


def iter_ruler_file(path) -> Iterator[RulerEntry]:
    """Yield rulers from a JSON-lines file; lines without ``marks`` are skipped."""
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            if "marks" not in rec:
                continue
            grouping = rec.get("grouping")
            if grouping is not None:
                grouping = grouping.upper()
                if grouping not in GROUPINGS:
                    raise ValueError(f"{path}:{lineno}: bad grouping {rec['grouping']!r}")
            yield RulerEntry(Ruler.from_marks(rec["marks"]), rec.get("group"), grouping)


def read_groups(path) -> dict[str, RulerGroup]:
    """Collect the rulers of a file into groups keyed by their ``group`` field."""
    members: dict[str, list[RulerEntry]] = {}
    for entry in iter_ruler_file(path):
        if entry.group is not None:
            members.setdefault(entry.group, []).append(entry)
    groups = {}
    for name, entries in members.items():
        grouping = next((e.grouping for e in entries if e.grouping), None)
        if grouping is None:
            raise ValueError(f"group {name!r} has no grouping")
        groups[name] = RulerGroup(tuple(e.ruler for e in entries), grouping)
    return groups
