import itertools
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from golomb_ranging.rulers import (ERQ, FRA, MarkConstraint, Ruler, RulerGroup, check_group,
                                   forbidden_count, is_golomb, iter_ruler_file, measure_set,
                                   read_groups, ruler_record, write_rulers)
from golomb_ranging.tables import (ERQ_MARKS, ERQ_STATED, FRA_MARKS, FRA_STATED, erq_group,
                                   fra_group)


def brute_golomb(marks):
    seen = set()
    for a, b in itertools.combinations(sorted(marks), 2):
        if b - a in seen:
            return False
        seen.add(b - a)
    return True


def brute_forbidden(marks, admissible):
    lo, hi = min(admissible), max(admissible)
    rel = [m - marks[0] for m in marks]
    counts = [sum(1 for m in rel if m + t not in admissible)
              for t in range(lo, hi - rel[-1] + 1)]
    return min(counts)


mark_sets = st.lists(st.integers(0, 60), min_size=2, max_size=9, unique=True).map(sorted)


class TestRuler:
    def test_from_marks_keeps_offset(self):
        r = Ruler.from_marks([2, 3, 6, 32])
        assert r.marks == (0, 1, 4, 30)
        assert r.offset == 2
        assert r.absolute == (2, 3, 6, 32)
        assert r.order == 4 and r.length == 30

    def test_segments_round_trip(self):
        r = Ruler.from_segments([1, 3, 2], offset=5)
        assert r.absolute == (5, 6, 9, 11)
        assert r.segments == (1, 3, 2)

    @pytest.mark.parametrize("marks", [[0], [0, 0, 1], [0, 3, 2]])
    def test_invalid(self, marks):
        with pytest.raises(ValueError):
            Ruler(tuple(marks))

    def test_negative_marks_rejected(self):
        with pytest.raises(ValueError):
            Ruler.from_marks([-1, 3])


class TestMeasureSet:
    def test_perfect_ruler(self):
        ms = measure_set(Ruler((0, 1, 4, 6)))
        assert ms.multiset == (1, 2, 3, 4, 5, 6)
        assert ms.distinct == (1, 2, 3, 4, 5, 6)
        assert ms.M == 6 and ms.repetitions == 0

    def test_single_pair(self):
        ms = measure_set(Ruler((0, 1)))
        assert ms.multiset == (1,) and ms.M == 1 and ms.repetitions == 0

    def test_repeat(self):
        ms = measure_set(Ruler((0, 1, 2)))
        assert ms.multiset == (1, 1, 2)
        assert ms.M == 2 and ms.repetitions == 1

    @given(mark_sets)
    def test_multiset_size(self, marks):
        r = Ruler.from_marks(marks)
        k = r.order
        assert measure_set(r).size == k * (k - 1) // 2

    @given(mark_sets, st.integers(0, 40))
    def test_translation_invariance(self, marks, t):
        a = Ruler.from_marks(marks)
        b = Ruler.from_marks([m + t for m in marks])
        assert measure_set(a) == measure_set(b)
        assert is_golomb(a) == is_golomb(b)


class TestIsGolomb:
    def test_examples(self):
        assert is_golomb(Ruler((0, 1, 4, 6)))
        assert not is_golomb(Ruler((0, 1, 2)))
        assert is_golomb(Ruler.from_marks((0, 1, 7, 10, 30, 41, 45, 63, 87)))

    @given(mark_sets)
    def test_agrees_with_brute_force(self, marks):
        assert is_golomb(Ruler.from_marks(marks)) == brute_golomb(marks)

    def test_exhaustive_small(self):
        # every ruler with n_1 = 0 and length <= 14
        for n in range(1, 15):
            inner = range(1, n)
            for k in range(0, min(6, n - 1) + 1):
                for mid in itertools.combinations(inner, k):
                    marks = (0,) + mid + (n,)
                    assert is_golomb(Ruler(marks)) == brute_golomb(marks), marks

    @pytest.mark.parametrize("marks, stated", list(zip(ERQ_MARKS + FRA_MARKS, ERQ_STATED + FRA_STATED)))
    def test_published_rulers(self, marks, stated):
        r = Ruler.from_marks(marks)
        ms = measure_set(r)
        assert is_golomb(r)
        assert (r.order, r.length, ms.M) == stated


class TestForbiddenCount:
    def test_all_admissible(self):
        fc = forbidden_count(Ruler((0, 1, 4, 6)), MarkConstraint.span(9))
        assert fc.count == 0 and fc.shift == 0 and not fc.oversized

    def test_shift_around_hole(self):
        c = MarkConstraint.span(9).without([1])
        fc = forbidden_count(Ruler((0, 1, 4, 6)), c)
        assert fc.count == 0
        assert all(m + fc.shift in c for m in (0, 1, 4, 6))

    def test_even_marks_only(self):
        c = MarkConstraint(frozenset({0, 2, 4, 6}))
        fc = forbidden_count(Ruler((0, 1, 4, 6)), c)
        assert fc.count >= 1
        assert fc.count == brute_forbidden((0, 1, 4, 6), c.admissible)

    def test_oversized(self):
        fc = forbidden_count(Ruler((0, 1, 4, 6)), MarkConstraint.span(4))
        assert fc.oversized

    @settings(max_examples=60)
    @given(mark_sets.filter(lambda m: m[-1] - m[0] <= 30),
           st.sets(st.integers(0, 40), min_size=1, max_size=25))
    def test_matches_exhaustive_shift(self, marks, holes):
        c = MarkConstraint.span(40).without(holes)
        r = Ruler.from_marks(marks)
        if r.length > c.hi - c.lo:
            return
        assert forbidden_count(r, c).count == brute_forbidden(list(r.marks), c.admissible)

    def test_constraint_validation(self):
        with pytest.raises(ValueError):
            MarkConstraint(frozenset())
        with pytest.raises(ValueError):
            MarkConstraint(frozenset({-1, 2}))


class TestGroups:
    def test_published_groups_valid(self):
        assert check_group(erq_group()) == []
        assert check_group(fra_group()) == []
        assert erq_group().span <= 99 and fra_group().span <= 99

    def test_overlap(self):
        g = RulerGroup((Ruler.from_marks([0, 1, 4, 6]), Ruler.from_marks([1, 8, 9])), FRA)
        v = check_group(g)
        assert any("share marks [1]" in s for s in v)

    def test_erq_lengths(self):
        g = RulerGroup((Ruler.from_marks([0, 1, 3]), Ruler.from_marks([4, 5, 9])), ERQ)
        assert any("length" in s for s in check_group(g))

    def test_non_golomb_member(self):
        g = RulerGroup((Ruler.from_marks([0, 1, 2]), Ruler.from_marks([10, 11, 13])), FRA)
        assert any("not a Golomb" in s for s in check_group(g))

    def test_file_round_trip(self, tmp_path):
        path = tmp_path / "g.jsonl"
        recs = [ruler_record(r, "fra", FRA) for r in fra_group().rulers]
        write_rulers(path, recs, [{"stats": {"n": 5}}])
        lines = path.read_text().splitlines()
        assert json.loads(lines[0]) == {"marks": list(FRA_MARKS[0]), "group": "fra",
                                        "grouping": "FRA"}
        entries = list(iter_ruler_file(path))
        assert [e.ruler.absolute for e in entries] == [tuple(m) for m in FRA_MARKS]
        groups = read_groups(path)
        assert groups["fra"] == fra_group()
