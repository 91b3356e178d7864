"""Published reference data: ruler groups and GA relative-error benchmark."""
from .rulers import ERQ, FRA, Ruler, RulerGroup

ERQ_MARKS = (
    (0, 1, 7, 10, 30, 41, 45, 63, 87),
    (2, 3, 6, 32, 37, 49, 56, 76, 89),
    (4, 5, 16, 20, 33, 42, 52, 66, 73, 91),
    (8, 9, 18, 21, 38, 46, 53, 72, 77, 93, 95),
    (12, 13, 17, 25, 31, 47, 68, 70, 79, 96, 99),
)
FRA_MARKS = (
    (0, 1, 16, 21, 24, 49, 63, 75, 81, 85),
    (2, 3, 11, 32, 45, 56, 60, 72, 78, 92),
    (5, 9, 15, 29, 42, 51, 68, 80, 91, 96),
    (6, 13, 17, 19, 33, 43, 61, 62, 84, 93),
    (12, 14, 22, 27, 28, 46, 66, 73, 77, 94),
)
# (K, N, M) as printed next to each ruler.
ERQ_STATED = ((9, 87, 36), (9, 87, 36), (10, 87, 45), (11, 87, 55), (11, 87, 55))
FRA_STATED = ((10, 85, 45), (10, 90, 45), (10, 91, 45), (10, 87, 45), (10, 82, 45))

# order -> (N_opt, Soliday, proposed P=2, proposed P=4), errors in percent
RELATIVE_ERROR_TABLE = {
    5: (11, 0.0, 0.0, 0.0),
    6: (17, 0.0, 0.0, 0.0),
    7: (25, 0.0, 0.0, 0.0),
    8: (34, 2.94, 0.0, 0.0),
    9: (44, 0.0, 4.6, 0.0),
    10: (55, 12.7, 12.7, 9.1),
    11: (72, 9.7, 11.1, 8.33),
    12: (85, 21.2, 16.5, 14.1),
    13: (106, 17.0, 17.0, 15.1),
    14: (127, 32.3, 23.6, 17.3),
    15: (151, 36.4, 26.5, 19.9),
}


def erq_group() -> RulerGroup:
    return RulerGroup(tuple(Ruler.from_marks(m) for m in ERQ_MARKS), ERQ)


def fra_group() -> RulerGroup:
    return RulerGroup(tuple(Ruler.from_marks(m) for m in FRA_MARKS), FRA)
