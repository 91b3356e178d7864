import math
import warnings

import numpy as np
import pytest
from scipy import stats

from golomb_ranging.crlb import bessel_ratio
from golomb_ranging.ranging import (SPEED_OF_LIGHT, PDoA, ToA, check_unambiguous,
                                    distance_from_omega, expand_to_measures, omega_from_distance,
                                    sample_marks, sample_von_mises, wrap_phase)
from golomb_ranging.rulers import Ruler, measure_set


class TestModes:
    def test_alpha(self):
        assert PDoA(1e6, 10).alpha == pytest.approx(4 * math.pi * 1e6 / SPEED_OF_LIGHT)
        assert ToA(1e-9).alpha == pytest.approx(2 / SPEED_OF_LIGHT)

    @pytest.mark.parametrize("mode", [PDoA(25e3, 5.0), ToA(1e-9)])
    def test_omega_round_trip(self, mode):
        for d in (0.0, 1.5, 20.0, 99.0):
            assert distance_from_omega(omega_from_distance(d, mode), mode) == pytest.approx(d)

    def test_validation(self):
        with pytest.raises(ValueError):
            PDoA(0, 1)
        with pytest.raises(ValueError):
            PDoA(1e6, -1)
        with pytest.raises(ValueError):
            ToA(0)
        with pytest.raises(ValueError):
            omega_from_distance(-1, ToA(1.0))


def test_wrap_phase_range():
    x = np.linspace(-20, 20, 4001)
    w = wrap_phase(x)
    assert np.all(w > -math.pi) and np.all(w <= math.pi)
    assert np.allclose(np.exp(1j * w), np.exp(1j * x))
    assert wrap_phase(math.pi) == pytest.approx(math.pi)
    assert wrap_phase(-math.pi) == pytest.approx(math.pi)


class TestVonMises:
    @pytest.mark.parametrize("kappa", [0.5, 2.0, 8.0, 50.0])
    def test_mean_resultant(self, kappa):
        th = sample_von_mises(kappa, 200_000, np.random.default_rng(1))
        assert np.all(np.abs(th) <= math.pi)
        assert np.mean(np.cos(th)) == pytest.approx(bessel_ratio(kappa), abs=5e-3)
        assert abs(np.mean(np.sin(th))) < 5e-3

    def test_distribution_ks(self):
        th = sample_von_mises(3.0, 20_000, np.random.default_rng(2))
        assert stats.kstest(th, stats.vonmises(3.0).cdf).pvalue > 1e-3

    def test_high_kappa_branch(self):
        th = sample_von_mises(1e8, 100_000, np.random.default_rng(3))
        assert np.std(th) == pytest.approx(1e-4, rel=0.02)

    def test_deterministic(self):
        a = sample_von_mises(4.0, 100, np.random.default_rng(7))
        b = sample_von_mises(4.0, 100, np.random.default_rng(7))
        assert np.array_equal(a, b)


class TestSampling:
    ruler = Ruler.from_marks((0, 1, 4, 6))

    def test_noiseless_pdoa(self):
        mode = PDoA(25e3, math.inf)
        s = sample_marks(20.0, self.ruler, mode, np.random.default_rng())
        w = omega_from_distance(20.0, mode)
        assert np.allclose(s.values, wrap_phase(w * np.array([0, 1, 4, 6])), atol=1e-15)
        assert not s.expanded and s.mode == "pdoa"

    def test_toa_noise(self):
        s = sample_marks(10.0, Ruler.from_marks(range(0, 2000)), ToA(1e-9),
                         np.random.default_rng(4))
        resid = s.values - 2 * 10.0 / SPEED_OF_LIGHT * s.indices
        assert abs(np.mean(resid)) < 4 * 1e-9 / math.sqrt(2000)
        assert np.std(resid) == pytest.approx(1e-9, rel=0.1)

    def test_expand_layout(self):
        mode = PDoA(25e3, math.inf)
        s = sample_marks(20.0, self.ruler, mode, np.random.default_rng())
        e = expand_to_measures(s, self.ruler)
        assert e.expanded
        assert tuple(e.indices) == measure_set(self.ruler).multiset
        w = omega_from_distance(20.0, mode)
        assert np.allclose(e.values, wrap_phase(w * e.indices), atol=1e-12)

    def test_expand_pairs(self):
        ruler = Ruler.from_marks((0, 1, 4, 9, 11))
        s = sample_marks(3.0, ruler, ToA(1e-9), np.random.default_rng(5))
        e = expand_to_measures(s, ruler)
        v = dict(zip(ruler.marks, s.values))
        pairs = {b - a: v[b] - v[a] for a in ruler.marks for b in ruler.marks if b > a}
        for k, x in zip(e.indices, e.values):
            assert x == pytest.approx(pairs[int(k)])

    def test_expand_rejects(self):
        bad = Ruler.from_marks((0, 1, 2))
        s = sample_marks(1.0, bad, ToA(1e-9), np.random.default_rng())
        with pytest.raises(ValueError):
            expand_to_measures(s, bad)
        good = sample_marks(1.0, self.ruler, ToA(1e-9), np.random.default_rng())
        with pytest.raises(ValueError):
            expand_to_measures(expand_to_measures(good, self.ruler), self.ruler)

    def test_csv(self, tmp_path):
        s = sample_marks(1.0, self.ruler, ToA(1e-9), np.random.default_rng(0))
        s.to_csv(tmp_path / "s.csv")
        lines = (tmp_path / "s.csv").read_text().splitlines()
        assert lines[0] == "index,value,expanded" and len(lines) == 5


def test_ambiguity_warning():
    mode = PDoA(1e6, 10.0)
    with pytest.warns(UserWarning):
        assert not check_unambiguous(20.0, 17, mode)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert check_unambiguous(20.0, 17, PDoA(25e3, 10.0))
        assert check_unambiguous(1e3, 17, ToA(1e-9))
