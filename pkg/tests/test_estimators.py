import math

import numpy as np
import pytest

from golomb_ranging.estimators import (NO_PEAK, NO_UNIT_ROOT, average_estimate, build_subspace,
                                       music_estimate, music_polynomial, music_spectrum,
                                       root_music_estimate, select_root, snapshot, steering,
                                       toa_scale)
from golomb_ranging.ranging import (MeasurementSet, PDoA, ToA, expand_to_measures,
                                    omega_from_distance, sample_marks)
from golomb_ranging.rulers import Ruler, measure_set
from golomb_ranging.tables import ERQ_MARKS, FRA_MARKS

NOISELESS = PDoA(25e3, math.inf)


def noiseless(ruler, d=20.0, mode=NOISELESS, expanded=True):
    s = sample_marks(d, ruler, mode, np.random.default_rng())
    return expand_to_measures(s, ruler) if expanded else s


class TestSubspace:
    def test_shapes_and_order(self):
        x = steering(0.3, [1, 2, 5, 9])
        m = build_subspace(x)
        assert m.noise_basis.shape == (4, 3)
        assert np.all(np.diff(m.eigenvalues) <= 1e-12)
        assert m.eigenvalues[0] == pytest.approx(4.0)

    def test_noise_basis_orthogonal_to_signal(self):
        x = steering(0.3, [1, 2, 5, 9])
        m = build_subspace(x)
        assert np.allclose(x.conj() @ m.noise_basis, 0, atol=1e-12)
        P = m.projector
        assert np.allclose(P @ P, P, atol=1e-12)

    def test_needs_two(self):
        with pytest.raises(ValueError):
            build_subspace([1.0 + 0j])


class TestMusic:
    ruler = Ruler.from_marks((0, 1, 4, 10, 12, 17))

    def test_noiseless_peak(self):
        s = noiseless(self.ruler)
        w = omega_from_distance(20.0, NOISELESS)
        est = music_estimate(build_subspace(snapshot(s.values)), s.indices, NOISELESS)
        assert est.ok and not est.degenerate
        assert est.omega == pytest.approx(w, abs=1e-7)
        assert est.distance == pytest.approx(20.0, abs=1e-3)

    def test_grid_matches_direct_spectrum(self):
        rng = np.random.default_rng(0)
        s = expand_to_measures(sample_marks(20.0, self.ruler, PDoA(25e3, 30.0), rng), self.ruler)
        model = build_subspace(snapshot(s.values))
        est = music_estimate(model, s.indices, NOISELESS, grid=1e-3)
        idx = rng.integers(0, est.omegas.size, 50)
        direct = music_spectrum(model, s.indices, est.omegas[idx])
        assert np.allclose(est.spectrum[idx], direct, rtol=1e-8)

    def test_no_peak_flag(self):
        # an isotropic covariance has a flat pseudo-spectrum
        nu = measure_set(Ruler.from_marks((0, 1, 4, 6))).distinct
        model = build_subspace(np.eye(len(nu)) * math.sqrt(len(nu)))
        est = music_estimate(model, nu, NOISELESS, grid=1e-3)
        assert est.status == NO_PEAK and not est.ok

    def test_grid_validation(self):
        s = noiseless(self.ruler)
        model = build_subspace(snapshot(s.values))
        with pytest.raises(ValueError):
            music_estimate(model, s.indices, NOISELESS, grid=0)
        with pytest.raises(ValueError):
            music_estimate(model, s.indices, NOISELESS, grid=1.0)


class TestRootMusic:
    def test_polynomial_matches_spectrum(self):
        ruler = Ruler.from_marks(ERQ_MARKS[0])
        rng = np.random.default_rng(1)
        s = expand_to_measures(sample_marks(20.0, ruler, PDoA(25e3, 10.0), rng), ruler)
        model = build_subspace(snapshot(s.values))
        poly = music_polynomial(model, s.indices)
        w = rng.uniform(0, math.pi, 100)
        z = np.exp(1j * w)
        via_poly = poly(z) * z ** (-(poly.degree // 2))
        via_spec = 1.0 / music_spectrum(model, s.indices, w)
        assert np.allclose(via_poly.real, via_spec, rtol=1e-8)
        assert np.allclose(via_poly.imag, 0, atol=1e-8 * np.max(via_spec))

    def test_degree(self):
        ruler = Ruler.from_marks((0, 1, 4, 6))
        s = noiseless(ruler)
        poly = music_polynomial(build_subspace(snapshot(s.values)), s.indices)
        assert poly.degree == 2 * 6 - 2

    @pytest.mark.parametrize("marks", ERQ_MARKS + FRA_MARKS)
    def test_noiseless_exact(self, marks):
        ruler = Ruler.from_marks(marks)
        s = noiseless(ruler)
        est = root_music_estimate(build_subspace(snapshot(s.values)), s.indices, NOISELESS)
        assert est.ok
        assert est.omega == pytest.approx(omega_from_distance(20.0, NOISELESS), abs=1e-9)

    def test_select_root(self):
        roots = np.array([0.5 + 0j, 0.99 * np.exp(0.3j), 0.99 * np.exp(-0.3j),
                          np.exp(0.7j) / 0.95, 0.95 * np.exp(0.7j)])
        assert select_root(roots) == 1
        assert select_root(np.array([0.5, 2.0 + 0j])) is None

    def test_select_root_tolerance_and_ties(self):
        r = np.array([(1 + 1e-9) * np.exp(0.4j), (1 - 1e-9) * np.exp(0.5j)])
        assert select_root(r) == 0
        tie = np.array([0.9 * np.exp(0.4j), 0.9 * np.exp(0.6j)])
        assert select_root(tie) in (0, 1)

    def test_no_unit_root(self):
        nu = [1, 2, 3]
        model = build_subspace(np.eye(3) * math.sqrt(3))
        est = root_music_estimate(model, nu, NOISELESS, annulus=1e-9)
        assert est.status == NO_UNIT_ROOT and math.isnan(est.distance)


class TestToA:
    def test_scale_and_recovery(self):
        ruler = Ruler.from_marks(FRA_MARKS[0])
        mode = ToA(1e-15)
        s = noiseless(ruler, d=37.0, mode=mode)
        scale = toa_scale(100.0, int(max(s.indices)))
        assert np.max(np.abs(scale * s.values)) < math.pi
        model = build_subspace(snapshot(s.values, scale))
        est = root_music_estimate(model, s.indices, mode, scale=scale)
        assert est.distance == pytest.approx(37.0, abs=1e-4)
        mus = music_estimate(model, s.indices, mode, scale=scale)
        assert mus.distance == pytest.approx(37.0, abs=1e-2)

    def test_scale_validation(self):
        with pytest.raises(ValueError):
            toa_scale(0, 10)


class TestAverage:
    def test_noiseless(self):
        ruler = Ruler.from_marks((0, 1, 4, 6))
        s = noiseless(ruler, expanded=False)
        s = MeasurementSet(s.indices[1:], s.values[1:], False, "pdoa")
        assert average_estimate(s, NOISELESS) == pytest.approx(20.0)

    def test_unwrap_near_pi(self):
        # slope close to pi per index: wrapped samples near -pi are read as near +pi
        mode = PDoA(25e3, math.inf)
        w = 3.1
        vals = np.array([w, w + 0.1 - 2 * math.pi])
        s = MeasurementSet(np.array([1, 1]), vals, True, "pdoa")
        assert average_estimate(s, mode) == pytest.approx((w + 0.05) / mode.alpha)

    def test_rejects_zero_index(self):
        s = MeasurementSet(np.array([0, 1]), np.array([0.0, 0.1]), False, "pdoa")
        with pytest.raises(ValueError):
            average_estimate(s, NOISELESS)
