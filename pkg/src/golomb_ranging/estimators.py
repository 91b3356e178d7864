"""Distance estimation from index-linear samples.

Samples ``Delta_k = omega_d * k`` taken at a sparse index set behave like a
single tone seen by a sparse linear array, so subspace methods apply: the
noise subspace of the sample covariance is orthogonal to the steering vector
at ``omega_d``. Two subspace estimators are provided (a gridded MUSIC
pseudo-spectrum and polynomial rooting), plus a plain averaging baseline.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import fft

from .kernels import poly_roots
from .ranging import MeasurementSet, PDoA, RangingMode, ToA, distance_from_omega, omega_from_distance

OK = "ok"
NO_PEAK = "no peak"
NO_UNIT_ROOT = "no unit root"

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def steering(omega: float, measures: Sequence[int]) -> np.ndarray:
    """Unit-modulus vector ``exp(j * nu * omega)`` over the index set."""
    return np.exp(1j * omega * np.asarray(measures, dtype=float))


def snapshot(values, scale: float = 1.0) -> np.ndarray:
    """Complex measurement vector ``exp(j * scale * values)``."""
    return np.exp(1j * scale * np.asarray(values, dtype=float))


@dataclass(frozen=True)
class SubspaceModel:
    covariance: np.ndarray
    eigenvalues: np.ndarray     # descending
    noise_basis: np.ndarray     # M x (M-1), trailing eigenvectors
    snapshots: int

    @property
    def projector(self) -> np.ndarray:
        """``U0 @ U0^H``."""
        u = self.noise_basis
        return u @ u.conj().T


def build_subspace(vectors) -> SubspaceModel:
    """Sample covariance of ``L`` snapshots and its noise subspace.

    Args:
        vectors: one length-M complex vector, or an ``L x M`` array of them.
    """
    x = np.atleast_2d(np.asarray(vectors, dtype=complex))
    L, M = x.shape
    if M < 2:
        raise ValueError("need at least two entries per snapshot for a noise subspace")
    R = x.T @ x.conj() / L
    R = 0.5 * (R + R.conj().T)
    w, v = np.linalg.eigh(R)
    w, v = w[::-1], v[:, ::-1]
    return SubspaceModel(R, w, v[:, 1:], L)


def _lag_coefficients(model: SubspaceModel, measures: Sequence[int]) -> np.ndarray:
    """``c[D] = sum of Q[m, l] over pairs with nu_l - nu_m = D``, for D >= 0."""
    nu = np.asarray(measures, dtype=np.int64)
    if nu.size != model.noise_basis.shape[0]:
        raise ValueError("measure count does not match the model dimension")
    Q = model.projector
    lag = nu[None, :] - nu[:, None]
    span = int(nu.max() - nu.min())
    c = np.zeros(span + 1, dtype=complex)
    pos = lag >= 0
    np.add.at(c, lag[pos], Q[pos])
    return c


def _null_projection(c: np.ndarray, omega) -> np.ndarray:
    """``||e(omega)^H U0||^2`` from lag coefficients (real trig polynomial)."""
    omega = np.asarray(omega, dtype=float)
    lags = np.arange(1, c.size)
    tail = np.exp(1j * np.multiply.outer(omega, lags)) @ c[1:] if c.size > 1 else 0.0
    return c[0].real + 2.0 * np.real(tail)


def music_spectrum(model: SubspaceModel, measures: Sequence[int], omega) -> np.ndarray:
    """Pseudo-spectrum ``1 / ||e(omega)^H U0||^2`` evaluated directly."""
    e = np.exp(1j * np.multiply.outer(np.atleast_1d(np.asarray(omega, float)),
                                      np.asarray(measures, float)))
    proj = e.conj() @ model.noise_basis
    return 1.0 / np.sum(np.abs(proj) ** 2, axis=-1)


@dataclass(frozen=True)
class MusicEstimate:
    distance: float
    omega: float
    status: str
    degenerate: bool
    omegas: np.ndarray
    spectrum: np.ndarray

    @property
    def ok(self) -> bool:
        return self.status == OK


def _grid_size(resolution: float) -> int:
    n = 2 * math.pi / resolution
    return 1 << max(4, math.ceil(math.log2(n)))


def _golden_min(f, a: float, b: float, tol: float = 1e-13) -> float:
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def music_estimate(model: SubspaceModel, measures: Sequence[int], mode: RangingMode,
                   grid: float = 2e-5, scale: float = 1.0) -> MusicEstimate:
    """Spectral MUSIC: grid search over ``(0, pi)`` then golden-section refinement.

    The pseudo-spectrum is a trigonometric polynomial in ``omega``, so the
    whole grid comes from one real inverse FFT of its lag coefficients; the
    grid step is the next power-of-two spacing not coarser than ``grid``.

    Args:
        scale: phase per unit of sample value (1 for PDoA, see :func:`toa_scale`).
    """
    if not grid > 0:
        raise ValueError("grid resolution must be positive")
    c = _lag_coefficients(model, measures)
    n = _grid_size(grid)
    if c.size > n // 2:
        raise ValueError("grid too coarse for the largest measure")
    spec_c = np.zeros(n // 2 + 1, dtype=complex)
    spec_c[:c.size] = c
    proj = n * fft.irfft(spec_c, n)
    # irfft sums c_D e^{+j 2pi D k / n}; keep 0 < omega < pi
    omegas = 2 * math.pi * np.arange(1, n // 2) / n
    proj = np.maximum(proj[1:n // 2], 1e-300)
    spectrum = 1.0 / proj
    k = int(np.argmax(spectrum))
    status = OK
    if spectrum[k] / np.median(spectrum) < 1 + 1e-6:
        status = NO_PEAK
    degenerate = k == 0 or k == omegas.size - 1
    step = omegas[1] - omegas[0]
    lo = max(omegas[k] - step, 0.0)
    hi = min(omegas[k] + step, math.pi)
    w = _golden_min(lambda t: float(_null_projection(c, t)), lo, hi)
    omega_d = w / scale
    return MusicEstimate(_distance(omega_d, mode), w, status, degenerate, omegas, spectrum)


@dataclass(frozen=True)
class MusicPolynomial:
    """``z^(nu_M - 1) * ||e(z)^H U0||^2`` as a polynomial in ``z``.

    ``coefficients[p]`` multiplies ``z**p``; each one is the sum of a diagonal
    of the zero-padded Gramian, walked from the bottom-left corner.
    """

    coefficients: np.ndarray
    gramian: np.ndarray
    offset: int  # added to indices before embedding

    @property
    def degree(self) -> int:
        return self.coefficients.size - 1

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(z, self.coefficients)

    def roots(self) -> np.ndarray:
        return poly_roots(self.coefficients[::-1])


def music_polynomial(model: SubspaceModel, measures: Sequence[int]) -> MusicPolynomial:
    """Root-MUSIC polynomial built from the embedded noise-subspace Gramian."""
    nu = np.asarray(measures, dtype=np.int64)
    if nu.size != model.noise_basis.shape[0]:
        raise ValueError("measure count does not match the model dimension")
    offset = 1 - int(nu.min()) if nu.min() < 1 else 0
    size = int(nu.max()) + offset
    idx = nu + offset - 1
    G = np.zeros((size, size), dtype=complex)
    G[np.ix_(idx, idx)] = model.projector
    # coefficient of z^p pairs conj(z^a) G[a, b] z^b with b - a = p - (size - 1)
    coeffs = np.array([np.trace(G, offset=p - (size - 1)) for p in range(2 * size - 1)])
    return MusicPolynomial(coeffs, G, offset)


@dataclass(frozen=True)
class RootEstimate:
    distance: float
    omega: float
    status: str
    root: complex
    roots: np.ndarray

    @property
    def ok(self) -> bool:
        return self.status == OK


def _polish_double(poly: MusicPolynomial, z: complex, iters: int = 8) -> complex:
    """Newton on ``P'`` to settle a near-double root split by rounding."""
    d1 = np.polynomial.polynomial.polyder(poly.coefficients)
    d2 = np.polynomial.polynomial.polyder(d1)
    pv = np.polynomial.polynomial.polyval
    for _ in range(iters):
        den = pv(z, d2)
        if den == 0:
            break
        step = pv(z, d1) / den
        z = z - step
        if abs(step) < 1e-15:
            break
    return z


def select_root(roots: np.ndarray, annulus: float = 0.2, tol: float = 1e-6):
    """Index of the in-disk root in the upper half plane closest to the unit circle.

    Roots outside the disk by less than ``tol`` count as inside (rounding).
    Ties go to the larger modulus. Returns ``None`` if nothing lies within
    ``annulus`` of the circle.
    """
    mod = np.abs(roots)
    arg = np.angle(roots)
    ok = (mod <= 1 + tol) & (np.abs(1 - mod) <= annulus) & (arg > 0) & (arg < math.pi)
    if not ok.any():
        return None
    cand = np.flatnonzero(ok)
    dist = np.abs(1 - mod[cand])
    best = dist.min()
    tied = cand[dist <= best + 1e-15]
    return int(tied[np.argmax(mod[tied])])


def root_music_estimate(model: SubspaceModel, measures: Sequence[int], mode: RangingMode,
                        annulus: float = 0.2, scale: float = 1.0) -> RootEstimate:
    """Root-MUSIC: angle of the selected root near the unit circle.

    Noiseless inputs give a double root on the circle, which rounding splits
    into a close pair; such pairs are polished back together before reading
    the angle.
    """
    poly = music_polynomial(model, measures)
    roots = poly.roots()
    i = select_root(roots, annulus)
    if i is None:
        return RootEstimate(math.nan, math.nan, NO_UNIT_ROOT, complex("nan"), roots)
    z = complex(roots[i])
    others = np.delete(roots, i)
    if others.size and np.min(np.abs(others - z)) < 1e-6:
        polished = _polish_double(poly, z)
        if abs(polished - z) < 1e-6:
            z = polished
    w = float(np.angle(z))
    omega_d = w / scale
    return RootEstimate(_distance(omega_d, mode), w, OK, z, roots)


def _distance(omega_d: float, mode: RangingMode) -> float:
    # noise can push a near-zero estimate negative; keep the sign
    return math.copysign(distance_from_omega(abs(omega_d), mode), omega_d)


def toa_scale(max_distance: float, max_index: int) -> float:
    """Phase per second for ToA samples: ``pi / (omega_max * nu_M)``.

    ``omega_max`` is the ToA slope at ``max_distance``, so every sample of a
    target closer than that maps to a phase below ``pi``.
    """
    if not max_distance > 0 or max_index < 1:
        raise ValueError("max_distance and max_index must be positive")
    return math.pi / (omega_from_distance(max_distance, ToA(1.0)) * max_index)


def average_estimate(samples: MeasurementSet, mode: RangingMode) -> float:
    """Mean of the per-sample slopes ``value / index``, as a distance.

    PDoA values are taken to lie in ``[-pi/2, 3pi/2)``: anything below
    ``-pi/2`` is read as a wrapped phase near ``pi``.
    """
    idx = np.asarray(samples.indices, dtype=float)
    if idx.size == 0:
        raise ValueError("no samples")
    if np.any(idx == 0):
        raise ValueError("index 0 carries no distance information")
    values = np.asarray(samples.values, dtype=float)
    if isinstance(mode, PDoA):
        values = np.where(values < -math.pi / 2, values + 2 * math.pi, values)
    slope = float(np.mean(values / idx))
    return slope / mode.alpha

