"""Fisher information and Cramér-Rao bounds for ruler-sampled ranging.

PDoA phase samples follow a von Mises law of shape ``kappa``; ToA delays are
Gaussian. A design is either the raw mark set (non-expanded) or the measure
set of a Golomb ruler (expanded: double differences with doubled noise).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .ranging import SPEED_OF_LIGHT, PDoA, ToA
from .rulers import Ruler, is_golomb, measure_set

_SERIES_LIMIT = 15.0


def _bessel_series(order: int, x: float) -> float:
    half = 0.5 * x
    term = half ** order / math.factorial(order)
    total = term
    q = half * half
    k = 0
    while term > 1e-17 * total:
        k += 1
        term *= q / (k * (k + order))
        total += term
    return total


def _bessel_asymptotic_scaled(order: int, x: float) -> float:
    """``exp(-x) * I_n(x)`` from the large-argument expansion."""
    mu = 4.0 * order * order
    term = 1.0
    total = 1.0
    k = 0
    while True:
        k += 1
        nxt = -term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        if abs(nxt) >= abs(term) or nxt == 0.0:
            break
        term = nxt
        total += term
        if abs(term) < 1e-17 * abs(total):
            break
    return total / math.sqrt(2.0 * math.pi * x)


def bessel_ie(order: int, x: float) -> float:
    """Exponentially scaled modified Bessel function ``exp(-x) I_n(x)``, n in {0, 1}."""
    if order not in (0, 1):
        raise ValueError("only orders 0 and 1 are supported")
    if x < 0:
        raise ValueError("x must be non-negative")
    if x < _SERIES_LIMIT:
        return math.exp(-x) * _bessel_series(order, x)
    return _bessel_asymptotic_scaled(order, x)


def bessel_i(order: int, x: float) -> float:
    """Modified Bessel function of the first kind ``I_n(x)`` for n in {0, 1}.

    Power series below x = 15, asymptotic expansion above. Overflows to
    ``inf`` past x ~ 700; use :func:`bessel_ie` or :func:`bessel_ratio` there.
    """
    if order not in (0, 1):
        raise ValueError("only orders 0 and 1 are supported")
    if x < 0:
        raise ValueError("x must be non-negative")
    if x < _SERIES_LIMIT:
        return _bessel_series(order, x)
    try:
        return math.exp(x) * _bessel_asymptotic_scaled(order, x)
    except OverflowError:
        return math.inf


def bessel_ratio(x: float) -> float:
    """``I_1(x) / I_0(x)``, the mean resultant length of a von Mises(x) law."""
    if x == 0:
        return 0.0
    if math.isinf(x):
        return 1.0
    return bessel_ie(1, x) / bessel_ie(0, x)


@dataclass(frozen=True)
class CircularNoise:
    kappa: float
    sigma: float


def sigma_from_kappa(kappa: float) -> float:
    """Circular standard deviation ``sqrt(1 - I1(k)/I0(k))``."""
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    return math.sqrt(1.0 - bessel_ratio(kappa))


def kappa_from_sigma(sigma: float, tol: float = 1e-10) -> float:
    """Invert :func:`sigma_from_kappa` by bisection on ``log(kappa)``."""
    if not 0 < sigma < 1:
        raise ValueError("sigma must lie in (0, 1)")
    target = sigma * sigma
    lo, hi = math.log(1e-12), math.log(1e18)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if 1.0 - bessel_ratio(math.exp(mid)) > target:
            lo = mid
        else:
            hi = mid
    return math.exp(0.5 * (lo + hi))


def circular_noise(kappa: float | None = None, sigma: float | None = None) -> CircularNoise:
    if (kappa is None) == (sigma is None):
        raise ValueError("give exactly one of kappa or sigma")
    if kappa is not None:
        return CircularNoise(kappa, sigma_from_kappa(kappa))
    return CircularNoise(kappa_from_sigma(sigma), sigma)


@dataclass(frozen=True)
class FisherResult:
    J: float
    crlb: float
    design: tuple[int, ...]
    expanded: bool
    mode: str
    noise: float  # kappa (pdoa) or sigma_tau (toa)


def _sum_squares(design: Iterable[int]) -> int:
    design = tuple(int(v) for v in design)
    if not design:
        raise ValueError("empty design")
    s = sum(v * v for v in design)
    if s == 0:
        raise ValueError("design has no non-zero index; Fisher information is zero")
    return s


def fisher_pdoa(design: Sequence[int], delta_f: float, kappa: float,
                expanded: bool) -> FisherResult:
    """Fisher information on distance from von Mises phase samples.

    Expanded designs (measures) use shape ``kappa/2`` for the double
    differences; non-expanded designs (marks) use ``kappa``.
    """
    alpha = PDoA(delta_f, kappa).alpha
    s2 = _sum_squares(design)
    k = kappa / 2.0 if expanded else kappa
    J = alpha * alpha * k * bessel_ratio(k) * s2
    return FisherResult(J, 1.0 / J, tuple(design), expanded, "pdoa", kappa)


def fisher_toa(design: Sequence[int], sigma_tau: float, expanded: bool) -> FisherResult:
    """Fisher information on distance from Gaussian round-trip delays."""
    ToA(sigma_tau)
    s2 = _sum_squares(design)
    scale = 2.0 if expanded else 4.0
    J = scale * s2 / (SPEED_OF_LIGHT ** 2 * sigma_tau ** 2)
    return FisherResult(J, 1.0 / J, tuple(design), expanded, "toa", sigma_tau)


def design_of(ruler: Ruler, expanded: bool) -> tuple[int, ...]:
    """Index set used by a ruler: its distinct measures or its zero-based marks."""
    return measure_set(ruler).distinct if expanded else ruler.marks


def fisher(ruler: Ruler, mode: PDoA | ToA, expanded: bool) -> FisherResult:
    design = design_of(ruler, expanded)
    if isinstance(mode, PDoA):
        return fisher_pdoa(design, mode.delta_f, mode.kappa, expanded)
    return fisher_toa(design, mode.sigma_tau, expanded)


@dataclass(frozen=True)
class RatioCurve:
    sigma: np.ndarray
    ratio: np.ndarray           # J(marks) / J(measures)
    J_marks: np.ndarray
    J_measures: np.ndarray
    crossing: float | None      # sigma where the ratio equals one


def default_sigma_grid(points: int = 200, lo: float = 1e-2, hi: float = 0.9) -> np.ndarray:
    return np.geomspace(lo, hi, points)


def _pdoa_ratio(sigma: float, s_marks: int, s_measures: int) -> float:
    kappa = kappa_from_sigma(sigma)
    jn = kappa * bessel_ratio(kappa) * s_marks
    jv = 0.5 * kappa * bessel_ratio(0.5 * kappa) * s_measures
    return jn / jv


def ratio_curve(ruler: Ruler, delta_f: float = 1e6,
                sigma_grid: Sequence[float] | None = None) -> RatioCurve:
    """``J(N)/J(V)`` over a grid of PDoA phase deviations, with its unit crossing.

    The crossing is refined by bisection inside the first grid interval where
    the ratio passes through one; ``None`` if it never does.
    """
    if not is_golomb(ruler):
        raise ValueError("ratio curves need a Golomb ruler")
    sigmas = default_sigma_grid() if sigma_grid is None else np.asarray(sigma_grid, float)
    marks, measures = design_of(ruler, False), design_of(ruler, True)
    jn = np.empty(len(sigmas))
    jv = np.empty(len(sigmas))
    for i, s in enumerate(sigmas):
        kappa = kappa_from_sigma(float(s))
        jn[i] = fisher_pdoa(marks, delta_f, kappa, False).J
        jv[i] = fisher_pdoa(measures, delta_f, kappa, True).J
    ratio = jn / jv

    s_marks, s_measures = _sum_squares(marks), _sum_squares(measures)
    crossing = None
    for i in range(len(sigmas) - 1):
        a, b = ratio[i] - 1.0, ratio[i + 1] - 1.0
        if a == 0.0:
            crossing = float(sigmas[i])
            break
        if a * b < 0:
            lo, hi = float(sigmas[i]), float(sigmas[i + 1])
            sign_lo = math.copysign(1.0, a)
            while hi - lo > 1e-12:
                mid = 0.5 * (lo + hi)
                if math.copysign(1.0, _pdoa_ratio(mid, s_marks, s_measures) - 1.0) == sign_lo:
                    lo = mid
                else:
                    hi = mid
            crossing = 0.5 * (lo + hi)
            break
    return RatioCurve(sigmas, ratio, jn, jv, crossing)
