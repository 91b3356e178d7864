"""Measurement models for two-way ToA and stepped-frequency PDoA ranging.

Both techniques observe samples that grow linearly with an integer index,
``delta_k = omega_d * k``, where the slope ``omega_d`` encodes the distance:
``2d/c`` seconds per ranging cycle (ToA) or ``4*pi*df*d/c`` radians per
frequency step (PDoA). Samples are drawn at the marks of a ruler and may be
expanded into one double-difference per pairwise measure.
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np

from .rulers import Ruler, is_golomb

SPEED_OF_LIGHT = 299_792_458.0

# Above this shape the von Mises law is replaced by its wrapped-normal limit;
# the rejection sampler loses precision there.
_VM_NORMAL_KAPPA = 1e6


@dataclass(frozen=True)
class PDoA:
    """Phase-difference ranging over frequency steps of ``delta_f`` Hz.

    ``kappa`` is the von Mises shape of each phase sample (its input SNR).
    """

    delta_f: float
    kappa: float

    def __post_init__(self):
        if not self.delta_f > 0:
            raise ValueError("delta_f must be positive")
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")

    @property
    def alpha(self) -> float:
        """Radians of phase slope per meter of distance."""
        return 4.0 * math.pi * self.delta_f / SPEED_OF_LIGHT

    name = "pdoa"


@dataclass(frozen=True)
class ToA:
    """Two-way time-of-arrival ranging with Gaussian timing noise (seconds)."""

    sigma_tau: float

    def __post_init__(self):
        if not self.sigma_tau > 0:
            raise ValueError("sigma_tau must be positive")

    @property
    def alpha(self) -> float:
        """Seconds of round-trip delay per meter of distance."""
        return 2.0 / SPEED_OF_LIGHT

    name = "toa"


RangingMode = Union[PDoA, ToA]


def omega_from_distance(d: float, mode: RangingMode) -> float:
    if d < 0:
        raise ValueError("distance must be non-negative")
    return mode.alpha * d


def distance_from_omega(omega: float, mode: RangingMode) -> float:
    if omega < 0:
        raise ValueError("omega must be non-negative")
    return omega / mode.alpha


def wrap_phase(x):
    """Wrap angles into ``(-pi, pi]``."""
    return np.pi - np.mod(np.pi - np.asarray(x, dtype=float), 2 * np.pi)


def sample_von_mises(kappa: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """Zero-mean von Mises draws by Best and Fisher's rejection scheme."""
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    if kappa >= _VM_NORMAL_KAPPA:
        return wrap_phase(rng.normal(0.0, 1.0 / math.sqrt(kappa), size))
    tau = 1.0 + math.sqrt(1.0 + 4.0 * kappa * kappa)
    rho = (tau - math.sqrt(2.0 * tau)) / (2.0 * kappa)
    r = (1.0 + rho * rho) / (2.0 * rho)

    out = np.empty(size)
    filled = 0
    while filled < size:
        n = max(2 * (size - filled), 16)
        u1, u2, u3 = rng.random((3, n))
        z = np.cos(np.pi * u1)
        f = (1.0 + r * z) / (r + z)
        c = kappa * (r - f)
        with np.errstate(divide="ignore", invalid="ignore"):
            ok = (c * (2.0 - c) - u2 > 0) | (np.log(c / u2) + 1.0 - c >= 0)
        theta = np.sign(u3[ok] - 0.5) * np.arccos(np.clip(f[ok], -1.0, 1.0))
        take = min(theta.size, size - filled)
        out[filled:filled + take] = theta[:take]
        filled += take
    return out


@dataclass(frozen=True)
class MeasurementSet:
    """Samples ``values`` at integer ``indices`` (ruler marks or measures).

    PDoA values are radians wrapped to ``(-pi, pi]``; ToA values are seconds.
    ``expanded`` marks double-difference sets indexed by measures.
    """

    indices: np.ndarray
    values: np.ndarray
    expanded: bool
    mode: str

    def __len__(self):
        return len(self.indices)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["index", "value", "expanded"])
            for i, v in zip(self.indices, self.values):
                w.writerow([int(i), repr(float(v)), int(self.expanded)])


def sample_marks(d: float, ruler: Ruler, mode: RangingMode,
                 rng: np.random.Generator) -> MeasurementSet:
    """Draw one noisy sample per ruler mark (zero-based marks)."""
    marks = np.asarray(ruler.marks, dtype=np.int64)
    omega = omega_from_distance(d, mode)
    mean = omega * marks
    if isinstance(mode, PDoA):
        noise = sample_von_mises(mode.kappa, marks.size, rng)
        values = wrap_phase(mean + noise)
    else:
        values = mean + rng.normal(0.0, mode.sigma_tau, marks.size)
    return MeasurementSet(marks, values, False, mode.name)


@lru_cache(maxsize=256)
def _pair_layout(marks: tuple[int, ...]):
    hi, lo = np.triu_indices(len(marks), 1)
    # triu gives (row < col); row is the earlier mark
    m = np.asarray(marks)
    measures = m[lo] - m[hi]
    order = np.argsort(measures, kind="stable")
    return hi[order], lo[order], measures[order]


def expand_to_measures(samples: MeasurementSet, ruler: Ruler) -> MeasurementSet:
    """Turn mark samples into one double-difference per pairwise measure."""
    if samples.expanded:
        raise ValueError("samples are already expanded")
    if not is_golomb(ruler):
        raise ValueError("expansion needs a Golomb ruler (unambiguous measures)")
    if not np.array_equal(samples.indices, ruler.marks):
        raise ValueError("samples were not taken on this ruler")
    first, second, measures = _pair_layout(ruler.marks)
    values = samples.values[second] - samples.values[first]
    if samples.mode == "pdoa":
        values = wrap_phase(values)
    return MeasurementSet(measures, values, True, samples.mode)


def check_unambiguous(d: float, max_index: int, mode: RangingMode) -> bool:
    """Warn and return False if PDoA phases at ``max_index`` exceed pi."""
    if isinstance(mode, PDoA) and omega_from_distance(d, mode) * max_index >= math.pi:
        warnings.warn(
            f"omega_d * {max_index} >= pi: PDoA samples wrap and averaging is ambiguous",
            stacklevel=2)
        return False
    return True
