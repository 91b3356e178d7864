"""Monte Carlo ranging experiments, CRLB sweeps and GA benchmarks.

Every trial draws from its own generator seeded by ``(seed, trial)``, so a
result table depends only on the spec, never on evaluation order.
"""
from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Sequence

import numpy as np

from . import crlb as _crlb
from .estimators import (average_estimate, build_subspace, music_estimate,
                         root_music_estimate, snapshot, toa_scale)
from .ga import GaConfig, synthesize_ruler
from .ranging import (MeasurementSet, PDoA, ToA, check_unambiguous,
                      expand_to_measures, sample_marks)
from .rulers import (OPTIMAL_LENGTHS, MarkConstraint, Ruler, RulerGroup,
                     check_group, is_golomb, iter_ruler_file)
from .tables import RELATIVE_ERROR_TABLE

ESTIMATORS = ("music", "rootmusic", "average")
EXPERIMENT_HEADER = ("sigma", "estimator", "expanded", "rmse_m", "bias_m",
                     "failures", "sqrt_crlb_m", "trials", "seed")

DEFAULT_DELTA_F = 25e3
DEFAULT_DISTANCE = 20.0


@dataclass
class ExperimentSpec:
    """One Monte Carlo experiment over a noise grid.

    ``sigmas`` holds circular phase deviations (PDoA) or timing deviations in
    seconds (ToA). PDoA grids may instead be given as shapes in ``kappas``.
    The ruler comes from ``marks`` or from entry ``ruler_index`` of
    ``ruler_file``.
    """

    mode: str = "pdoa"
    sigmas: list[float] = field(default_factory=list)
    kappas: list[float] = field(default_factory=list)
    estimators: list[str] = field(default_factory=lambda: list(ESTIMATORS))
    expanded: bool = True
    distance: float = DEFAULT_DISTANCE
    delta_f: float = DEFAULT_DELTA_F
    max_distance: float = 100.0     # ToA phase mapping
    trials: int = 1000
    seed: int = 0
    marks: list[int] | None = None
    ruler_file: str | None = None
    ruler_index: int = 0
    grid: float = 2e-5
    annulus: float = 0.2
    out: str | None = None

    def __post_init__(self):
        self.mode = self.mode.lower()
        if self.mode not in ("pdoa", "toa"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if bool(self.sigmas) == bool(self.kappas):
            raise ValueError("give exactly one non-empty noise grid (sigmas or kappas)")
        if self.kappas and self.mode != "pdoa":
            raise ValueError("kappas only apply to pdoa")
        unknown = set(self.estimators) - set(ESTIMATORS)
        if unknown or not self.estimators:
            raise ValueError(f"estimators must be drawn from {ESTIMATORS}")
        if (self.marks is None) == (self.ruler_file is None):
            raise ValueError("give exactly one of marks or ruler_file")

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentSpec:
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValueError(f"unknown spec fields: {unknown}")
        return cls(**data)

    @classmethod
    def from_json(cls, path) -> ExperimentSpec:
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def ruler(self) -> Ruler:
        if self.marks is not None:
            ruler = Ruler.from_marks(self.marks)
        else:
            entries = list(iter_ruler_file(self.ruler_file))
            ruler = entries[self.ruler_index].ruler
        # mark-only sampling works on any ruler; expansion needs unique measures
        if self.expanded and not is_golomb(ruler):
            raise ValueError(f"ruler {ruler.absolute} is not a Golomb ruler")
        return ruler

    def noise_grid(self) -> list[float]:
        return list(self.sigmas or self.kappas)


@dataclass(frozen=True)
class TrialAggregate:
    sigma: float
    estimator: str
    expanded: bool
    rmse_m: float
    bias_m: float
    failures: int
    sqrt_crlb_m: float
    trials: int
    seed: int

    def row(self) -> list[str]:
        return [repr(float(self.sigma)), self.estimator, str(int(self.expanded)),
                repr(float(self.rmse_m)), repr(float(self.bias_m)), str(self.failures),
                repr(float(self.sqrt_crlb_m)), str(self.trials), str(self.seed)]


def _mode_for(spec: ExperimentSpec, level: float):
    """Ranging mode and the sigma reported for one grid level."""
    if spec.mode == "toa":
        return ToA(level), level
    if spec.kappas:
        return PDoA(spec.delta_f, level), _crlb.sigma_from_kappa(level)
    return PDoA(spec.delta_f, _crlb.kappa_from_sigma(level)), level


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, trial]))


def _estimate(name: str, samples: MeasurementSet, mode, scale: float,
              spec: ExperimentSpec, keep_spectrum: bool = False):
    """Distance estimate, or ``None`` on estimator failure."""
    if name == "average":
        if samples.indices[0] == 0:
            samples = MeasurementSet(samples.indices[1:], samples.values[1:],
                                     samples.expanded, samples.mode)
        return average_estimate(samples, mode), None
    model = build_subspace(snapshot(samples.values, scale))
    if name == "music":
        est = music_estimate(model, samples.indices, mode, grid=spec.grid, scale=scale)
        spectrum = (est.omegas, est.spectrum) if keep_spectrum else None
        return (est.distance if est.ok else None), spectrum
    est = root_music_estimate(model, samples.indices, mode, annulus=spec.annulus, scale=scale)
    return (est.distance if est.ok else None), None


def run_experiment(spec: ExperimentSpec, ruler: Ruler | None = None,
                   dump_spectrum=None) -> list[TrialAggregate]:
    """RMSE and bias of each estimator at each noise level.

    Failed estimates are left out of RMSE and bias and counted instead.

    Args:
        ruler: overrides the spec's ruler (used for group runs).
        dump_spectrum: path; the MUSIC pseudo-spectrum of the first trial at
            the first noise level is written there as CSV.
    """
    ruler = ruler or spec.ruler()
    indices = _crlb.design_of(ruler, spec.expanded)
    max_index = max(indices)
    if spec.mode == "pdoa":
        check_unambiguous(spec.distance, max_index, PDoA(spec.delta_f, 1.0))
        scale = 1.0
    else:
        scale = toa_scale(spec.max_distance, max_index)
    out = []
    for level in spec.noise_grid():
        mode, sigma = _mode_for(spec, level)
        bound = _crlb.fisher(ruler, mode, spec.expanded).crlb
        errors = {name: [] for name in spec.estimators}
        failures = dict.fromkeys(spec.estimators, 0)
        for t in range(spec.trials):
            samples = sample_marks(spec.distance, ruler, mode, trial_rng(spec.seed, t))
            if spec.expanded:
                samples = expand_to_measures(samples, ruler)
            for name in spec.estimators:
                keep = dump_spectrum is not None and t == 0 and not out and name == "music"
                d_hat, spectrum = _estimate(name, samples, mode, scale, spec, keep)
                if spectrum is not None:
                    write_spectrum(dump_spectrum, *spectrum)
                if d_hat is None or not math.isfinite(d_hat):
                    failures[name] += 1
                else:
                    errors[name].append(d_hat - spec.distance)
        for name in spec.estimators:
            err = np.asarray(errors[name])
            rmse = float(np.sqrt(np.mean(err ** 2))) if err.size else math.nan
            bias = float(np.mean(err)) if err.size else math.nan
            out.append(TrialAggregate(sigma, name, spec.expanded, rmse, bias,
                                      failures[name], math.sqrt(bound), spec.trials, spec.seed))
    return out


@dataclass
class MultipointResult:
    per_ruler: list[list[TrialAggregate]]
    mean: list[TrialAggregate]     # group mean RMSE, bias and sqrt-CRLB per (sigma, estimator)


def run_multipoint(group: RulerGroup, spec: ExperimentSpec) -> MultipointResult:
    """Run one experiment per ruler of an orthogonal group on a shared noise grid."""
    if len(group.rulers) > 1:
        violations = check_group(group)
        if violations:
            raise ValueError("invalid group: " + "; ".join(violations))
    per_ruler = [run_experiment(spec, ruler=r) for r in group.rulers]
    mean = []
    for rows in zip(*per_ruler):
        first = rows[0]
        mean.append(TrialAggregate(
            first.sigma, first.estimator, first.expanded,
            float(np.mean([r.rmse_m for r in rows])),
            float(np.mean([r.bias_m for r in rows])),
            sum(r.failures for r in rows),
            float(np.mean([r.sqrt_crlb_m for r in rows])),
            first.trials, first.seed))
    return MultipointResult(per_ruler, mean)


def write_experiment(path, rows: Sequence[TrialAggregate]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(EXPERIMENT_HEADER)
        for r in rows:
            w.writerow(r.row())


def write_multipoint(path, result: MultipointResult) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("ruler",) + EXPERIMENT_HEADER)
        for i, rows in enumerate(result.per_ruler):
            for r in rows:
                w.writerow([str(i)] + r.row())
        for r in result.mean:
            w.writerow(["mean"] + r.row())


def write_spectrum(path, omegas, spectrum) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("omega", "pseudo_spectrum"))
        for o, s in zip(omegas, spectrum):
            w.writerow((repr(float(o)), repr(float(s))))


# -- CRLB sweeps -------------------------------------------------------------

CRLB_HEADER = ("sigma", "J_N", "J_V", "ratio", "crlb_N", "crlb_V")


def crlb_table(ruler: Ruler, mode: str = "pdoa", delta_f: float = 1e6,
               sigmas: Sequence[float] | None = None) -> list[tuple[float, ...]]:
    """Fisher information of marks (N) and measures (V) over a noise grid."""
    if sigmas is None:
        sigmas = _crlb.default_sigma_grid()
    rows = []
    for s in sigmas:
        s = float(s)
        if mode == "pdoa":
            noise = PDoA(delta_f, _crlb.kappa_from_sigma(s))
        elif mode == "toa":
            noise = ToA(s)
        else:
            raise ValueError(f"unknown mode {mode!r}")
        jn = _crlb.fisher(ruler, noise, expanded=False)
        jv = _crlb.fisher(ruler, noise, expanded=True)
        rows.append((s, jn.J, jv.J, jn.J / jv.J, jn.crlb, jv.crlb))
    return rows


def write_crlb(path, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CRLB_HEADER)
        for row in rows:
            w.writerow([repr(float(v)) for v in row])


# -- GA benchmark --------------------------------------------------------------

BENCH_HEADER = ("order", "n_opt", "runs", "failures", "mean_length", "mean_eta_pct",
                "published_soliday_pct", "published_p2_pct", "published_p4_pct")


@dataclass(frozen=True)
class BenchRow:
    order: int
    n_opt: int
    runs: int
    failures: int
    mean_length: float
    mean_eta: float
    lengths: tuple[int, ...]
    seconds: tuple[float, ...]

    def row(self) -> list[str]:
        _, sol, p2, p4 = RELATIVE_ERROR_TABLE[self.order]
        return [str(self.order), str(self.n_opt), str(self.runs), str(self.failures),
                repr(self.mean_length), f"{100 * self.mean_eta:.4f}",
                repr(sol), repr(p2), repr(p4)]


def benchmark_ga(orders: Sequence[int], runs: int, config: GaConfig | None = None,
                 seed: int = 0) -> list[BenchRow]:
    """Mean relative error of seeded GA runs per order, admissible marks ``0..3*N_opt``.

    Run ``r`` of order ``K`` uses the generator seeded by ``(seed, K, r)``.
    Infeasible runs count as failures and are left out of the mean.
    """
    config = config or GaConfig()
    out = []
    for k in orders:
        if k not in RELATIVE_ERROR_TABLE:
            lo, hi = min(RELATIVE_ERROR_TABLE), max(RELATIVE_ERROR_TABLE)
            raise ValueError(f"order {k} is outside the benchmark table ({lo}..{hi})")
        n_opt = OPTIMAL_LENGTHS[k]
        constraint = MarkConstraint.span(3 * n_opt)
        lengths, secs, failures = [], [], 0
        for r in range(runs):
            rng = np.random.default_rng(np.random.SeedSequence([seed, k, r]))
            t0 = time.perf_counter()
            res = synthesize_ruler(k, constraint, config, rng)
            secs.append(time.perf_counter() - t0)
            if res.feasible:
                lengths.append(res.ruler.length)
            else:
                failures += 1
        mean_len = float(np.mean(lengths)) if lengths else math.nan
        eta = (mean_len - n_opt) / n_opt if lengths else math.nan
        out.append(BenchRow(k, n_opt, runs, failures, mean_len, eta, tuple(lengths), tuple(secs)))
    return out


def write_bench(path, rows: Sequence[BenchRow]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(BENCH_HEADER)
        for r in rows:
            w.writerow(r.row())


def resolve_path(base, name) -> Path:
    p = Path(name)
    return p if p.is_absolute() else Path(base).parent / p
