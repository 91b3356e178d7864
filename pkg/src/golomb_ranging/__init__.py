"""Golomb-ruler sampling schedules for superresolution ToA/PDoA ranging."""
from .crlb import (FisherResult, bessel_i, fisher_pdoa, fisher_toa, kappa_from_sigma,
                   ratio_curve, sigma_from_kappa)
from .estimators import (average_estimate, build_subspace, music_estimate,
                         root_music_estimate, snapshot, steering)
from .ga import GaConfig, crossover, fitness, init_population, mutate, synthesize_group, synthesize_ruler
from .kernels import BACKEND
from .ranging import (PDoA, ToA, distance_from_omega, expand_to_measures,
                      omega_from_distance, sample_marks)
from .rulers import (MarkConstraint, MeasureSet, Ruler, RulerGroup, check_group,
                     forbidden_count, is_golomb, measure_set)

__version__ = "0.1.0"
