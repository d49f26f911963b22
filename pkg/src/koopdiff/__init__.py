"""Spectral measures of Z-dynamical systems computed two ways: by integrating
against the invariant measure, and as the diffraction of a single orbit."""

from .algebra import (PosDefSequence, TestFunction, TorusMeasure, atom_scan, bochner_density,
                      check_positive_definite, convolve, involute, quadratic_form,
                      wiener_atom_mass, wiener_pp_energy)
from .diffraction import (OverDetectionError, classify_measure, compare_measures,
                          diffraction_measure, spectrum_report)
from .estimators import (EstimatorParams, PreconditionError, empirical_autocorrelation,
                         exact_coefficients_finite, gamma_pairing, n3_residual, nmap_apply,
                         nmap_inner_product, orbit_coefficients, periodic_autocorrelation,
                         spectral_coefficients_mc)
from .factors import (correspondence_check, factor_autocorrelation, factor_point,
                      tmds_factor_identity_residual)
from .mean_ap import (CONSISTENT, NOT_MEAN_AP, MeanApParams, classify_discrete_spectrum,
                      eps_almost_periods, mean_seminorm_diff, relative_denseness_gap)
from .pipeline import ConfigError, RunReport, run
from .systems import (BernoulliShift, FiniteCyclic, IrrationalRotation, Observable,
                      SampledSignal, SubstitutionSubshift, orbit_samples, sample_invariant,
                      shift_state)

__version__ = "0.1.0"

__all__ = ["ConfigError", "RunReport", "run", "BernoulliShift", "CONSISTENT", "EstimatorParams", "FiniteCyclic",
           "IrrationalRotation", "MeanApParams", "NOT_MEAN_AP", "Observable",
           "OverDetectionError", "PosDefSequence", "PreconditionError", "SampledSignal",
           "SubstitutionSubshift", "TestFunction", "TorusMeasure", "atom_scan",
           "bochner_density", "check_positive_definite", "classify_discrete_spectrum",
           "classify_measure", "compare_measures", "convolve", "correspondence_check",
           "diffraction_measure", "empirical_autocorrelation", "eps_almost_periods",
           "exact_coefficients_finite", "factor_autocorrelation", "factor_point",
           "gamma_pairing", "involute", "mean_seminorm_diff", "n3_residual", "nmap_apply",
           "nmap_inner_product", "orbit_coefficients", "orbit_samples",
           "periodic_autocorrelation", "quadratic_form", "relative_denseness_gap",
           "sample_invariant", "shift_state", "spectral_coefficients_mc", "spectrum_report",
           "tmds_factor_identity_residual", "wiener_atom_mass", "wiener_pp_energy",
           "__version__"]
