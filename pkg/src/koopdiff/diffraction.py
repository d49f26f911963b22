"""Coefficient windows to torus measures: atom extraction, Fejér-smoothed
continuous remainder, and measure comparison."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import (EXACT_TOL, PosDefSequence, TorusMeasure, atom_scan, bochner_density,
                      wiener_pp_energy)
from .estimators import EstimatorParams, orbit_coefficients, spectral_coefficients_mc
from .systems import Observable, System

DEFAULT_GRID = 4096


class OverDetectionError(ValueError):
    """Detected atoms carry more mass than the whole measure."""


def diffraction_measure(c: PosDefSequence, grid: int = DEFAULT_GRID, kernel_order: int | None = None,
                        atom_threshold: float | None = None) -> TorusMeasure:
    """Atoms first, then the Fejér density of the remainder.

    The atom part is subtracted from the coefficients (with the estimator's
    taper, if any) before smoothing, so atoms do not leak into the density.
    Negative density samples are clipped to zero; the clipped mass is
    recorded as ``metadata["clipped_mass"]``.
    """
    K = c.max_lag
    L = K if kernel_order is None else kernel_order
    if L > K:
        raise ValueError(f"kernel order {L} exceeds window {K}")
    c0 = c.c0
    tau = 0.05 * c0 if atom_threshold is None else atom_threshold
    if tau <= 0:
        raise ValueError("atom threshold must be positive")
    atoms = atom_scan(c, tau, grid) if K >= 1 else []
    freqs = np.array([a for a, _ in atoms])
    masses = np.array([m for _, m in atoms])
    if masses.sum() > c0 * (1 + EXACT_TOL) + EXACT_TOL:
        raise OverDetectionError(
            f"atom masses {masses.sum():.6g} exceed total mass {c0:.6g}")
    n = c.lags
    atomic = np.exp(2j * np.pi * np.outer(n, freqs)) @ masses if atoms else np.zeros(n.size)
    residual = PosDefSequence(c.coefficients - c.taper() * atomic)
    dens = bochner_density(residual, max(grid, 4 * L), L)
    clipped = float(-np.minimum(dens, 0.0).mean())
    dens = np.maximum(dens, 0.0)
    meta = {"K": K, "L": L, "grid": int(dens.size), "tau": float(tau),
            "clipped_mass": clipped,
            "mass_mismatch": float(c0 - masses.sum() - dens.mean())}
    meta.update({k: v for k, v in c.provenance.items() if isinstance(v, (int, float, str))})
    return TorusMeasure(freqs, masses, dens, L, c0, metadata=meta)


def compare_measures(a: TorusMeasure, b: TorusMeasure, lag_horizon: int):
    """``(sup_{|n|<=K} |a^(n) - b^(n)|, sup_xi |F_a(xi) - F_b(xi)|)``."""
    da = np.max(np.abs(a.fourier_coefficients(lag_horizon) - b.fourier_coefficients(lag_horizon)))
    G = max(a.grid, b.grid, 1)
    pts = np.arange(G) / G
    # also probe just below each atom so that jumps are seen from both sides
    eps = 0.25 / G
    extra = np.concatenate([a.atom_frequencies, b.atom_frequencies])
    pts = np.unique(np.concatenate([pts, extra, np.mod(extra - eps, 1.0)]))
    dc = np.max(np.abs(a.cdf(pts) - b.cdf(pts)))
    return float(da), float(dc)


def classify_measure(pp_energy: float, atomic_mass: float, total_mass: float,
                     tol: float = 0.05) -> str:
    """Coarse label from the Wiener energy and the detected atom mass."""
    if total_mass <= 0:
        return "zero"
    if atomic_mass >= (1 - tol) * total_mass:
        return "pure-point"
    if atomic_mass <= tol * total_mass and pp_energy <= tol * total_mass ** 2:
        return "continuous"
    return "mixed"


@dataclass
class SpectrumReport:
    system: dict
    observable: dict
    orbit: PosDefSequence
    monte_carlo: PosDefSequence
    orbit_measure: TorusMeasure
    mc_measure: TorusMeasure
    coeff_distance: float
    cdf_distance: float
    coefficient_sup_difference: float
    pp_energy: float
    classification: str
    params: dict = field(default_factory=dict)

    def summary(self) -> dict:
        return {
            "system": self.system,
            "observable": self.observable,
            "params": self.params,
            "c0": self.orbit.c0,
            "atoms": [[x, m] for x, m in self.orbit_measure.atoms],
            "mc_atoms": [[x, m] for x, m in self.mc_measure.atoms],
            "pp_energy": self.pp_energy,
            "coeff_sup_distance": self.coeff_distance,
            "cdf_distance": self.cdf_distance,
            "two_estimator_sup_difference": self.coefficient_sup_difference,
            "classification": self.classification,
            "clipped_mass": self.orbit_measure.metadata.get("clipped_mass", 0.0),
        }


def spectrum_report(spec: System, f: Observable, params: EstimatorParams,
                    grid: int = DEFAULT_GRID, kernel_order: int | None = None,
                    atom_threshold: float | None = None) -> SpectrumReport:
    """Orbit route and Monte Carlo route side by side.

    The orbit window ``params.max_lag`` drives the Wiener statistics and the
    orbit measure; the Monte Carlo window is ``params.mc_lag`` and the two
    measures are compared on that horizon.
    """
    c_orb = orbit_coefficients(spec, f, params)
    c_mc = spectral_coefficients_mc(spec, f, params)
    Kc = params.mc_lag
    L = min(Kc if kernel_order is None else kernel_order, params.max_lag)
    tau = None if atom_threshold is None else atom_threshold
    m_orb = diffraction_measure(c_orb, grid, L, tau)
    m_mc = diffraction_measure(c_mc, grid, min(L, Kc), tau)
    da, dc = compare_measures(m_orb, m_mc, min(Kc, L))
    diff = float(np.max(np.abs(c_orb.truncate(Kc).coefficients - c_mc.coefficients)))
    pp = wiener_pp_energy(c_orb)
    label = classify_measure(pp, m_orb.atomic_mass(), c_orb.c0)
    return SpectrumReport(spec.describe(), f.describe(), c_orb, c_mc, m_orb, m_mc, da, dc, diff,
                          pp, label,
                          params={"max_lag": params.max_lag, "compare_lag": Kc,
                                  "orbit_length": params.orbit_length,
                                  "mc_samples": params.mc_samples, "seed": params.seed,
                                  "grid": grid, "kernel_order": L})
