"""Function-dynamical-system factors ``x -> (t -> f(alpha_{-t} x))`` and the
identities relating their autocorrelation and diffraction to spectral data.

Factors are represented by the generating observable plus window
evaluations; the factor space itself is never materialized.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .algebra import PosDefSequence, TestFunction, convolve, involute
from .estimators import (EstimatorParams, PreconditionError, exact_coefficients_finite,
                         nmap_apply, orbit_coefficients, spectral_coefficients_mc)
from .seeding import derive_rng
from .systems import FiniteCyclic, Observable, System


@dataclass(frozen=True)
class FactorPoint:
    """``window[t + W] = f(alpha_{-t} x)`` for ``t = -W..W``."""

    window: np.ndarray
    center_state: Any
    W: int

    def __call__(self, t: int) -> complex:
        if abs(t) > self.W:
            raise KeyError(t)
        return complex(self.window[t + self.W])


def factor_point(spec: System, f: Observable, x, W: int) -> FactorPoint:
    if W < 0:
        raise PreconditionError("W must be >= 0")
    spec.check_observable(f)
    return FactorPoint(spec.orbit(f, spec.shift(x, -W), 2 * W + 1), x, W)


def _van_hove_autocorrelation(y: np.ndarray, K: int) -> np.ndarray:
    # (1/|B|) (mu|_B * mu|_B~)(k) on B = [-W, W], by direct lag sums
    n = y.size
    out = np.empty(K + 1, dtype=np.complex128)
    for k in range(K + 1):
        out[k] = np.vdot(y[:n - k], y[k:]) / n
    return out


def factor_autocorrelation(spec: System, f: Observable, params: EstimatorParams) -> PosDefSequence:
    """Autocorrelation of the factor ``(X^f, Phi^f(m))``.

    For finite systems the push-forward measure is a finite sum of factor
    points and the autocorrelation is integrated exactly:
    ``sum_x m(x) Phi_x(k) conj(Phi_x(0))``.  Otherwise one factor point is
    drawn (the same point as the orbit route) and its restriction to the
    van Hove box ``[-W, W]`` with ``2W + 1 = N`` is self-correlated.
    """
    K = params.max_lag
    if isinstance(spec, FiniteCyclic):
        pts = [factor_point(spec, f, x, K) for x in spec.states()]
        c = sum(w * p.window * np.conj(p(0)) for w, p in zip(spec.probabilities, pts))
        return PosDefSequence(c, provenance={"route": "factor-exact"})
    rng = derive_rng(params.seed, "orbit", f.name)
    x = spec.sample_state(rng, params.orbit_length)
    W = (params.orbit_length - 1) // 2
    y = factor_point(spec, f, spec.shift(x, W), W).window
    return PosDefSequence.from_nonnegative(
        _van_hove_autocorrelation(y, K), window_length=y.size,
        provenance={"route": "factor", "W": W})


def reflected_autocovariance(phi: TestFunction) -> TestFunction:
    """``m -> (phi * involute(phi))(-m)``."""
    h = convolve(phi, involute(phi))
    if h.is_zero:
        return h
    return TestFunction(-(h.offset + h.coefficients.size - 1), h.coefficients[::-1])


def smeared_coefficients(c: PosDefSequence, phi: TestFunction, K: int) -> np.ndarray:
    """``(gamma * (phi * involute(phi))^r)(n)`` for ``|n| <= K``.

    This is ``sum_{k,l} phi(k) conj(phi(l)) c_{n+k-l}``, the autocorrelation
    of ``sum_k phi(k) U^k f``; it needs ``c`` up to lag ``K + diam(supp phi)``.
    """
    r = reflected_autocovariance(phi)
    out = np.zeros(2 * K + 1, dtype=np.complex128)
    if r.is_zero:
        return out
    n = np.arange(-K, K + 1)
    for m, v in zip(r.support, r.coefficients):
        lag = n - m
        if np.any(np.abs(lag) > c.max_lag):
            raise PreconditionError("coefficient window too short for this test function")
        out += v * c.coefficients[lag + c.max_lag]
    return out


def tmds_factor_identity_residual(spec: System, f: Observable, phi: TestFunction,
                                  params: EstimatorParams, gamma: PosDefSequence | None = None,
                                  ) -> float:
    """``sup_{|n|<=K} |LHS_n - RHS_n|`` for the smeared-factor identity.

    LHS: ``gamma`` convolved with the reflected autocovariance of ``phi``.
    RHS: ``<U^n g, g>`` for ``g = sum phi(k) U^k f``, exact on finite systems
    and Monte Carlo otherwise.  ``gamma`` defaults to the exact coefficients
    (finite) or the orbit estimate of ``f``.
    """
    K = params.mc_lag
    if phi.is_zero:
        return 0.0
    width = phi.coefficients.size - 1
    g = Observable.smeared(f, phi)
    if isinstance(spec, FiniteCyclic):
        if gamma is None:
            gamma = exact_coefficients_finite(spec, f, K + width)
        table = Observable.from_table([nmap_apply(phi, f, spec, x) for x in spec.states()])
        rhs = exact_coefficients_finite(spec, table, K).coefficients
    else:
        if gamma is None:
            gamma = orbit_coefficients(spec, f, EstimatorParams(
                max_lag=max(params.max_lag, K + width), orbit_length=params.orbit_length,
                mc_samples=params.mc_samples, seed=params.seed))
            gamma = PosDefSequence(gamma.debiased())
        rhs = spectral_coefficients_mc(spec, g, params, max_lag=K).coefficients
    lhs = smeared_coefficients(gamma, phi, K)
    return float(np.max(np.abs(lhs - rhs)))


def correspondence_check(spec: System, f: Observable, samples: int, seed: int = 0) -> bool:
    """``Phi^f_x(0) == f(x)`` exactly on sampled (or, for finite systems, all) states."""
    if samples < 1:
        raise PreconditionError("samples must be >= 1")
    if isinstance(spec, FiniteCyclic) and samples >= spec.n:
        states = list(spec.states())
    else:
        rng = derive_rng(seed, "correspondence")
        states = [spec.sample_state(rng, 1024) for _ in range(samples)]
    return all(factor_point(spec, f, x, 0)(0) == _direct_value(spec, f, x) for x in states)


def _direct_value(spec: System, f: Observable, x) -> complex:
    # pointwise evaluation through the state itself, not through an orbit window
    if f.kind == "smeared":
        return nmap_apply(f.phi, f.base, spec, x)
    if f.kind == "constant":
        return f.value - f.center
    if f.kind == "table":
        return f.table[x] - f.center
    if f.kind == "character":
        if isinstance(spec, FiniteCyclic):
            return complex(np.exp(2j * np.pi * f.k * x / spec.n)) - f.center
        return complex(np.exp(2j * np.pi * f.k * x)) - f.center
    lo, hi = f.span()
    sym = spec.symbols(x, lo, hi)
    if f.kind == "letter":
        return dict(f.weights)[spec.alphabet[sym[0]]] - f.center
    word = tuple(spec.alphabet[s] for s in sym)
    return (1.0 if word == f.word else 0.0) - f.center
