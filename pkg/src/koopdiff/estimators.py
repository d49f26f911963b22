"""Two routes to the autocorrelation ``c_n = <U^n f, f>``: Monte Carlo over
the invariant measure and self-correlation of one orbit window; plus the
exact finite-system evaluation and the smearing map ``phi -> sum phi(n) U^n f``."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.fft import next_fast_len

from .algebra import PosDefSequence, TestFunction, convolve, involute
from .seeding import derive_rng
from .systems import FiniteCyclic, Observable, SampledSignal, System, orbit_samples

MC_CHUNK = 4096


class PreconditionError(ValueError):
    """Raised when inputs violate an operation's stated preconditions."""


@dataclass(frozen=True)
class EstimatorParams:
    """Lag window, orbit length and Monte Carlo budget.

    ``compare_lag`` bounds the Monte Carlo window (and the two-route
    comparison); it defaults to ``max_lag``.
    """

    max_lag: int = 50
    orbit_length: int = 100_000
    mc_samples: int = 100_000
    seed: int = 0
    compare_lag: int | None = None
    normalization: str = "biased"
    workers: int = 1
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.max_lag < 0:
            raise PreconditionError("max_lag must be nonnegative")
        if self.max_lag > self.orbit_length / 10:
            raise PreconditionError(
                f"max lag K={self.max_lag} exceeds N/10 for orbit length N={self.orbit_length}")
        if self.mc_samples < 100:
            raise PreconditionError("mc_samples must be at least 100")
        if self.normalization != "biased":
            raise PreconditionError("only the biased (divide by N) normalization is supported")
        if self.compare_lag is not None and self.compare_lag > self.max_lag:
            raise PreconditionError("compare_lag cannot exceed max_lag")

    @property
    def mc_lag(self) -> int:
        return self.max_lag if self.compare_lag is None else self.compare_lag

    def tol(self, name: str, default: float) -> float:
        return float(self.tolerances.get(name, default))


def empirical_autocorrelation(signal: SampledSignal, K: int) -> PosDefSequence:
    """``c_k = (1/N) sum_n x[n+|k|] conj(x[n])`` via a zero-padded FFT."""
    x = np.asarray(signal.values, dtype=np.complex128)
    N = x.size
    if K > N / 10:
        raise PreconditionError(f"max lag K={K} exceeds N/10 for N={N}")
    nfft = next_fast_len(N + K + 1)
    F = np.fft.fft(x, nfft)
    r = np.fft.ifft(F * np.conj(F))[:K + 1] / N
    return PosDefSequence.from_nonnegative(
        r, window_length=N, provenance={"route": "orbit", "N": N})


def periodic_autocorrelation(signal: SampledSignal, K: int, period: int) -> PosDefSequence:
    """Autocorrelation of a periodic sampling function, exact from one period."""
    x = np.asarray(signal.values[:period], dtype=np.complex128)
    if x.size < period:
        raise PreconditionError("signal shorter than one period")
    out = np.empty(K + 1, dtype=np.complex128)
    for k in range(K + 1):
        out[k] = np.dot(np.roll(x, -k), np.conj(x)) / period
    return PosDefSequence.from_nonnegative(out, provenance={"route": "orbit-periodic",
                                                            "period": period})


def orbit_coefficients(spec: System, f: Observable, params: EstimatorParams) -> PosDefSequence:
    """Diffraction-side route: one sampled point, one orbit window."""
    rng = derive_rng(params.seed, "orbit", f.name)
    x = spec.sample_state(rng, params.orbit_length)
    sig = orbit_samples(spec, f, x, params.orbit_length)
    c = empirical_autocorrelation(sig, params.max_lag)
    c.provenance.update(state=sig.origin)
    return c


def spectral_coefficients_mc(spec: System, f: Observable, params: EstimatorParams,
                             max_lag: int | None = None) -> PosDefSequence:
    """``c_n ~ (1/M) sum_i f(alpha_{-n} x_i) conj f(x_i)`` with ``x_i ~ m``.

    Each sample is a window ``-K..K``; ``c_n`` and ``conj(c_{-n})`` are
    averaged.  Samples are processed in fixed chunks with per-chunk seeds,
    and chunk sums are reduced in chunk order, so the result does not
    depend on ``params.workers``.
    """
    K = params.mc_lag if max_lag is None else max_lag
    M = params.mc_samples
    spec.check_observable(f)
    horizon = max(params.orbit_length, 2 * K + 1)
    sizes = [min(MC_CHUNK, M - s) for s in range(0, M, MC_CHUNK)]

    def chunk(i):
        rng = derive_rng(params.seed, "mc", f.name, i)
        W = spec.orbit_batch(f, rng, sizes[i], 2 * K + 1, horizon)
        prod = W * np.conj(W[:, K:K + 1])  # lag n sits in column K + n
        return prod.sum(axis=0), (np.abs(prod) ** 2).sum(axis=0)

    if params.workers > 1:
        with ThreadPoolExecutor(params.workers) as ex:
            parts = list(ex.map(chunk, range(len(sizes))))
    else:
        parts = [chunk(i) for i in range(len(sizes))]
    s1 = np.zeros(2 * K + 1, dtype=np.complex128)
    s2 = np.zeros(2 * K + 1)
    for a, b in parts:
        s1 += a
        s2 += b
    mean = s1 / M
    var = np.maximum(s2 / M - np.abs(mean) ** 2, 0.0)
    sym = 0.5 * (mean + np.conj(mean[::-1]))
    sym[K] = sym[K].real
    se = np.sqrt(var / M)
    se = 0.5 * np.sqrt(se ** 2 + se[::-1] ** 2)
    return PosDefSequence(sym, stderr=se,
                          provenance={"route": "monte-carlo", "M": M})


def exact_coefficients_finite(spec: FiniteCyclic, f: Observable,
                              max_lag: int | None = None) -> PosDefSequence:
    """``c_n = sum_x m(x) f(alpha_{-n} x) conj f(x)`` by enumeration."""
    if not isinstance(spec, FiniteCyclic):
        raise PreconditionError("exact coefficients need a finite cyclic system")
    K = spec.n if max_lag is None else max_lag
    w = spec.probabilities
    table = np.array([spec.orbit(f, x, 2 * K + 1) for x in
                      (spec.shift(s, -K) for s in spec.states())])
    # row for start state s holds f(alpha_{-n} s) at column K + n
    c = (w[:, None] * table * np.conj(table[:, K:K + 1])).sum(axis=0)
    return PosDefSequence(c, provenance={"route": "exact", "n": spec.n})


def nmap_apply(phi: TestFunction, f: Observable, spec: System, x) -> complex:
    """``(sum_n phi(n) U^n f)(x) = sum_n phi(n) f(alpha_{-n} x)``."""
    if phi.is_zero:
        return 0j
    vals = spec.orbit(f, spec.shift(x, phi.offset), phi.coefficients.size)
    return complex(np.dot(phi.coefficients, vals))


def gamma_pairing(c: PosDefSequence, phi: TestFunction, psi: TestFunction) -> complex:
    """``sum_n c(n) (phi * involute(psi))(n)``."""
    h = convolve(phi, involute(psi))
    if h.is_zero:
        return 0j
    lags = np.arange(h.offset, h.offset + h.coefficients.size)
    if np.any(np.abs(lags) > c.max_lag):
        raise PreconditionError("test function supports too wide for the coefficient window")
    return complex(np.dot(c.coefficients[lags + c.max_lag], h.coefficients))


def nmap_inner_product(phi: TestFunction, psi: TestFunction, f: Observable, spec: System,
                       params: EstimatorParams | None = None) -> complex:
    """``<N(phi), N(psi)>``: exact on finite systems, Monte Carlo otherwise."""
    if isinstance(spec, FiniteCyclic):
        gx = np.array([nmap_apply(phi, f, spec, x) for x in spec.states()])
        hx = np.array([nmap_apply(psi, f, spec, x) for x in spec.states()])
        return complex(np.dot(spec.probabilities, gx * np.conj(hx)))
    if params is None:
        raise PreconditionError("sampled systems need estimator parameters")
    lo = min(phi.offset, psi.offset)
    hi = max(phi.support.stop, psi.support.stop)
    rng = derive_rng(params.seed, "n3", f.name)
    # g and h evaluated at the same m-distributed points
    base = spec.orbit_batch(f, rng, params.mc_samples, hi - lo, params.orbit_length)
    gv = base[:, phi.offset - lo:phi.support.stop - lo] @ phi.coefficients
    hv = base[:, psi.offset - lo:psi.support.stop - lo] @ psi.coefficients
    return complex(np.mean(gv * np.conj(hv)))


def n3_residual(c: PosDefSequence, phi: TestFunction, psi: TestFunction, spec: System,
                f: Observable, params: EstimatorParams | None = None) -> float:
    """``|gamma(phi * involute(psi)) - <N(phi), N(psi)>|``."""
    K2 = c.max_lag // 2
    for t in (phi, psi):
        if not t.is_zero and (t.offset < -K2 or t.support.stop - 1 > K2):
            raise PreconditionError("supports must lie in [-K/2, K/2]")
    lhs = gamma_pairing(c, phi, psi)
    rhs = nmap_inner_product(phi, psi, f, spec, params)
    return abs(lhs - rhs)

