"""Finitely supported sequences on the integers, positive definite
coefficient windows and their Bochner measures on the torus.

The torus is parameterized by ``xi`` in [0, 1) through ``z = exp(2 pi i xi)``;
a coefficient window ``c_n`` is read as ``c_n = integral of z**n``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

EXACT_TOL = 1e-9
STAT_TOL = 5e-2

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True, eq=False)
class TestFunction:
    """Finitely supported complex function on the integers.

    ``coefficients[i]`` is the value at ``offset + i``.  Instances are kept
    canonical: no zero coefficient at either end, and the zero function is
    stored with an empty coefficient array and offset 0.
    """

    offset: int
    coefficients: np.ndarray

    __test__ = False  # not a pytest class

    def __post_init__(self):
        coef = np.asarray(self.coefficients, dtype=np.complex128).ravel()
        nz = np.flatnonzero(coef)
        if nz.size == 0:
            coef, offset = coef[:0], 0
        else:
            offset = int(self.offset) + int(nz[0])
            coef = coef[nz[0]:nz[-1] + 1]
        coef = coef.copy()
        coef.setflags(write=False)
        object.__setattr__(self, "coefficients", coef)
        object.__setattr__(self, "offset", offset)

    @classmethod
    def delta(cls, n: int, value: complex = 1.0) -> TestFunction:
        return cls(n, np.array([value]))

    @classmethod
    def from_dict(cls, values: Mapping[int, complex]) -> TestFunction:
        if not values:
            return cls(0, np.zeros(0))
        lo, hi = min(values), max(values)
        coef = np.zeros(hi - lo + 1, dtype=np.complex128)
        for k, v in values.items():
            coef[k - lo] += v
        return cls(lo, coef)

    @property
    def is_zero(self) -> bool:
        return self.coefficients.size == 0

    @property
    def support(self) -> range:
        return range(self.offset, self.offset + self.coefficients.size)

    def __call__(self, n: int) -> complex:
        i = n - self.offset
        if 0 <= i < self.coefficients.size:
            return complex(self.coefficients[i])
        return 0j

    def __eq__(self, other):
        if not isinstance(other, TestFunction):
            return NotImplemented
        return self.offset == other.offset and np.array_equal(
            self.coefficients, other.coefficients)

    __hash__ = None

    def __add__(self, other: TestFunction) -> TestFunction:
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        lo = min(self.offset, other.offset)
        hi = max(self.support.stop, other.support.stop)
        out = np.zeros(hi - lo, dtype=np.complex128)
        out[self.offset - lo:self.support.stop - lo] += self.coefficients
        out[other.offset - lo:other.support.stop - lo] += other.coefficients
        return TestFunction(lo, out)

    def scale(self, a: complex) -> TestFunction:
        return TestFunction(self.offset, a * self.coefficients)

    def translate(self, n: int) -> TestFunction:
        """The translate ``k -> phi(k - n)``."""
        return TestFunction(self.offset + n, self.coefficients)

    def dense(self, lo: int, hi: int) -> np.ndarray:
        """Values on ``lo..hi`` inclusive."""
        out = np.zeros(hi - lo + 1, dtype=np.complex128)
        for k in self.support:
            if lo <= k <= hi:
                out[k - lo] = self.coefficients[k - self.offset]
        return out

    def l1_norm(self) -> float:
        return float(np.abs(self.coefficients).sum())

    def to_dict(self) -> dict[int, complex]:
        return {k: complex(v) for k, v in zip(self.support, self.coefficients)}


def convolve(phi: TestFunction, psi: TestFunction) -> TestFunction:
    """``(phi * psi)(n) = sum_k phi(n - k) psi(k)``."""
    if phi.is_zero or psi.is_zero:
        return TestFunction(0, np.zeros(0))
    return TestFunction(phi.offset + psi.offset,
                        np.convolve(phi.coefficients, psi.coefficients))


def involute(phi: TestFunction) -> TestFunction:
    """``n -> conj(phi(-n))``."""
    if phi.is_zero:
        return phi
    start = -(phi.offset + phi.coefficients.size - 1)
    return TestFunction(start, np.conj(phi.coefficients[::-1]))


@dataclass(frozen=True, eq=False)
class PosDefSequence:
    """Hermitian coefficient window ``c_{-K..K}``.

    ``window_length`` is set by the orbit estimator: its biased normalization
    tapers lag ``n`` by ``1 - |n|/N``, which the Wiener averages undo.
    ``stderr`` (lags ``-K..K``) is attached by Monte Carlo estimates.
    """

    coefficients: np.ndarray
    stderr: np.ndarray | None = None
    window_length: int | None = None
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        coef = np.asarray(self.coefficients, dtype=np.complex128).ravel().copy()
        if coef.size % 2 != 1:
            raise ValueError("coefficient window must have odd length 2K+1")
        coef.setflags(write=False)
        object.__setattr__(self, "coefficients", coef)
        if self.stderr is not None:
            se = np.asarray(self.stderr, dtype=float).ravel().copy()
            if se.size != coef.size:
                raise ValueError("stderr must cover lags -K..K")
            se.setflags(write=False)
            object.__setattr__(self, "stderr", se)

    @classmethod
    def from_nonnegative(cls, positive_lags: Sequence[complex], **kw) -> PosDefSequence:
        """Hermitian extension of ``c_0..c_K``."""
        pos = np.asarray(positive_lags, dtype=np.complex128)
        pos = pos.copy()
        pos[0] = pos[0].real
        full = np.concatenate([np.conj(pos[:0:-1]), pos])
        se = kw.pop("stderr", None)
        if se is not None:
            se = np.asarray(se, dtype=float)
            if se.size == pos.size:
                se = np.concatenate([se[:0:-1], se])
        return cls(full, stderr=se, **kw)

    @classmethod
    def from_function(cls, fn, max_lag: int, **kw) -> PosDefSequence:
        lags = np.arange(-max_lag, max_lag + 1)
        return cls(np.array([fn(n) for n in lags], dtype=np.complex128), **kw)

    @property
    def max_lag(self) -> int:
        return (self.coefficients.size - 1) // 2

    @property
    def lags(self) -> np.ndarray:
        return np.arange(-self.max_lag, self.max_lag + 1)

    @property
    def c0(self) -> float:
        return float(self.coefficients[self.max_lag].real)

    def __getitem__(self, n: int) -> complex:
        K = self.max_lag
        if abs(n) > K:
            raise KeyError(f"lag {n} outside window |n| <= {K}")
        return complex(self.coefficients[n + K])

    def nonnegative(self) -> np.ndarray:
        return self.coefficients[self.max_lag:]

    def truncate(self, K: int) -> PosDefSequence:
        if K > self.max_lag:
            raise ValueError(f"cannot extend window from {self.max_lag} to {K}")
        s = slice(self.max_lag - K, self.max_lag + K + 1)
        return PosDefSequence(self.coefficients[s],
                              None if self.stderr is None else self.stderr[s],
                              self.window_length, dict(self.provenance))

    def taper(self) -> np.ndarray:
        """Multiplicative bias ``1 - |n|/N`` of the orbit estimator (ones otherwise)."""
        if self.window_length is None:
            return np.ones(self.coefficients.size)
        return 1.0 - np.abs(self.lags) / self.window_length

    def debiased(self) -> np.ndarray:
        return self.coefficients / self.taper()

    def hermitian_defect(self) -> float:
        c = self.coefficients
        return float(np.max(np.abs(c - np.conj(c[::-1]))))

    def check_invariants(self, tol: float = EXACT_TOL) -> None:
        scale = max(1.0, abs(self.c0))
        if self.hermitian_defect() > tol * scale:
            raise ValueError("coefficients are not Hermitian")
        if self.c0 < -tol * scale:
            raise ValueError("c_0 must be nonnegative")
        if np.max(np.abs(self.coefficients)) > self.c0 + tol * scale:
            raise ValueError("|c_n| exceeds c_0")


def quadratic_form(c: PosDefSequence, phi: TestFunction) -> float:
    """``sum_n c(n) (phi * involute(phi))(n)``; needs support diameter <= K."""
    if phi.is_zero:
        return 0.0
    auto = convolve(phi, involute(phi))
    K = c.max_lag
    lags = np.arange(auto.offset, auto.offset + auto.coefficients.size)
    if np.any(np.abs(lags) > K):
        raise ValueError("test function support too wide for the window")
    return float(np.real(np.dot(c.coefficients[lags + K], auto.coefficients)))


def toeplitz_matrix(c: PosDefSequence, size: int) -> np.ndarray:
    """``T[j, k] = c_{j-k}`` for ``0 <= j, k < size``."""
    idx = np.arange(size)
    return c.coefficients[(idx[:, None] - idx[None, :]) + c.max_lag]


def check_positive_definite(c: PosDefSequence, trials: int, rng_seed: int,
                            tol: float | None = None):
    """Smallest normalized quadratic form found, and a witness if negative.

    Random unit-norm test functions supported in ``[-K/2, K/2]`` are tried,
    then the ``(K+1) x (K+1)`` Toeplitz matrix is diagonalized; its smallest
    eigenvalue is the exact minimum over that support.  The witness is
    returned only when the minimum is below ``-tol`` (default ``1e-9 c_0``).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    K = c.max_lag
    if tol is None:
        tol = EXACT_TOL * max(abs(c.c0), 1e-300)
    half = K // 2
    rng = np.random.default_rng(rng_seed)
    best, witness = np.inf, None
    for _ in range(trials):
        v = rng.standard_normal(2 * half + 1) + 1j * rng.standard_normal(2 * half + 1)
        v /= np.linalg.norm(v)
        phi = TestFunction(-half, v)
        q = quadratic_form(c, phi)
        if q < best:
            best, witness = q, phi
    # Q(phi) = v^H T v with v = conj(phi); the supports [-K/2, K/2] and
    # [0, K] give the same form, and the latter uses the whole window.
    vals, vecs = np.linalg.eigh(toeplitz_matrix(c, K + 1))
    if vals[0] < best:
        best, witness = float(vals[0]), TestFunction(0, np.conj(vecs[:, 0]))
    if best >= -tol:
        witness = None
    return float(best), witness


def fejer_weights(L: int) -> np.ndarray:
    """``1 - |n|/(L+1)`` for ``n = -L..L``."""
    n = np.arange(-L, L + 1)
    return 1.0 - np.abs(n) / (L + 1.0)


def _torus_dft(lags: np.ndarray, values: np.ndarray, grid: int) -> np.ndarray:
    """``sum_n values_n exp(-2 pi i n j / grid)`` at ``j = 0..grid-1``."""
    buf = np.zeros(grid, dtype=np.complex128)
    np.add.at(buf, np.mod(lags, grid), values)
    return np.fft.fft(buf)


def bochner_density(c: PosDefSequence, grid: int, kernel_order: int) -> np.ndarray:
    """Fejér-smoothed density of the Bochner measure at ``xi_j = j/grid``."""
    K = c.max_lag
    if kernel_order > K:
        raise ValueError(f"kernel order {kernel_order} exceeds window {K}")
    if grid < 4 * kernel_order:
        raise ValueError("grid must be at least 4 * kernel_order")
    L = kernel_order
    s = slice(K - L, K + L + 1)
    vals = fejer_weights(L) * c.coefficients[s]
    return _torus_dft(np.arange(-L, L + 1), vals, grid).real


def _wiener_sum(coefficients: np.ndarray, K: int, xi) -> np.ndarray:
    # c_0 + 2 Re sum_{n>=1} c_n e^{-2 pi i n xi}, exactly real for Hermitian c
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    pos = coefficients[K + 1:]
    n = np.arange(1, K + 1)
    out = np.empty(xi.shape)
    for i, x in enumerate(xi.ravel()):
        ph = np.exp(-2j * np.pi * n * x)
        out.flat[i] = coefficients[K].real + 2.0 * np.real(np.dot(pos, ph))
    return out


def wiener_atom_mass(c: PosDefSequence, xi):
    """Cesàro average ``(1/(2K+1)) sum_n c_n exp(-2 pi i n xi)``.

    For sequences carrying an orbit window length the taper is divided out
    first.  Accepts a scalar or an array of frequencies.
    """
    K = c.max_lag
    if K < 1:
        raise ValueError("need K >= 1")
    out = _wiener_sum(c.debiased(), K, xi) / (2 * K + 1)
    return float(out[0]) if np.ndim(xi) == 0 else out


def wiener_pp_energy(c: PosDefSequence) -> float:
    """Cesàro average of ``|c_n|^2``; estimates the sum of squared atom masses."""
    K = c.max_lag
    if K < 1:
        raise ValueError("need K >= 1")
    d = c.debiased()
    return float(np.sum(np.abs(d) ** 2) / (2 * K + 1))


def _golden_max(fn, a: float, b: float, tol: float) -> float:
    # golden-section search for the maximum of a unimodal fn on [a, b]
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = fn(x1), fn(x2)
    while b - a > tol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = fn(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = fn(x1)
    return 0.5 * (a + b)


def scan_grid_size(K: int, grid: int) -> int:
    """Grid actually scanned: fine enough to land inside every Wiener main lobe."""
    need = max(grid, 4 * (2 * K + 1))
    return 1 << int(np.ceil(np.log2(need)))


def _wrap(x: float) -> float:
    x = float(x) % 1.0
    return 0.0 if x >= 1.0 else x


def _fit_masses(d: np.ndarray, lags: np.ndarray, freqs: list[float]) -> np.ndarray:
    # real least-squares masses for atoms at fixed frequencies; lag 0 is left
    # out because it carries the whole continuous mass
    keep = lags != 0
    d, lags = d[keep], lags[keep]
    A = np.exp(2j * np.pi * np.outer(lags, freqs))
    sol, *_ = np.linalg.lstsq(np.vstack([A.real, A.imag]), np.concatenate([d.real, d.imag]),
                              rcond=None)
    return sol


def atom_scan(c: PosDefSequence, threshold: float, grid: int,
              max_atoms: int = 256) -> list[tuple[float, float]]:
    """Point masses above ``threshold`` as ``(frequency, mass)`` pairs.

    The Wiener average is evaluated on a grid (refined to at least four points
    per main lobe) and its largest local maximum above the threshold is
    polished by golden-section search.  All accepted atoms are then refitted
    by least squares (and their frequencies re-polished once the scan ends) and removed from the coefficients before the next scan,
    so neither the Dirichlet sidelobes of a strong atom nor the leakage
    between neighbours is reported as mass.  Peaks within ``1/(4K)`` of an
    accepted atom end the scan.
    """
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    K = c.max_lag
    if K < 1:
        raise ValueError("need K >= 1")
    d0 = c.debiased()
    d = d0.copy()
    lags = np.arange(-K, K + 1)
    G = scan_grid_size(K, grid)
    h = 1.0 / G
    radius = 1.0 / (4 * K)
    freqs: list[float] = []
    masses = np.zeros(0)

    def mass(x):
        return float(_wiener_sum(d, K, x)[0] / (2 * K + 1))

    for _ in range(max_atoms):
        values = _torus_dft(lags, d, G).real / (2 * K + 1)
        j = int(np.argmax(values))
        if values[j] <= threshold:
            break
        x = _wrap(_golden_max(mass, j * h - h, j * h + h, tol=1e-3 / (2 * K + 1) / 64))
        if mass(x) <= threshold:
            break
        if any(min(abs(x - y), 1.0 - abs(x - y)) < radius for y in freqs):
            break
        freqs.append(x)
        masses = _fit_masses(d0, lags, freqs)
        d = d0 - np.exp(2j * np.pi * np.outer(lags, freqs)) @ masses
    # coordinate sweeps: re-polish each frequency against the others' residual
    for _ in range(20 if len(freqs) > 1 else 0):
        before = list(freqs)
        for i in range(len(freqs)):
            d = d0 - np.exp(2j * np.pi * np.outer(lags, freqs)) @ masses
            d = d + masses[i] * np.exp(2j * np.pi * lags * freqs[i])
            x0 = freqs[i]
            freqs[i] = _wrap(_golden_max(mass, x0 - h, x0 + h, tol=1e-3 / (2 * K + 1) / 64))
            masses = _fit_masses(d0, lags, freqs)
        moved = max(min(abs(a - b), 1.0 - abs(a - b)) for a, b in zip(freqs, before))
        if moved < 1e-6 / (2 * K + 1):
            break
    while freqs and np.any(masses <= threshold):
        keep = masses > threshold
        freqs = [x for x, k in zip(freqs, keep) if k]
        masses = _fit_masses(d0, lags, freqs) if freqs else np.zeros(0)
    atoms = [(x, float(m)) for x, m in zip(freqs, masses)]
    atoms.sort()
    return atoms


@dataclass(frozen=True, eq=False)
class TorusMeasure:
    """Atoms plus a Fejér-smoothed density sampled at ``j/grid``."""

    atom_frequencies: np.ndarray
    atom_masses: np.ndarray
    density: np.ndarray
    kernel_order: int
    total_mass: float
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        f = np.asarray(self.atom_frequencies, dtype=float).ravel()
        m = np.asarray(self.atom_masses, dtype=float).ravel()
        if f.shape != m.shape:
            raise ValueError("atom frequencies and masses differ in length")
        if np.any(m <= 0):
            raise ValueError("atom masses must be positive")
        if np.any((f < 0) | (f >= 1)):
            raise ValueError("atom frequencies must lie in [0, 1)")
        if np.unique(f).size != f.size:
            raise ValueError("atom frequencies must be distinct")
        d = np.asarray(self.density, dtype=float).ravel()
        order = np.argsort(f)
        for name, arr in (("atom_frequencies", f[order]), ("atom_masses", m[order]),
                          ("density", d)):
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def grid(self) -> int:
        return self.density.size

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return list(zip(self.atom_frequencies.tolist(), self.atom_masses.tolist()))

    def atomic_mass(self) -> float:
        return float(self.atom_masses.sum())

    def density_mass(self) -> float:
        return float(self.density.mean()) if self.grid else 0.0

    def fourier_coefficients(self, K: int) -> np.ndarray:
        """``integral exp(2 pi i n xi)`` for ``n = -K..K`` (atoms + density quadrature)."""
        n = np.arange(-K, K + 1)
        out = np.exp(2j * np.pi * np.outer(n, self.atom_frequencies)) @ self.atom_masses
        if self.grid:
            # inverse DFT gives (1/G) sum_j d_j e^{2 pi i n j / G}
            inv = np.fft.ifft(self.density)
            out = out + inv[np.mod(n, self.grid)]
        return out

    def cdf(self, points: np.ndarray) -> np.ndarray:
        """Mass of ``[0, xi]`` at each point (trapezoid density + atom steps)."""
        points = np.asarray(points, dtype=float)
        G = self.grid
        out = np.zeros(points.shape)
        if G:
            d = np.append(self.density, self.density[0])
            nodes = np.arange(G + 1) / G
            cum = np.concatenate([[0.0], np.cumsum(0.5 * (d[1:] + d[:-1]) / G)])
            out += np.interp(points, nodes, cum)
        idx = np.searchsorted(self.atom_frequencies, points, side="right")
        out += np.concatenate([[0.0], np.cumsum(self.atom_masses)])[idx]
        return out
