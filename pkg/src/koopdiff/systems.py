"""Integer-indexed dynamical systems with invariant-measure samplers and
bounded continuous observables.

Sign convention: the sampled orbit is ``n -> f(alpha_{-n} x)`` and

* sequence spaces: ``alpha_{-n}`` shifts left by ``n``, so the orbit of a
  letter observable reads ``x_0, x_1, x_2, ...``;
* rotation by ``a``: ``alpha_{-n} xi = xi + n a (mod 1)``, so the character
  ``exp(2 pi i xi)`` has autocorrelation ``exp(2 pi i n a)`` and its spectral
  atom sits at ``a``;
* cyclic group: ``alpha_{-n} x = x - n * step (mod N)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from .algebra import TestFunction

# --------------------------------------------------------------------------
# observables


@dataclass(frozen=True, eq=False)
class Observable:
    """A bounded continuous function on the state space.

    kind is one of ``constant``, ``character`` (``xi -> exp(2 pi i k xi)``),
    ``table`` (values per state of a finite system), ``letter`` (weight of
    the letter at coordinate 0), ``cylinder`` (indicator of a word placed at
    ``offset``) or ``smeared`` (``sum_k phi(k) f(alpha_{-k} x)``).
    ``center`` is subtracted from every value.
    """

    kind: str
    name: str = ""
    value: complex = 1.0
    k: int = 1
    table: tuple = ()
    weights: tuple = ()
    word: tuple = ()
    offset: int = 0
    center: complex = 0.0
    base: Observable | None = None
    phi: TestFunction | None = None

    @classmethod
    def constant(cls, value: complex = 1.0) -> Observable:
        return cls("constant", name="constant", value=complex(value))

    @classmethod
    def character(cls, k: int = 1) -> Observable:
        return cls("character", name="character" if k == 1 else f"character{k}", k=int(k))

    @classmethod
    def from_table(cls, values, name: str = "table") -> Observable:
        return cls("table", name=name, table=tuple(complex(v) for v in values))

    @classmethod
    def letter(cls, weights: Mapping[str, complex], center: complex = 0.0,
               name: str = "letter") -> Observable:
        return cls("letter", name=name, weights=tuple((str(a), complex(v)) for a, v in weights.items()),
                   center=complex(center))

    @classmethod
    def cylinder(cls, word: Sequence[str], offset: int = 0, center: complex = 0.0,
                 name: str = "cylinder") -> Observable:
        return cls("cylinder", name=name, word=tuple(str(a) for a in word), offset=int(offset),
                   center=complex(center))

    @classmethod
    def smeared(cls, base: Observable, phi: TestFunction) -> Observable:
        return cls("smeared", name=f"N[{base.name}]", base=base, phi=phi)

    @property
    def sup_bound(self) -> float:
        c = abs(self.center)
        if self.kind == "constant":
            return abs(self.value)
        if self.kind == "character":
            return 1.0
        if self.kind == "table":
            return max((abs(v) for v in self.table), default=0.0)
        if self.kind == "letter":
            return max(abs(v - self.center) for _, v in self.weights)
        if self.kind == "cylinder":
            return max(abs(1 - self.center), c)
        if self.kind == "smeared":
            return self.phi.l1_norm() * self.base.sup_bound
        raise ValueError(f"unknown observable kind {self.kind!r}")

    def span(self) -> tuple[int, int]:
        """Coordinates touched by a cylinder-type observable, relative to 0."""
        if self.kind == "cylinder":
            return self.offset, self.offset + len(self.word) - 1
        return 0, 0

    def describe(self) -> dict:
        d: dict[str, Any] = {"kind": self.kind, "name": self.name}
        if self.kind == "constant":
            d["value"] = [self.value.real, self.value.imag]
        elif self.kind == "character":
            d["k"] = self.k
        elif self.kind == "table":
            d["values"] = [[v.real, v.imag] for v in self.table]
        elif self.kind == "letter":
            d["weights"] = {a: [v.real, v.imag] for a, v in self.weights}
        elif self.kind == "cylinder":
            d["word"] = list(self.word)
            d["offset"] = self.offset
        elif self.kind == "smeared":
            d["base"] = self.base.describe()
            d["phi"] = {str(k): [v.real, v.imag] for k, v in self.phi.to_dict().items()}
        if self.center:
            d["center"] = [self.center.real, self.center.imag]
        return d


@dataclass(frozen=True)
class SampledSignal:
    """Orbit window: ``values[i] = f(alpha_{-(start + i)} x)``."""

    values: np.ndarray
    origin: Any
    sup_bound: float
    start: int = 0

    @property
    def length(self) -> int:
        return int(self.values.size)


# --------------------------------------------------------------------------
# systems


class System:
    """Common orbit machinery; subclasses provide the state mechanics."""

    kind: str = ""

    # subclass hooks -------------------------------------------------------
    def sample_state(self, rng: np.random.Generator, horizon: int):
        raise NotImplementedError

    def shift(self, state, n: int):
        """``alpha_{-n}`` applied to ``state``."""
        raise NotImplementedError

    def _base_orbit(self, f: Observable, state, length: int) -> np.ndarray:
        raise NotImplementedError

    def _base_batch(self, f: Observable, rng: np.random.Generator, count: int,
                    length: int, horizon: int) -> np.ndarray:
        raise NotImplementedError

    def describe(self) -> dict:
        raise NotImplementedError

    def describe_state(self, state) -> Any:
        return state

    # generic --------------------------------------------------------------
    def check_observable(self, f: Observable) -> None:
        if f.kind == "smeared":
            self.check_observable(f.base)
        elif f.kind not in self.supported_kinds:
            raise ValueError(f"observable kind {f.kind!r} not defined on {self.kind}")

    supported_kinds: tuple[str, ...] = ("constant",)

    def orbit(self, f: Observable, state, length: int) -> np.ndarray:
        if f.kind == "constant":
            return np.full(length, f.value - f.center, dtype=np.complex128)
        if f.kind == "smeared":
            lo = f.phi.offset
            base = self.orbit(f.base, self.shift(state, lo), length + f.phi.coefficients.size - 1)
            return _smear(base, f.phi.coefficients, length)
        return self._base_orbit(f, state, length)

    def orbit_batch(self, f: Observable, rng: np.random.Generator, count: int,
                    length: int, horizon: int) -> np.ndarray:
        """``count`` independent orbit windows with m-distributed start points."""
        if f.kind == "constant":
            return np.full((count, length), f.value - f.center, dtype=np.complex128)
        if f.kind == "smeared":
            base = self.orbit_batch(f.base, rng, count,
                                    length + f.phi.coefficients.size - 1, horizon)
            return _smear(base, f.phi.coefficients, length)
        return self._base_batch(f, rng, count, length, horizon)

    def evaluate(self, f: Observable, state) -> complex:
        """Direct pointwise value ``f(state)``."""
        return complex(self.orbit(f, state, 1)[0])


def _smear(base: np.ndarray, coef: np.ndarray, length: int) -> np.ndarray:
    out = np.zeros(base.shape[:-1] + (length,), dtype=np.complex128)
    for j, a in enumerate(coef):
        out += a * base[..., j:j + length]
    return out


@dataclass(frozen=True, eq=False)
class FiniteCyclic(System):
    """Rotation ``x -> x + step`` on ``Z/N`` with an invariant probability vector."""

    n: int
    step: int = 1
    weights: tuple = ()

    kind = "cyclic"
    supported_kinds = ("constant", "table", "character")

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("N must be positive")
        w = np.full(self.n, 1.0 / self.n) if not self.weights else np.asarray(self.weights, float)
        if w.size != self.n or np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("weights must be a probability vector of length N")
        if not np.allclose(w, np.roll(w, self.step), rtol=0, atol=1e-12):
            raise ValueError("weights are not invariant under the rotation")
        object.__setattr__(self, "weights", tuple(float(v) for v in w))

    @property
    def probabilities(self) -> np.ndarray:
        return np.asarray(self.weights)

    def sample_state(self, rng, horizon=0):
        return int(rng.choice(self.n, p=self.probabilities))

    def shift(self, state, n):
        return int((state - n * self.step) % self.n)

    def states(self) -> range:
        return range(self.n)

    def _values(self, f: Observable, idx: np.ndarray) -> np.ndarray:
        if f.kind == "table":
            if len(f.table) != self.n:
                raise ValueError("table observable has the wrong length")
            vals = np.asarray(f.table, dtype=np.complex128)[idx]
        elif f.kind == "character":
            vals = np.exp(2j * np.pi * f.k * idx / self.n)
        else:
            raise ValueError(f"observable kind {f.kind!r} not defined on cyclic systems")
        return vals - f.center

    def _base_orbit(self, f, state, length):
        idx = (state - self.step * np.arange(length)) % self.n
        return self._values(f, idx)

    def _base_batch(self, f, rng, count, length, horizon):
        x0 = rng.choice(self.n, size=count, p=self.probabilities)
        idx = (x0[:, None] - self.step * np.arange(length)[None, :]) % self.n
        return self._values(f, idx)

    def describe(self):
        return {"kind": "cyclic", "n": self.n, "step": self.step, "weights": list(self.weights)}


def golden_mean(depth: int = 60) -> float:
    """``(sqrt 5 - 1)/2`` from its continued-fraction convergent ``F_k / F_{k+1}``."""
    p, q = 1, 1
    for _ in range(depth):
        p, q = q, p + q
    return float(Fraction(p, q))


@dataclass(frozen=True, eq=False)
class IrrationalRotation(System):
    """Rotation of the circle ``[0, 1)`` by an irrational ``alpha``."""

    alpha: float = field(default_factory=golden_mean)
    label: str = "golden"

    kind = "rotation"
    supported_kinds = ("constant", "character")

    def __post_init__(self):
        a = float(self.alpha)
        if not 0.0 < a < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        approx = Fraction(a).limit_denominator(1000)
        if abs(a - approx) < 1e-12:
            raise ValueError(f"alpha = {a!r} is the rational {approx}")
        near = Fraction(a).limit_denominator(100)
        if abs(a - near) < 1e-6:
            warnings.warn(f"alpha is within 1e-6 of {near}; atoms will be poorly separated",
                          stacklevel=3)
        object.__setattr__(self, "alpha", a)

    def sample_state(self, rng, horizon=0):
        return float(rng.random())

    def shift(self, state, n):
        return float((state + n * self.alpha) % 1.0)

    def _phases(self, xi, length):
        n = np.arange(length, dtype=np.float64)
        return np.mod(xi + np.mod(n * self.alpha, 1.0), 1.0)

    def _values(self, f, phase):
        if f.kind != "character":
            raise ValueError(f"observable kind {f.kind!r} not defined on the rotation")
        return np.exp(2j * np.pi * f.k * phase) - f.center

    def _base_orbit(self, f, state, length):
        return self._values(f, self._phases(state, length))

    def _base_batch(self, f, rng, count, length, horizon):
        xi = rng.random(count)
        n = np.mod(np.arange(length, dtype=np.float64) * self.alpha, 1.0)
        return self._values(f, np.mod(xi[:, None] + n[None, :], 1.0))

    def describe(self):
        return {"kind": "rotation", "alpha": self.alpha, "label": self.label}


class _SymbolicSystem(System):
    """Shared evaluation of letter and cylinder observables on symbol windows."""

    alphabet: tuple = ()
    supported_kinds = ("constant", "letter", "cylinder")

    def letter_index(self, letter: str) -> int:
        try:
            return self.alphabet.index(letter)
        except ValueError:
            raise ValueError(f"letter {letter!r} not in alphabet {self.alphabet}") from None

    def _span(self, f: Observable) -> tuple[int, int]:
        return f.span()

    def _apply(self, f: Observable, sym: np.ndarray, length: int) -> np.ndarray:
        # sym[..., 0] is coordinate span()[0] relative to the first orbit point
        lo, hi = f.span()
        if f.kind == "letter":
            table = np.zeros(len(self.alphabet), dtype=np.complex128)
            for a, v in f.weights:
                table[self.letter_index(a)] = v
            return table[sym[..., -lo:-lo + length] if lo else sym[..., :length]] - f.center
        if f.kind == "cylinder":
            hit = np.ones(sym.shape[:-1] + (length,), dtype=bool)
            for j, a in enumerate(f.word):
                hit &= sym[..., j:j + length] == self.letter_index(a)
            return hit.astype(np.complex128) - f.center
        raise ValueError(f"observable kind {f.kind!r} not defined on {self.kind}")

    def symbols(self, state, lo: int, hi: int) -> np.ndarray:
        """Letter codes at coordinates ``lo..hi`` (relative to ``state``)."""
        raise NotImplementedError

    def _base_orbit(self, f, state, length):
        lo, hi = f.span()
        return self._apply(f, self.symbols(state, lo, length - 1 + hi), length)


@dataclass(frozen=True)
class BernoulliPoint:
    """Lazily materialized i.i.d. configuration seen from coordinate ``offset``."""

    key: int
    offset: int = 0


_BLOCK = 1 << 14


@dataclass(frozen=True, eq=False)
class BernoulliShift(_SymbolicSystem):
    alphabet: tuple = ("+", "-")
    probabilities: tuple = (0.5, 0.5)

    kind = "bernoulli"

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if p.size != len(self.alphabet) or np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
            raise ValueError("probabilities must form a simplex vector over the alphabet")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValueError("alphabet letters must be distinct")
        object.__setattr__(self, "alphabet", tuple(str(a) for a in self.alphabet))
        object.__setattr__(self, "probabilities", tuple(float(v) for v in p))

    def sample_state(self, rng, horizon=0):
        return BernoulliPoint(int(rng.integers(0, 2**63 - 1)), 0)

    def shift(self, state, n):
        return BernoulliPoint(state.key, state.offset + n)

    def _block(self, key: int, b: int) -> np.ndarray:
        return _bernoulli_block(key, b, self.probabilities)

    def symbols(self, state, lo, hi):
        a, z = state.offset + lo, state.offset + hi
        b0, b1 = a // _BLOCK, z // _BLOCK
        data = np.concatenate([self._block(state.key, b) for b in range(b0, b1 + 1)])
        return data[a - b0 * _BLOCK:z - b0 * _BLOCK + 1]

    def _base_batch(self, f, rng, count, length, horizon):
        lo, hi = f.span()
        sym = rng.choice(len(self.alphabet), size=(count, length + hi - lo),
                         p=np.asarray(self.probabilities)).astype(np.int8)
        return self._apply(f, sym, length)

    def letter_frequencies(self) -> np.ndarray:
        return np.asarray(self.probabilities)

    def describe(self):
        return {"kind": "bernoulli", "alphabet": list(self.alphabet),
                "probabilities": list(self.probabilities)}

    def describe_state(self, state):
        return {"key": state.key, "offset": state.offset}


@lru_cache(maxsize=256)
def _bernoulli_block(key: int, b: int, probabilities: tuple) -> np.ndarray:
    zig = 2 * b if b >= 0 else -2 * b - 1
    rng = np.random.default_rng(np.random.SeedSequence([key, zig]))
    out = rng.choice(len(probabilities), size=_BLOCK, p=np.asarray(probabilities)).astype(np.int8)
    out.setflags(write=False)
    return out


# --------------------------------------------------------------------------
# substitutions

BUILTIN_RULES = {
    "fibonacci": (("a", "ab"), ("b", "a")),
    "thue-morse": (("a", "ab"), ("b", "ba")),
    "period-doubling": (("a", "ab"), ("b", "aa")),
}


def _normalize_rule(rule) -> tuple[tuple[str, str], ...]:
    items = rule.items() if isinstance(rule, Mapping) else rule
    out = tuple((str(a), "".join(str(s) for s in w)) for a, w in items)
    letters = [a for a, _ in out]
    if len(set(letters)) != len(letters):
        raise ValueError("duplicate letter in substitution rule")
    for _, w in out:
        if not w or any(s not in letters for s in w):
            raise ValueError("substitution images must be nonempty words over the alphabet")
    return out


def substitution_matrix(rule) -> np.ndarray:
    """``M[a, b]`` = number of letters ``a`` in the image of ``b``."""
    rule = _normalize_rule(rule)
    letters = [a for a, _ in rule]
    M = np.zeros((len(letters), len(letters)), dtype=np.int64)
    for j, (_, w) in enumerate(rule):
        for s in w:
            M[letters.index(s), j] += 1
    return M


def is_primitive(rule) -> bool:
    M = substitution_matrix(rule)
    A = M.shape[0]
    P = (M > 0).astype(np.int64)
    Q = P.copy()
    for _ in range((A - 1) ** 2 + 1):
        if np.all(Q > 0):
            return True
        Q = ((Q @ P) > 0).astype(np.int64)
    return bool(np.all(Q > 0))


def perron_frequencies(rule) -> tuple[float, np.ndarray]:
    """Perron eigenvalue and the normalized letter-frequency eigenvector."""
    M = substitution_matrix(rule).astype(float)
    vals, vecs = np.linalg.eig(M)
    i = int(np.argmax(vals.real))
    v = np.abs(vecs[:, i].real)
    return float(vals[i].real), v / v.sum()


class _Tables:
    def __init__(self, rule):
        self.letters = [a for a, _ in rule]
        words = [w for _, w in rule]
        self.lens = np.array([len(w) for w in words], dtype=np.int64)
        self.img = np.zeros((len(words), self.lens.max()), dtype=np.int8)
        for i, w in enumerate(words):
            self.img[i, :len(w)] = [self.letters.index(s) for s in w]

    def apply(self, seq: np.ndarray, times: int = 1) -> np.ndarray:
        for _ in range(times):
            ls = self.lens[seq]
            ends = np.cumsum(ls)
            starts = ends - ls
            out = np.empty(int(ends[-1]), dtype=np.int8)
            for j in range(self.img.shape[1]):
                mask = ls > j
                out[starts[mask] + j] = self.img[seq[mask], j]
            seq = out
        return seq


def _word_power(tables: _Tables, letter: int, m: int) -> np.ndarray:
    return tables.apply(np.array([letter], dtype=np.int8), m)


def _fixed_point_seed(tables: _Tables) -> tuple[int, int]:
    """(letter, power m) with sigma^m(letter) starting with letter."""
    A = len(tables.letters)
    for m in range(1, A + 1):
        for a in range(A):
            w = _word_power(tables, a, m)
            if w.size > 1 and w[0] == a:
                return a, m
    raise ValueError("substitution has no letter whose image starts with itself")


def substitution_fixed_point(rule, length: int) -> list[str]:
    """Prefix of the one-sided fixed point ``lim sigma^{mk}(a)``."""
    rule = _normalize_rule(rule)
    if not is_primitive(rule):
        raise ValueError("substitution is not primitive")
    t = _Tables(rule)
    a, m = _fixed_point_seed(t)
    seq = np.array([a], dtype=np.int8)
    while seq.size < length:
        seq = t.apply(seq, m)
    return [t.letters[i] for i in seq[:length]]


class _TwoSidedFixedPoint:
    """Bi-infinite fixed point ``... sigma^{mk}(l) . sigma^{mk}(r) ...``, grown on demand."""

    def __init__(self, rule):
        self.tables = t = _Tables(rule)
        A = len(t.letters)
        r, m1 = _fixed_point_seed(t)
        legal = self._legal_pairs()
        for m in range(m1, 2 * A + 2):
            if m % m1:
                continue
            if _word_power(t, r, m)[0] != r:
                continue
            lefts = [l for l in range(A)
                     if _word_power(t, l, m)[-1] == l and (l, r) in legal]
            if lefts:
                self.left_seed, self.right_seed, self.power = lefts[0], r, m
                break
        else:
            raise ValueError("no admissible seed pair for a two-sided fixed point")
        self.right = np.array([r], dtype=np.int8)
        self.left = np.array([self.left_seed], dtype=np.int8)

    def _legal_pairs(self) -> set:
        t = self.tables
        pairs = set()
        for a in range(len(t.letters)):
            w = np.array([a], dtype=np.int8)
            while w.size < 4096:
                w = t.apply(w)
            pairs |= set(zip(w[:-1].tolist(), w[1:].tolist()))
        return pairs

    def window(self, lo: int, hi: int) -> np.ndarray:
        """Letter codes at coordinates ``lo..hi`` inclusive."""
        while self.right.size <= max(hi, 0):
            self.right = self.tables.apply(self.right, self.power)
        while self.left.size < max(-lo, 0):
            self.left = self.tables.apply(self.left, self.power)
        parts = []
        if lo < 0:
            parts.append(self.left[self.left.size + lo:self.left.size + min(hi, -1) + 1])
        if hi >= 0:
            parts.append(self.right[max(lo, 0):hi + 1])
        return np.concatenate(parts) if len(parts) > 1 else parts[0]


@lru_cache(maxsize=16)
def _two_sided(rule) -> _TwoSidedFixedPoint:
    return _TwoSidedFixedPoint(rule)


@dataclass(frozen=True, eq=False)
class SubstitutionSubshift(_SymbolicSystem):
    """Orbit closure of a primitive substitution fixed point with its unique
    invariant measure.  States are integer positions in the two-sided fixed
    point; the sampler picks a uniform position inside a level-k supertile."""

    rule: tuple = BUILTIN_RULES["fibonacci"]
    name: str = "fibonacci"

    kind = "substitution"

    def __post_init__(self):
        rule = _normalize_rule(self.rule)
        if not is_primitive(rule):
            raise ValueError("substitution is not primitive")
        object.__setattr__(self, "rule", rule)
        object.__setattr__(self, "alphabet", tuple(a for a, _ in rule))

    @property
    def fixed_point(self) -> _TwoSidedFixedPoint:
        return _two_sided(self.rule)

    def inflation(self) -> float:
        return perron_frequencies(self.rule)[0]

    def letter_frequencies(self) -> np.ndarray:
        return perron_frequencies(self.rule)[1]

    def supertile_level(self, horizon: int) -> int:
        return int(math.ceil(math.log(max(horizon, 2)) / math.log(self.inflation()))) + 4

    def supertile_length(self, level: int) -> int:
        M = substitution_matrix(self.rule)
        e = np.zeros(M.shape[0], dtype=np.int64)
        e[self.fixed_point.right_seed] = 1
        for _ in range(level):
            e = M @ e
        return int(e.sum())

    def sample_state(self, rng, horizon=1024):
        L = self.supertile_length(self.supertile_level(horizon))
        return int(rng.integers(0, L))

    def shift(self, state, n):
        return int(state + n)

    def symbols(self, state, lo, hi):
        return self.fixed_point.window(state + lo, state + hi)

    def _base_batch(self, f, rng, count, length, horizon):
        lo, hi = f.span()
        L = self.supertile_length(self.supertile_level(horizon))
        pos = rng.integers(0, L, size=count)
        width = length + hi - lo
        data = self.fixed_point.window(lo, L + hi + length)
        sym = data[pos[:, None] + np.arange(width)[None, :]]
        return self._apply(f, sym, length)

    def describe(self):
        return {"kind": "substitution", "name": self.name, "rule": dict(self.rule)}


@dataclass(frozen=True, eq=False)
class ExplicitSequence(_SymbolicSystem):
    """A single two-sided sequence ``provider(indices) -> letter codes``;
    the sampler draws a uniform position in ``[-span, span)``."""

    provider: Callable[[np.ndarray], np.ndarray] = None
    alphabet: tuple = ("a", "b")
    span_: int = 1 << 16
    name: str = "explicit"

    kind = "explicit"

    def sample_state(self, rng, horizon=0):
        return int(rng.integers(-self.span_, self.span_))

    def shift(self, state, n):
        return int(state + n)

    def symbols(self, state, lo, hi):
        return np.asarray(self.provider(np.arange(state + lo, state + hi + 1)), dtype=np.int64)

    def _base_batch(self, f, rng, count, length, horizon):
        lo, hi = f.span()
        pos = rng.integers(-self.span_, self.span_, size=count)
        idx = pos[:, None] + np.arange(lo, length + hi)[None, :]
        sym = np.asarray(self.provider(idx.ravel()), dtype=np.int64).reshape(idx.shape)
        return self._apply(f, sym, length)

    def describe(self):
        return {"kind": "explicit", "name": self.name, "alphabet": list(self.alphabet)}


# --------------------------------------------------------------------------
# operations


def sample_invariant(spec: System, seed, horizon: int = 1024):
    """A state distributed according to the invariant measure."""
    return spec.sample_state(np.random.default_rng(seed), horizon)


def shift_state(spec: System, x, n: int):
    return spec.shift(x, n)


def orbit_samples(spec: System, f: Observable, x, N: int) -> SampledSignal:
    """``values[n] = f(alpha_{-n} x)`` for ``n = 0..N-1``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    spec.check_observable(f)
    return SampledSignal(spec.orbit(f, x, N), spec.describe_state(x), f.sup_bound)


def two_sided_samples(spec: System, f: Observable, x, N: int) -> SampledSignal:
    """``f(alpha_{-n} x)`` for ``n = -N..N``."""
    spec.check_observable(f)
    values = spec.orbit(f, spec.shift(x, -N), 2 * N + 1)
    return SampledSignal(values, spec.describe_state(x), f.sup_bound, start=-N)


def observable_mean(spec: System, f: Observable) -> complex:
    """Exact integral of ``f`` against the invariant measure."""
    if f.kind == "constant":
        return f.value - f.center
    if f.kind == "smeared":
        return complex(np.sum(f.phi.coefficients)) * observable_mean(spec, f.base)
    if isinstance(spec, FiniteCyclic):
        vals = spec._values(f, np.arange(spec.n))
        return complex(np.dot(spec.probabilities, vals))
    if isinstance(spec, IrrationalRotation):
        return (1.0 if f.k == 0 else 0.0) - f.center
    if f.kind == "letter" and hasattr(spec, "letter_frequencies"):
        freq = spec.letter_frequencies()
        return sum(v * freq[spec.letter_index(a)] for a, v in f.weights) - f.center
    if f.kind == "cylinder" and len(f.word) == 1 and hasattr(spec, "letter_frequencies"):
        return float(spec.letter_frequencies()[spec.letter_index(f.word[0])]) - f.center
    if f.kind == "cylinder" and isinstance(spec, BernoulliShift):
        p = spec.letter_frequencies()
        return float(np.prod([p[spec.letter_index(a)] for a in f.word])) - f.center
    raise ValueError(f"no closed-form mean for {f.kind} on {spec.kind}")
