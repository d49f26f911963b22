"""Mean almost periodicity of sampled orbits along ``B_n = [-n, n]``.

The limsup defining the mean is truncated at a horizon ``N`` and repeated
at ``N/2``; a verdict is only "consistent with discrete spectrum" when both
horizons say so.  Verdicts are statements about finitely many sampled
points and shifts, never proofs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .estimators import PreconditionError
from .seeding import derive_rng
from .systems import Observable, SampledSignal, System, two_sided_samples

CONSISTENT = "CONSISTENT_WITH_DISCRETE"
NOT_MEAN_AP = "NOT_MEAN_AP"


@dataclass(frozen=True)
class MeanApParams:
    horizon: int = 100_000
    shift_range: int = 1000
    eps: tuple = (0.5, 0.2, 0.1)
    k_max: dict | None = None
    trials: int = 2

    def __post_init__(self):
        if self.horizon < 10 * self.shift_range:
            raise PreconditionError("horizon must be at least 10 * shift_range")
        eps = tuple(float(e) for e in self.eps)
        if not eps or any(e <= 0 for e in eps) or any(a <= b for a, b in zip(eps, eps[1:])):
            raise PreconditionError("eps grid must be positive and strictly decreasing")
        object.__setattr__(self, "eps", eps)
        if self.k_max is not None:
            object.__setattr__(self, "k_max", {float(k): int(v) for k, v in self.k_max.items()})
        if self.trials < 1:
            raise PreconditionError("trials must be >= 1")

    @property
    def margin(self) -> int:
        return self.shift_range // 10


def _values(h) -> np.ndarray:
    v = h.values if isinstance(h, SampledSignal) else np.asarray(h)
    if np.iscomplexobj(v) and not np.any(v.imag):
        v = v.real
    return v


def mean_seminorm_diff(h, t: int, N: int) -> float:
    """``(1/(2N+1-|t|)) sum_s |h(s) - h(s+t)|`` over the overlap in ``[-N, N]``."""
    v = _values(h)
    if v.size != 2 * N + 1:
        raise PreconditionError("expected a two-sided window of length 2N+1")
    t = int(t)
    if abs(t) > N / 10:
        raise PreconditionError(f"|t|={abs(t)} exceeds N/10")
    if t == 0:
        return 0.0
    a = abs(t)
    return float(np.abs(v[a:] - v[:-a]).sum() / (v.size - a))


def seminorm_profile(h, T_max: int) -> np.ndarray:
    """``mean_seminorm_diff`` at ``t = 0..T_max`` (the profile is even in ``t``)."""
    v = _values(h)
    N = (v.size - 1) // 2
    if T_max > N / 10:
        raise PreconditionError("shift range exceeds N/10")
    out = np.zeros(T_max + 1)
    for t in range(1, T_max + 1):
        out[t] = np.abs(v[t:] - v[:-t]).sum() / (v.size - t)
    return out


def _periods_from_profile(profile: np.ndarray, eps: float) -> np.ndarray:
    pos = np.flatnonzero(profile < eps)  # profile[0] == 0, so pos[0] == 0
    return np.concatenate([-pos[:0:-1], pos])


def eps_almost_periods(h, eps: float, params: MeanApParams) -> np.ndarray:
    """Shifts ``t`` in ``[-T, T]`` with mean deviation below ``eps``; contains 0."""
    return _periods_from_profile(seminorm_profile(h, params.shift_range), eps)


def relative_denseness_gap(shifts: Sequence[int], T_max: int) -> int:
    """Largest gap between consecutive shifts inside ``[-T + m, T - m]``, ``m = T/10``.

    A lone shift leaves the whole inner window uncovered, so its gap is the
    window width.
    """
    s = np.asarray(shifts)
    if s.size == 0:
        raise PreconditionError("shift list is empty")
    m = T_max // 10
    inner = s[(s >= -T_max + m) & (s <= T_max - m)]
    if inner.size < 2:
        return int(2 * (T_max - m))
    return int(np.max(np.diff(inner)))


def default_k_max(shifts: np.ndarray, T_max: int) -> int:
    """Four times the smallest positive almost period, capped at ``T_max/4``."""
    cap = max(T_max // 4, 1)
    pos = shifts[shifts > 0]
    return cap if pos.size == 0 else int(min(4 * pos[0], cap))


@dataclass
class Verdict:
    verdict: str
    horizons_agree: bool
    witness: dict | None = None
    details: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "horizons_agree": self.horizons_agree,
                "witness": self.witness, "details": self.details}


def _judge(profile: np.ndarray, params: MeanApParams) -> tuple[bool, list, dict | None]:
    T = params.shift_range
    rows, witness = [], None
    for e in params.eps:
        shifts = _periods_from_profile(profile, e)
        bound = (params.k_max or {}).get(e)
        if bound is None:
            bound = default_k_max(shifts, T)
        gap = relative_denseness_gap(shifts, T)
        pos = shifts[shifts > 0]
        rows.append({"eps": e, "count": int(shifts.size),
                     "smallest_period": int(pos[0]) if pos.size else None,
                     "gap": gap, "k_max": int(bound), "dense": gap <= bound})
        if gap > bound and witness is None:
            witness = {"eps": e, "gap": gap, "k_max": int(bound)}
    return witness is None, rows, witness


def classify_observable(spec: System, f: Observable, params: MeanApParams,
                        seed: int = 0) -> Verdict:
    N, T = params.horizon, params.shift_range
    ok_all, agree, witness, details = True, True, None, []
    for trial in range(params.trials):
        rng = derive_rng(seed, "classify", f.name, trial)
        x = spec.sample_state(rng, 2 * N + 1)
        v = _values(two_sided_samples(spec, f, x, N))
        half = N // 2
        results = []
        for n, w in ((N, v), (half, v[N - half:N + half + 1])):
            ok, rows, wit = _judge(seminorm_profile(w, T), params)
            results.append(ok)
            details.append({"trial": trial, "horizon": n, "consistent": ok, "eps": rows})
            if wit is not None and witness is None:
                witness = dict(wit, trial=trial, horizon=n)
        agree &= results[0] == results[1]
        ok_all &= all(results)
    return Verdict(CONSISTENT if ok_all else NOT_MEAN_AP, agree, witness, details)


def classify_discrete_spectrum(spec: System, observables: Sequence[Observable],
                               params: MeanApParams, trials: int | None = None,
                               seed: int = 0) -> dict:
    """Per-observable verdicts and their conjunction."""
    if not observables:
        raise PreconditionError("need at least one observable")
    if trials is not None and trials != params.trials:
        params = MeanApParams(params.horizon, params.shift_range, params.eps, params.k_max, trials)
    per = {f.name: classify_observable(spec, f, params, seed) for f in observables}
    overall = CONSISTENT if all(v.verdict == CONSISTENT for v in per.values()) else NOT_MEAN_AP
    return {
        "system": spec.describe(),
        "overall": overall,
        "horizons_agree": all(v.horizons_agree for v in per.values()),
        "observables": {k: v.to_dict() for k, v in per.items()},
        "params": {"horizon": params.horizon, "shift_range": params.shift_range,
                   "eps": list(params.eps), "trials": params.trials, "seed": seed},
        "note": "finite-sample evidence over sampled points; not a proof",
    }
