"""Built-in systems and observables, and their construction from JSON."""

from __future__ import annotations

from dataclasses import replace
from typing import Any, Mapping

import numpy as np

from .algebra import TestFunction
from .systems import (BUILTIN_RULES, BernoulliShift, FiniteCyclic, IrrationalRotation,
                      Observable, SubstitutionSubshift, System, golden_mean, observable_mean)

SYSTEM_SCHEMAS: dict[str, dict] = {
    "fibonacci": {"kind": "substitution", "rule": dict(BUILTIN_RULES["fibonacci"]),
                  "observables": ["letter", "indicator", "indicator-centered", "cylinder", "constant"]},
    "thue-morse": {"kind": "substitution", "rule": dict(BUILTIN_RULES["thue-morse"]),
                   "observables": ["letter", "indicator", "indicator-centered", "cylinder", "constant"]},
    "period-doubling": {"kind": "substitution", "rule": dict(BUILTIN_RULES["period-doubling"]),
                        "observables": ["letter", "indicator", "indicator-centered", "cylinder", "constant"]},
    "rotation": {"kind": "rotation", "params": {"alpha": "float in (0,1), default golden mean"},
                 "observables": ["character", "constant"]},
    "bernoulli": {"kind": "bernoulli",
                  "params": {"alphabet": "list of letters, default ['+', '-']",
                             "probabilities": "simplex vector, default uniform"},
                  "observables": ["origin", "letter", "indicator", "indicator-centered", "cylinder", "constant"]},
    "cyclic": {"kind": "cyclic",
               "params": {"n": "int >= 1, default 12", "step": "int, default 1",
                          "weights": "invariant probability vector, default uniform"},
               "observables": ["indicator", "character", "table", "constant"]},
}

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["system", "seed"],
    "properties": {
        "system": {"oneOf": [{"type": "string"},
                             {"type": "object", "required": ["kind"]}]},
        "observable": {"oneOf": [{"type": "string"}, {"type": "object"}]},
        "observables": {"type": "array", "items": {"oneOf": [{"type": "string"},
                                                             {"type": "object"}]}},
        "seed": {"type": "integer", "minimum": 0},
        "output_dir": {"type": "string"},
        "workers": {"type": "integer", "minimum": 1},
        "estimator": {"type": "object", "properties": {
            "max_lag": {"type": "integer", "minimum": 1},
            "compare_lag": {"type": "integer", "minimum": 1},
            "orbit_length": {"type": "integer", "minimum": 10},
            "mc_samples": {"type": "integer"},
        }},
        "diffraction": {"type": "object", "properties": {
            "grid": {"type": "integer", "minimum": 4},
            "kernel_order": {"type": "integer", "minimum": 0},
            "tau": {"type": "number", "exclusiveMinimum": 0},
        }},
        "factor": {"type": "object", "properties": {
            "phis": {"type": "array", "items": {"type": "object"}},
        }},
        "mean_ap": {"type": "object", "properties": {
            "eps": {"type": "array", "items": {"type": "number"}},
            "horizon": {"type": "integer"},
            "shift_range": {"type": "integer"},
            "trials": {"type": "integer", "minimum": 1},
        }},
        "gates": {"type": "object", "additionalProperties": {"type": "number"}},
    },
}


def build_system(spec: str | Mapping[str, Any]) -> System:
    if isinstance(spec, str):
        spec = {"kind": spec}
    spec = dict(spec)
    kind = spec.pop("kind")
    if kind in BUILTIN_RULES:
        return SubstitutionSubshift(BUILTIN_RULES[kind], kind)
    if kind == "substitution":
        name = spec.get("name", "custom")
        rule = spec.get("rule") or BUILTIN_RULES.get(name)
        if rule is None:
            raise ValueError(f"unknown substitution {name!r}")
        return SubstitutionSubshift(tuple(dict(rule).items()), name)
    if kind == "rotation":
        return IrrationalRotation(float(spec.get("alpha", golden_mean())),
                                  spec.get("label", "golden" if "alpha" not in spec else "user"))
    if kind == "bernoulli":
        alphabet = tuple(spec.get("alphabet", ("+", "-")))
        probs = spec.get("probabilities", [1.0 / len(alphabet)] * len(alphabet))
        return BernoulliShift(alphabet, tuple(probs))
    if kind == "cyclic":
        return FiniteCyclic(int(spec.get("n", 12)), int(spec.get("step", 1)),
                            tuple(spec.get("weights", ())))
    raise ValueError(f"unknown system kind {kind!r}")


def _complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1] if len(v) > 1 else 0.0)
    return complex(v)


def parse_test_function(spec) -> TestFunction:
    """``{"0": 1, "1": [0, 1]}`` or ``"0:1,1:1"`` to a test function."""
    if isinstance(spec, str):
        items = (p.split(":") for p in spec.split(",") if p.strip())
        return TestFunction.from_dict({int(k): complex(v.replace("i", "j")) for k, v in items})
    return TestFunction.from_dict({int(k): _complex(v) for k, v in spec.items()})


def build_observable(system: System, spec: str | Mapping[str, Any]) -> Observable:
    if isinstance(spec, str):
        spec = {"name": spec}
    spec = dict(spec)
    name = spec.get("name", spec.get("kind"))
    kind = spec.get("kind", name)
    letters = getattr(system, "alphabet", ())
    if kind == "constant":
        f = Observable.constant(_complex(spec.get("value", 1.0)))
    elif kind == "character":
        f = Observable.character(int(spec.get("k", 1)))
    elif kind in ("letter", "origin"):
        w = spec.get("weights")
        if w is None:
            w = {a: (1.0 if i == 0 else -1.0) for i, a in enumerate(letters[:2])}
        f = Observable.letter({a: _complex(v) for a, v in w.items()}, name=name)
    elif kind in ("indicator", "indicator-centered") and isinstance(system, FiniteCyclic):
        vals = np.zeros(system.n)
        vals[int(spec.get("state", 0))] = 1.0
        f = Observable.from_table(vals, name=name)
    elif kind in ("indicator", "indicator-centered", "cylinder"):
        word = spec.get("word", letters[:1])
        f = Observable.cylinder(list(word), int(spec.get("offset", 0)), name=name)
    elif kind == "table":
        f = Observable.from_table([_complex(v) for v in spec["values"]], name=name)
    else:
        raise ValueError(f"unknown observable {kind!r}")
    center = spec.get("center", "mean" if kind == "indicator-centered" else None)
    if center is not None:
        c = observable_mean(system, f) if center == "mean" else _complex(center)
        f = replace(f, center=f.center + c)
    system.check_observable(f)
    return f
