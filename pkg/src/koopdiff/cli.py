"""Command-line driver.

Exit codes: 0 success, 1 a tolerance gate failed, 2 usage, schema or
precondition error (with a JSON diagnostic on stderr).
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from .catalog import SYSTEM_SCHEMAS, build_observable, build_system, parse_test_function
from .diffraction import DEFAULT_GRID, compare_measures, diffraction_measure
from .estimators import EstimatorParams, PreconditionError, orbit_coefficients, spectral_coefficients_mc
from .io import (dump_json, load_json, read_coefficients_csv, read_measure, write_coefficients_csv,
                 write_measure, write_signal_csv)
from .mean_ap import MeanApParams, classify_discrete_spectrum
from .pipeline import ConfigError, DEFAULT_PHIS, identity_checks, run
from .seeding import derive_rng
from .systems import orbit_samples


def _csv_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in _csv_list(text))


def _system_arg(text: str):
    # a built-in name, or inline JSON for a parameterized system
    return json.loads(text) if text.lstrip().startswith("{") else text


def _add_common(p: argparse.ArgumentParser, lags: bool = True) -> None:
    p.add_argument("--system", required=True, type=_system_arg)
    p.add_argument("--observable", required=True, type=_system_arg)
    p.add_argument("--seed", required=True, type=int)
    if lags:
        p.add_argument("--lags", type=int, default=50)
        p.add_argument("--orbit", type=int, default=100_000)
        p.add_argument("--mc", type=int, default=None)
        p.add_argument("--workers", type=int, default=1)


def _params(a) -> EstimatorParams:
    return EstimatorParams(max_lag=a.lags, orbit_length=a.orbit, seed=a.seed,
                           mc_samples=a.mc or 100_000, workers=a.workers)


def cmd_list_systems(a) -> int:
    if a.json:
        print(json.dumps(SYSTEM_SCHEMAS, indent=2, sort_keys=True))
    else:
        for name, s in SYSTEM_SCHEMAS.items():
            print(f"{name:16s} {s['kind']:13s} observables: {', '.join(s['observables'])}")
    return 0


def cmd_sample(a) -> int:
    spec = build_system(a.system)
    f = build_observable(spec, a.observable)
    x = spec.sample_state(derive_rng(a.seed, "sample", f.name), a.length)
    sig = orbit_samples(spec, f, x, a.length)
    write_signal_csv(sig.values, a.out)
    return 0


def cmd_autocorr(a) -> int:
    spec = build_system(a.system)
    f = build_observable(spec, a.observable)
    params = _params(a)
    c = spectral_coefficients_mc(spec, f, params) if a.mc else orbit_coefficients(spec, f, params)
    write_coefficients_csv(c, a.out)
    return 0


def cmd_spectrum(a) -> int:
    if a.coeffs:
        c = read_coefficients_csv(a.coeffs)
    else:
        spec = build_system(a.system)
        f = build_observable(spec, a.observable)
        c = orbit_coefficients(spec, f, _params(a))
    m = diffraction_measure(c, a.grid, a.kernel_order, a.tau)
    write_measure(m, a.out_dir)
    print(json.dumps({"atoms": m.atoms, "clipped_mass": m.metadata["clipped_mass"]}))
    return 0


def cmd_compare(a) -> int:
    da, dc = compare_measures(read_measure(a.first), read_measure(a.second), a.lags)
    ok = da <= a.tol
    print(json.dumps({"coeff_sup_distance": da, "cdf_distance": dc, "tol": a.tol, "passed": ok}))
    return 0 if ok else 1


def cmd_factor_check(a) -> int:
    spec = build_system(a.system)
    f = build_observable(spec, a.observable)
    phis = ([parse_test_function(p) for p in a.phis.split(";")] if a.phis
            else [parse_test_function(p) for p in DEFAULT_PHIS])
    res = identity_checks(spec, f, phis, _params(a))
    res["passed"] = all(res[k]["passed"] for k in ("n3", "factor_autocorrelation", "smeared_factor"))
    dump_json(res, a.out)
    return 0 if res["passed"] else 1


def cmd_classify(a) -> int:
    spec = build_system(a.system)
    fs = [build_observable(spec, o) for o in _csv_list(a.observables)]
    mp = MeanApParams(horizon=a.horizon, shift_range=a.shift_range, eps=_floats(a.eps),
                      trials=a.trials)
    res = classify_discrete_spectrum(spec, fs, mp, seed=a.seed)
    dump_json(res, a.out)
    print(res["overall"])
    return 0


def load_config(name: str) -> dict:
    """A config file path, or the name of a bundled config."""
    p = Path(name)
    if p.exists():
        return load_json(p)
    bundled = resources.files("koopdiff") / "configs" / (name if name.endswith(".json") else name + ".json")
    if bundled.is_file():
        return json.loads(bundled.read_text(encoding="utf-8"))
    raise ConfigError(f"config {name!r} not found")


def cmd_report(a) -> int:
    rep = run(load_config(a.config), workers=a.workers)
    for g in rep.gates:
        print(f"{'PASS' if g['passed'] else 'FAIL'} {g['gate']} value={g['value']:.6g} "
              f"bound={g['bound']:.6g}")
    return 0 if rep.passed else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="koopdiff", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list-systems", help="built-in systems and their parameters")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_list_systems)

    p = sub.add_parser("sample", help="write one orbit window as CSV")
    _add_common(p, lags=False)
    p.add_argument("--length", type=int, default=1000)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_sample)

    p = sub.add_parser("autocorr", help="autocorrelation coefficients")
    _add_common(p)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_autocorr)

    p = sub.add_parser("spectrum", help="torus measure from coefficients")
    p.add_argument("--coeffs", help="coefficient CSV; otherwise estimated from an orbit")
    p.add_argument("--system", type=_system_arg)
    p.add_argument("--observable", type=_system_arg)
    p.add_argument("--seed", type=int)
    p.add_argument("--lags", type=int, default=50)
    p.add_argument("--orbit", type=int, default=100_000)
    p.add_argument("--mc", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--grid", type=int, default=DEFAULT_GRID)
    p.add_argument("--kernel-order", type=int, default=None)
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(fn=cmd_spectrum)

    p = sub.add_parser("compare", help="distances between two measure.json files")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--lags", type=int, default=50)
    p.add_argument("--tol", type=float, required=True)
    p.set_defaults(fn=cmd_compare)

    p = sub.add_parser("factor-check", help="factor identity residuals")
    _add_common(p)
    p.add_argument("--phis", help="';'-separated test functions such as '0:1,1:1;-1:1'")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_factor_check)

    p = sub.add_parser("classify", help="mean almost periodicity verdicts")
    p.add_argument("--system", required=True, type=_system_arg)
    p.add_argument("--observables", required=True)
    p.add_argument("--eps", default="0.5,0.2,0.1")
    p.add_argument("--horizon", type=int, default=100_000)
    p.add_argument("--shift-range", type=int, default=1000)
    p.add_argument("--trials", type=int, default=2)
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("report", help="full pipeline from a config")
    p.add_argument("--config", required=True)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(fn=cmd_report)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "spectrum" and not args.coeffs and (
            args.system is None or args.observable is None or args.seed is None):
        print(json.dumps({"error": "usage",
                          "message": "spectrum needs --coeffs or --system/--observable/--seed"}),
              file=sys.stderr)
        return 2
    try:
        return args.fn(args)
    except ConfigError as err:
        print(json.dumps({"error": "schema", "message": str(err)}), file=sys.stderr)
    except PreconditionError as err:
        print(json.dumps({"error": "precondition", "message": str(err)}), file=sys.stderr)
    except (ValueError, KeyError) as err:
        print(json.dumps({"error": "invalid", "message": str(err)}), file=sys.stderr)
    return 2


if __name__ == "__main__":
    sys.exit(main())
