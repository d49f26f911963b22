"""CSV and JSON persistence.

Floats are written with ``repr`` (shortest round-trip form), so reading a
file back gives bit-identical arrays and reruns give byte-identical files.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any

import numpy as np

from .algebra import PosDefSequence, TorusMeasure

FORMAT_VERSION = 1


def _num(x: float) -> str:
    return repr(float(x))


def to_jsonable(obj: Any) -> Any:
    """Plain JSON types from numpy scalars, arrays, complex numbers and tuples."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    return obj


def dump_json(obj: Any, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(to_jsonable(obj), indent=2, sort_keys=True, allow_nan=False)
    path.write_text(text + "\n", encoding="utf-8")
    return path


def load_json(path: str | Path) -> Any:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def _write_rows(path: str | Path, header: list[str], rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return path


def _read_rows(path: str | Path) -> tuple[list[str], list[list[str]]]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


# coefficient windows ------------------------------------------------------


def write_coefficients_csv(c: PosDefSequence, path: str | Path) -> Path:
    """Columns ``lag, re, im, stderr, window_length``; the last two are blank
    when unknown.  The window length is repeated on every row so the taper can
    be undone after reading."""
    se = c.stderr
    wl = "" if c.window_length is None else str(int(c.window_length))
    rows = ([str(n), _num(v.real), _num(v.imag), "" if se is None else _num(se[i]), wl]
            for i, (n, v) in enumerate(zip(c.lags.tolist(), c.coefficients)))
    return _write_rows(path, ["lag", "re", "im", "stderr", "window_length"], rows)


def read_coefficients_csv(path: str | Path) -> PosDefSequence:
    header, rows = _read_rows(path)
    if header[:3] != ["lag", "re", "im"]:
        raise ValueError(f"{path}: not a coefficient file")
    lags = np.array([int(r[0]) for r in rows])
    K = int(lags.max()) if lags.size else 0
    if not np.array_equal(lags, np.arange(-K, K + 1)):
        raise ValueError(f"{path}: lags must run over -K..K")
    coef = np.array([complex(float(r[1]), float(r[2])) for r in rows])
    se = None
    if len(header) > 3 and all(len(r) > 3 and r[3] != "" for r in rows):
        se = np.array([float(r[3]) for r in rows])
    wl = None
    if "window_length" in header:
        j = header.index("window_length")
        vals = {r[j] for r in rows if len(r) > j}
        if len(vals) > 1:
            raise ValueError(f"{path}: inconsistent window_length")
        if vals and "" not in vals:
            wl = int(vals.pop())
    return PosDefSequence(coef, stderr=se, window_length=wl)


def sequence_envelope(c: PosDefSequence) -> dict:
    return {
        "type": "PosDefSequence",
        "version": FORMAT_VERSION,
        "K": c.max_lag,
        "window_length": c.window_length,
        "provenance": to_jsonable(c.provenance),
        "coefficients": [[v.real, v.imag] for v in c.coefficients.tolist()],
        "stderr": None if c.stderr is None else c.stderr.tolist(),
    }


def sequence_from_envelope(d: dict) -> PosDefSequence:
    if d.get("type") != "PosDefSequence":
        raise ValueError("not a PosDefSequence envelope")
    coef = np.array([complex(a, b) for a, b in d["coefficients"]])
    return PosDefSequence(coef, stderr=d.get("stderr"), window_length=d.get("window_length"),
                          provenance=dict(d.get("provenance") or {}))


# measures -----------------------------------------------------------------


def measure_envelope(m: TorusMeasure) -> dict:
    meta = to_jsonable(m.metadata)
    return {
        "type": "TorusMeasure",
        "version": FORMAT_VERSION,
        "K": meta.get("K"),
        "L": m.kernel_order,
        "G_res": m.grid,
        "total_mass": m.total_mass,
        "atoms": [[x, w] for x, w in m.atoms],
        "density": m.density.tolist(),
        "metadata": meta,
    }


def measure_from_envelope(d: dict) -> TorusMeasure:
    if d.get("type") != "TorusMeasure":
        raise ValueError("not a TorusMeasure envelope")
    atoms = d.get("atoms") or []
    return TorusMeasure(np.array([a[0] for a in atoms], dtype=float),
                        np.array([a[1] for a in atoms], dtype=float),
                        np.array(d["density"], dtype=float), int(d["L"]),
                        float(d["total_mass"]), metadata=dict(d.get("metadata") or {}))


def write_measure(m: TorusMeasure, directory: str | Path, stem: str = "measure") -> dict[str, Path]:
    """``<stem>.json`` envelope plus ``<stem>.csv`` (density) and ``<stem>_atoms.csv``."""
    directory = Path(directory)
    paths = {
        "json": dump_json(measure_envelope(m), directory / f"{stem}.json"),
        "csv": _write_rows(directory / f"{stem}.csv", ["grid_index", "density"],
                           ([str(j), _num(v)] for j, v in enumerate(m.density.tolist()))),
        "atoms": _write_rows(directory / f"{stem}_atoms.csv", ["frequency", "mass"],
                             ([_num(x), _num(w)] for x, w in m.atoms)),
    }
    return paths


def read_measure(path: str | Path) -> TorusMeasure:
    return measure_from_envelope(load_json(path))


def write_signal_csv(values: np.ndarray, path: str | Path, start: int = 0) -> Path:
    """Columns ``n, re, im`` for an orbit window starting at ``start``."""
    rows = ([str(start + i), _num(v.real), _num(v.imag)]
            for i, v in enumerate(np.asarray(values, dtype=np.complex128).tolist()))
    return _write_rows(path, ["n", "re", "im"], rows)
