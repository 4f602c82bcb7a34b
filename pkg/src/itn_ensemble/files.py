"""On-disk formats shared by the command-line tools.

Every file carries ``format_version``: as a JSON key, or as a leading
``# format_version=1`` comment line in CSV outputs. Floats are written with
``repr`` so that reading a file back is lossless.
"""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .binary import BinaryModel
from .core import CountryRecord, DataError, RelativeSnapshot, TradeSnapshot
from .sampling import GENERATOR, EnsembleSample
from .weighted import WeightedModel

FORMAT_VERSION = 1


def atomic_write(path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _num(v):
    return "" if v is None or (isinstance(v, float) and np.isnan(v)) else repr(float(v))


def csv_text(header, rows) -> str:
    out = io.StringIO()
    out.write(f"# format_version={FORMAT_VERSION}\n")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_num(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return out.getvalue()


def read_csv_table(text: str) -> tuple[list[str], list[list[str]]]:
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    rows = list(csv.reader(lines))
    if not rows:
        raise DataError("empty CSV")
    return rows[0], rows[1:]


def _check_version(obj, what):
    v = obj.get("format_version")
    if v != FORMAT_VERSION:
        raise DataError(f"{what}: unsupported format_version {v!r}")


# -- snapshots ---------------------------------------------------------------


def snapshot_to_json(s: TradeSnapshot) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "year": s.year,
        "countries": [
            {"code": c.code, "gdp_total": c.gdp_total, "population": c.population} for c in s.countries
        ],
        "weights": s.weights.tolist(),
    }


def snapshot_from_json(obj) -> TradeSnapshot:
    _check_version(obj, "trade snapshot")
    countries = [CountryRecord(c["code"], obj["year"], c["gdp_total"], c.get("population"))
                 for c in obj["countries"]]
    return TradeSnapshot(obj["year"], countries, np.array(obj["weights"], dtype=float))


def relative_to_json(r: RelativeSnapshot) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "year": r.year,
        "codes": list(r.codes),
        "xi": r.xi.tolist(),
        "xi_sum": float(r.xi.sum()),
        "v": r.v.tolist(),
        "sigma_out": r.sigma_out.tolist(),
        "sigma_in": r.sigma_in.tolist(),
        "X": r.X,
        "T": r.T,
    }


def relative_from_json(obj) -> RelativeSnapshot:
    _check_version(obj, "relative snapshot")
    return RelativeSnapshot(obj["year"], obj["codes"], np.array(obj["xi"]), np.array(obj["v"]),
                            np.array(obj["sigma_out"]), np.array(obj["sigma_in"]), obj["X"], obj["T"])


def load_snapshot_dir(path) -> tuple[TradeSnapshot, RelativeSnapshot]:
    path = Path(path)
    try:
        snap = snapshot_from_json(json.loads((path / "trade_snapshot.json").read_text()))
        rel = relative_from_json(json.loads((path / "relative_snapshot.json").read_text()))
    except FileNotFoundError as e:
        raise DataError(f"not a snapshot directory: {e.filename}") from None
    return snap, rel


# -- models ------------------------------------------------------------------


def model_from_json(obj):
    _check_version(obj, "model")
    mode = obj.get("mode")
    if mode == "binary":
        return BinaryModel(np.array(obj["x"]), obj["delta"], codes=obj["codes"])
    if mode == "weighted":
        return WeightedModel(np.array(obj["xi"]), obj["T"], codes=obj["codes"], year=obj.get("year"))
    raise DataError(f"unknown model mode {mode!r}")


# -- samples -----------------------------------------------------------------


def sample_to_text(sample: EnsembleSample, codes) -> str:
    out = io.StringIO()
    out.write(f"# format_version={FORMAT_VERSION}\n")
    out.write(f"# kind={sample.kind}\n")
    out.write(f"# sampler={sample.sampler}\n")
    out.write(f"# generator={GENERATOR}\n")
    out.write(f"# seed={sample.seed}\n")
    out.write(f"# sweep={sample.sweep}\n")
    out.write(f"# energy={sample.energy!r}\n")
    out.write(f"# codes={','.join(codes)}\n")
    m = sample.matrix
    for row in m:
        if sample.kind == "binary":
            out.write(",".join(str(int(v)) for v in row) + "\n")
        else:
            out.write(",".join(repr(float(v)) for v in row) + "\n")
    return out.getvalue()


def sample_from_text(text: str) -> tuple[dict, np.ndarray]:
    """Header fields and matrix of a sample file."""
    header = {}
    rows = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            header[key] = value
        elif line.strip():
            rows.append([float(v) for v in line.split(",")])
    if header.get("format_version") != str(FORMAT_VERSION):
        raise DataError(f"unsupported sample format_version {header.get('format_version')!r}")
    m = np.array(rows, dtype=float)
    codes = header.get("codes", "").split(",")
    if m.shape != (len(codes), len(codes)):
        raise DataError("sample matrix does not match its country list")
    header["codes"] = codes
    header["seed"] = int(header["seed"])
    header["sweep"] = int(header["sweep"])
    header["energy"] = float(header["energy"])
    return header, m
