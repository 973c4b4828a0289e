"""Report bundles and the on-disk coefficient format.

A bundle is one output directory holding a deterministic ``result.json``
(no timestamps; byte-identical across reruns with the same config and seed),
any number of CSV grids, optional SVG plots, and a ``run_meta.json`` that
carries the wall-clock timestamp so the result file stays reproducible.
"""

from __future__ import annotations

import datetime
import json
from pathlib import Path

import numpy as np

from .errors import InputError
from .features import CoefficientVector
from .supports import FourierSupport


def _plain(value):
    """Recursively convert numpy scalars/arrays so json.dumps is deterministic."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    return value


def dump_deterministic_json(payload: dict) -> str:
    return json.dumps(_plain(payload), sort_keys=True, indent=2, allow_nan=False) + "\n"


class ReportBundle:
    """Writer for one task's output directory."""

    def __init__(self, out_dir):
        self.path = Path(out_dir)
        self.path.mkdir(parents=True, exist_ok=True)

    def file(self, name: str) -> Path:
        return self.path / name

    def write_result(self, task: str, config: dict, results: dict) -> Path:
        payload = {"task": task, "config": config, "results": results}
        target = self.file("result.json")
        target.write_text(dump_deterministic_json(payload), encoding="utf-8")
        return target

    def write_error(self, task: str, config: dict, error: Exception) -> Path:
        payload = {
            "task": task,
            "config": config,
            "error": {"type": type(error).__name__, "message": str(error)},
        }
        target = self.file("result.json")
        target.write_text(dump_deterministic_json(payload), encoding="utf-8")
        return target

    def write_meta(self, argv=None) -> Path:
        meta = {
            "timestamp_utc": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "argv": list(argv) if argv is not None else None,
        }
        target = self.file("run_meta.json")
        target.write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
        return target

    def write_csv(self, name: str, array, header: str | None = None) -> Path:
        target = self.file(name)
        arr = np.atleast_2d(np.asarray(array))
        with open(target, "w", encoding="utf-8", newline="") as fh:
            if header:
                fh.write(header.rstrip("\n") + "\n")
            for row in arr:
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
        return target

    def write_text(self, name: str, text: str) -> Path:
        target = self.file(name)
        target.write_text(text, encoding="utf-8")
        return target


def coefficients_to_payload(coeffs: CoefficientVector) -> dict:
    support = coeffs.support
    if support.shape_tag == "rect":
        desc = {"shape": "rect", "sizes": list(support.sizes)}
    else:
        desc = {"shape": "explicit", "elements": support.elements.tolist()}
    return {
        "dims": support.dims,
        "support": desc,
        "values": [[float(v.real), float(v.imag)] for v in coeffs.values],
        "conj_symmetric": bool(coeffs.conj_symmetric),
    }


def save_coefficients(coeffs: CoefficientVector, path) -> None:
    Path(path).write_text(
        dump_deterministic_json(coefficients_to_payload(coeffs)), encoding="utf-8"
    )


def load_coefficients(path) -> CoefficientVector:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read coefficient file: {exc}") from None
    try:
        desc = data["support"]
        if desc["shape"] == "rect":
            support = FourierSupport.rect(*desc["sizes"])
        else:
            support = FourierSupport.explicit(desc["elements"])
        values = np.array([complex(re, im) for re, im in data["values"]])
        return CoefficientVector(
            support, values, conj_symmetric=bool(data.get("conj_symmetric", False))
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed coefficient file: {exc}") from None
