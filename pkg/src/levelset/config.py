"""Run-configuration schemas and validation for the command-line tasks."""

from __future__ import annotations

import json

import jsonschema

from .errors import ConfigError

_INT1 = {"type": "integer", "minimum": 1}
_INT2 = {"type": "integer", "minimum": 2}
_NONNEG = {"type": "number", "minimum": 0}
_POS = {"type": "number", "exclusiveMinimum": 0}
_UNIT = {"type": "number", "exclusiveMinimum": 0, "maximum": 1}
_PATH = {"type": "string", "minLength": 1}
_PAIR = {
    "type": "array",
    "items": _INT1,
    "minItems": 2,
    "maxItems": 2,
}

CONFIG_SCHEMAS = {
    "bounds": {
        "type": "object",
        "additionalProperties": False,
        "required": ["k1", "k2"],
        "properties": {
            "k1": _INT1,
            "k2": _INT1,
            "factors": _INT1,
            "factor_bandwidths": {"type": "array", "items": _PAIR, "minItems": 1},
            "l1": _INT1,
            "l2": _INT1,
        },
    },
    "sample-curve": {
        "type": "object",
        "additionalProperties": False,
        "required": ["count"],
        "properties": {
            "count": _INT1,
            "k1": _INT1,
            "k2": _INT1,
            "coeffs": _PATH,
            "grid_resolution": _INT2,
        },
    },
    "recover": {
        "type": "object",
        "additionalProperties": False,
        "required": ["points", "k1", "k2"],
        "properties": {
            "points": _PATH,
            "k1": _INT1,
            "k2": _INT1,
            "rank_tol": _POS,
            "sos_resolution": {"type": "integer", "minimum": 0},
        },
    },
    "nullspace": {
        "type": "object",
        "additionalProperties": False,
        "required": ["points", "l1", "l2"],
        "properties": {
            "points": _PATH,
            "l1": _INT1,
            "l2": _INT1,
            "rank_tol": _POS,
            "sos_resolution": {"type": "integer", "minimum": 0},
        },
    },
    "rank": {
        "type": "object",
        "additionalProperties": False,
        "required": ["points", "kernel"],
        "properties": {
            "points": _PATH,
            "kernel": {"enum": ["dirichlet", "gaussian"]},
            "l1": _INT1,
            "l2": _INT1,
            "sigma": _POS,
            "k1": _INT1,
            "k2": _INT1,
            "rank_tol": _POS,
        },
    },
    "denoise": {
        "type": "object",
        "additionalProperties": False,
        "required": ["points", "lam", "sigma"],
        "properties": {
            "points": _PATH,
            "lam": _NONNEG,
            "sigma": _POS,
            "gamma0": _POS,
            "gamma_decay": _UNIT,
            "gamma_min": _POS,
            "max_iters": _INT1,
            "conv_tol": _POS,
            "clamp_weights": {"type": "boolean"},
        },
    },
    "phase-transition": {
        "type": "object",
        "additionalProperties": False,
        "properties": {
            "k_min": _INT1,
            "k_max": _INT1,
            "n_min": _INT1,
            "n_max": _INT1,
            "trials": _INT1,
            "grid_resolution": _INT2,
            "success_threshold": _UNIT,
        },
    },
}


def load_config_file(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    return data


def validate_config(task: str, config: dict) -> dict:
    """Schema-check a resolved task configuration; unknown keys are rejected."""
    schema = CONFIG_SCHEMAS.get(task)
    if schema is None:
        raise ConfigError(f"unknown task {task!r}")
    try:
        jsonschema.validate(config, schema)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"invalid config at {path}: {exc.message}") from None
    return config
