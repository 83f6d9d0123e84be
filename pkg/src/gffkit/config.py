"""Scenario configuration: loading (JSON or TOML), schema validation, hashing."""

from __future__ import annotations

import hashlib
import json
import os
import sys
from pathlib import Path
from typing import Any

import jsonschema

from gffkit.errors import ConfigError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

SCENARIOS = ("partitions", "gff-check", "wf-check", "growth", "kg", "compare", "js-example")
CONFIG_DIR_ENV = "GFFKIT_CONFIG_DIR"

_number = {"type": "number"}
_positive = {"type": "number", "exclusiveMinimum": 0}
_tolerance = {"type": "number", "exclusiveMinimum": 0, "maximum": 1}
_rational = {
    "oneOf": [
        {"type": "integer"},
        {"type": "string", "pattern": r"^\s*-?\d+(\s*/\s*\d+)?\s*$"},
        {
            "type": "object",
            "required": ["num", "den"],
            "properties": {"num": {"type": "integer"}, "den": {"type": "integer", "minimum": 1}},
            "additionalProperties": False,
        },
    ]
}

_model: dict = {
    "type": "object",
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["vacuum", "w-kernel", "scaled", "sum"]},
        "mass": _positive,
        "factor": _positive,
        "inner": {"$ref": "#/$defs/model"},
        "terms": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["weight", "model"],
                "properties": {"weight": _number, "model": {"$ref": "#/$defs/model"}},
            },
        },
    },
    "allOf": [
        {"if": {"properties": {"kind": {"const": "scaled"}}}, "then": {"required": ["factor", "inner"]}},
        {"if": {"properties": {"kind": {"const": "sum"}}}, "then": {"required": ["terms"]}},
    ],
}

_state: dict = {
    "type": "object",
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["quasi-free", "trivial", "mixture", "tilde-series"]},
        "model": {"$ref": "#/$defs/model"},
        "mass": _positive,
        "vacuum": {"$ref": "#/$defs/model"},
        "w": {"$ref": "#/$defs/model"},
        "components": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["weight", "state"],
                "properties": {
                    "weight": {"oneOf": [{"type": "number", "minimum": 0}, {"type": "string"}]},
                    "state": {"$ref": "#/$defs/state"},
                },
            },
        },
    },
    "allOf": [
        {"if": {"properties": {"kind": {"const": "quasi-free"}}}, "then": {"required": ["model"]}},
        {"if": {"properties": {"kind": {"const": "mixture"}}}, "then": {"required": ["components"]}},
    ],
}

_packet = {
    "type": "object",
    "properties": {
        "t0": _number, "x0": _number, "sigma_t": _positive, "sigma_x": _positive,
        "nu0": _number, "nu1": _number,
        "amplitude": {"oneOf": [_number, {"type": "object", "properties": {"re": _number, "im": _number}}]},
    },
    "additionalProperties": False,
}

_packets = {
    "oneOf": [
        {"type": "array", "minItems": 1, "items": {"$ref": "#/$defs/packet"}},
        {
            "type": "object",
            "required": ["random"],
            "properties": {
                "random": {"type": "integer", "minimum": 1, "maximum": 64},
                "seed": {"type": "integer", "minimum": 0},
                "real": {"type": "boolean"},
                "spread": _positive,
            },
            "additionalProperties": False,
        },
    ]
}

_slot = {
    "type": "object",
    "required": ["point", "covector"],
    "properties": {
        "label": {"type": "integer", "minimum": 1},
        "point": {"type": "object", "required": ["t", "x"], "properties": {"t": _rational, "x": _rational}},
        "covector": {"type": "object", "required": ["k0", "k1"], "properties": {"k0": _rational, "k1": _rational}},
    },
}

_query = {
    "type": "object",
    "required": ["slots"],
    "properties": {
        "variant": {"enum": ["smooth", "causal", "lightlike"]},
        "slots": {"type": "array", "minItems": 1, "maxItems": 12, "items": _slot},
        "expect": {"enum": ["member", "non-member"]},
    },
}

SCHEMA: dict = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$id": "gffkit.scenario-config/1",
    "type": "object",
    "$defs": {"model": _model, "state": _state, "packet": _packet},
    "properties": {
        "scenario": {"enum": list(SCENARIOS)},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "tolerance": _tolerance,
        "output": {"type": "string"},
        "csv": {"type": "string"},
        "limit": {"type": "integer", "minimum": 1, "maximum": 100000},
        "mass": _positive,
        "n": {"type": "integer", "minimum": 0, "maximum": 12},
        "n_max": {"type": "integer", "minimum": 1, "maximum": 12},
        "cap": {"type": "integer", "minimum": 0, "maximum": 14},
        "list_partitions": {"type": "boolean"},
        "state": {"$ref": "#/$defs/state"},
        "state_a": {"$ref": "#/$defs/state"},
        "state_b": {"$ref": "#/$defs/state"},
        "packets": _packets,
        "packet": {"$ref": "#/$defs/packet"},
        "configurations": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "array", "minItems": 4, "maxItems": 4, "items": {"$ref": "#/$defs/packet"}},
        },
        "queries": {"type": "array", "items": _query},
        "suite": {
            "type": "object",
            "required": ["n", "samples"],
            "properties": {
                "n": {"type": "integer", "minimum": 2, "maximum": 6},
                "samples": {"type": "integer", "minimum": 1, "maximum": 10000},
                "variant": {"enum": ["smooth", "causal", "lightlike"]},
            },
            "additionalProperties": False,
        },
        "expect": {"enum": ["analytic", "non-analytic", "bisolution", "defect"]},
        "masses": {"type": "array", "items": _positive, "minItems": 1},
    },
    "additionalProperties": False,
}

_REQUIRED = {
    "partitions": ["n"],
    "gff-check": ["state", "packets", "n_max"],
    "wf-check": [],
    "growth": ["state", "n_max"],
    "kg": ["state", "packets"],
    "compare": ["state_a", "state_b", "n", "packets"],
    "js-example": [],
}


def _path_of(err) -> str:
    parts = [str(p) for p in err.absolute_path]
    return "/".join(parts) if parts else "<root>"


def validate(config: dict, scenario: str | None = None) -> dict:
    """Raise :class:`ConfigError` listing every problem found."""
    if not isinstance(config, dict):
        raise ConfigError("configuration must be a table/object")
    validator = jsonschema.Draft202012Validator(SCHEMA)
    problems = [
        f"{_path_of(e)}: {e.message}"
        for e in sorted(validator.iter_errors(config), key=lambda e: (list(map(str, e.absolute_path)), e.message))
    ]
    scen = scenario or config.get("scenario")
    if scen is None:
        problems.append("<root>: no scenario given (set 'scenario' or use a subcommand)")
    elif scen not in SCENARIOS:
        problems.append(f"<root>: unknown scenario {scen!r}")
    else:
        if config.get("scenario") not in (None, scen):
            problems.append(f"scenario: config says {config['scenario']!r} but the subcommand is {scen!r}")
        for key in _REQUIRED[scen]:
            if key not in config:
                problems.append(f"{key}: required for scenario {scen!r}")
        if scen == "wf-check" and "queries" not in config and "suite" not in config:
            problems.append("<root>: wf-check needs 'queries' or 'suite'")
        if scen == "compare" and isinstance(config.get("n"), int) and config["n"] > 10:
            problems.append("n: compare evaluates order n + 2, so n must be <= 10")
    if problems:
        raise ConfigError(problems)
    return config


def resolve_path(path: str | os.PathLike) -> Path:
    p = Path(path)
    if p.is_absolute() or p.exists():
        return p
    base = os.environ.get(CONFIG_DIR_ENV)
    if base and (Path(base) / p).exists():
        return Path(base) / p
    return p


def load(path: str | os.PathLike) -> dict:
    p = resolve_path(path)
    try:
        raw = p.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config {str(path)!r}: {exc.strerror or exc}") from exc
    try:
        if p.suffix.lower() == ".toml":
            return tomllib.loads(raw.decode("utf-8"))
        return json.loads(raw.decode("utf-8"))
    except (ValueError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot parse {p.name}: {exc}") from exc


def config_hash(config: dict) -> str:
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def get(config: dict, key: str, default: Any = None) -> Any:
    return config.get(key, default)
