"""Versioned JSON schemas of the artifacts written by the commands."""

import logging
from typing import Any, Dict, Optional

from jsonschema import validate, ValidationError

from exceptional_sets.exceptions import InvalidInput

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

_NUMBER = {"type": "number"}
_NULLABLE_NUMBER = {"type": ["number", "null"]}

GAUGE_SCHEMA = {
    "$id": "esetlab:gauge:1",
    "type": "object",
    "required": ["kind", "params"],
    "properties": {
        "kind": {"type": "string"},
        "params": {"type": "object", "additionalProperties": _NUMBER},
        "x0": _NUMBER,
        "R": _NUMBER,
        "alpha": _NUMBER,
        "beta": _NUMBER,
        "tau": _NUMBER,
    },
}

DISC_COLLECTION_SCHEMA = {
    "$id": "esetlab:disc-collection:1",
    "type": "object",
    "required": ["ambient", "gauge", "epsilon", "tail_index", "discs"],
    "properties": {
        "ambient": {"enum": ["plane", "unit_disc"]},
        "gauge": GAUGE_SCHEMA,
        "epsilon": {"type": "number", "exclusiveMinimum": 0},
        "tail_index": {"type": "integer", "minimum": 0},
        "discs": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["re", "im", "r"],
                "properties": {"re": _NUMBER, "im": _NUMBER, "r": {"type": "number", "exclusiveMinimum": 0}},
                "additionalProperties": False,
            },
        },
    },
}

HIT_REPORT_SCHEMA = {
    "$id": "esetlab:hit-report:1",
    "type": "object",
    "required": ["samples", "hits", "fraction", "reference_ratio", "seed"],
    "properties": {
        "samples": {"type": "integer", "minimum": 1},
        "hits": {"type": "integer", "minimum": 0},
        "fraction": _NUMBER,
        "reference_ratio": _NUMBER,
        "bound_ratio": _NULLABLE_NUMBER,
        "seed": {"type": "integer"},
    },
}

DENSITY_REPORT_SCHEMA = {
    "$id": "esetlab:density-report:1",
    "type": "object",
    "required": ["r_grid", "tail_values", "ratio_values", "limsup_estimate"],
    "properties": {
        "r_grid": {"type": "array", "items": _NUMBER},
        "tail_values": {"type": "array", "items": _NUMBER},
        "ratio_values": {"type": "array", "items": _NUMBER},
        "limsup_estimate": _NUMBER,
    },
}

AVOIDANCE_REPORT_SCHEMA = {
    "$id": "esetlab:avoidance-report:1",
    "type": "object",
    "required": ["R", "violations", "density_trajectory"],
    "properties": {
        "R": _NUMBER,
        "violations": {"type": "array", "items": _NUMBER},
        "density_trajectory": {"type": "array", "items": _NUMBER},
    },
}

BOUND_REPORT_SCHEMA = {
    "$id": "esetlab:bound-report:1",
    "type": "object",
    "required": ["summary", "samples"],
    "properties": {
        "summary": {
            "type": "object",
            "required": ["empirical_C", "stability", "violations"],
        },
        "samples": {
            "type": "array",
            "items": {"type": "object", "required": ["z", "lhs", "rhs", "ratio"]},
        },
    },
}

EXPERIMENT_RESULT_SCHEMA = {
    "$id": "esetlab:experiment-result:1",
    "type": "object",
    "required": ["experiment", "passed", "metrics"],
    "properties": {
        "experiment": {"type": "string"},
        "passed": {"type": "boolean"},
        "metrics": {"type": "object"},
    },
}

ERROR_SCHEMA = {
    "$id": "esetlab:error:1",
    "type": "object",
    "required": ["error", "message", "exit_code"],
    "properties": {
        "error": {"type": "string"},
        "message": {"type": "string"},
        "exit_code": {"enum": [2, 3, 4]},
    },
}

ARTIFACT_SCHEMAS: Dict[str, Dict[str, Any]] = {
    "gauge": GAUGE_SCHEMA,
    "collection": DISC_COLLECTION_SCHEMA,
    "hits": HIT_REPORT_SCHEMA,
    "density": DENSITY_REPORT_SCHEMA,
    "avoidance": AVOIDANCE_REPORT_SCHEMA,
    "bound": BOUND_REPORT_SCHEMA,
    "result": EXPERIMENT_RESULT_SCHEMA,
    "error": ERROR_SCHEMA,
}


def validate_artifact(name: str, payload: Dict[str, Any]) -> Dict[str, Any]:
    try:
        schema = ARTIFACT_SCHEMAS[name]
    except KeyError as e:
        raise InvalidInput(f"No artifact schema named {name!r}") from e
    try:
        validate(instance=payload, schema=schema)
    except ValidationError as e:
        raise InvalidInput(f"{name} artifact does not match its schema: {e.message}") from e
    return payload


def artifact_kind(filename: str) -> Optional[str]:
    """Schema name for an artifact file, from its stem prefix; None when unschematised."""
    stem = filename.rsplit(".", 1)[0]
    for prefix in ("collection", "hits", "density", "avoidance", "bound"):
        if stem == prefix or stem.startswith(prefix + "_"):
            return prefix
    return None
