import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, Optional, Union

from django.conf import settings
from jsonschema import validate, ValidationError

from exceptional_sets.exceptions import InvalidInput

logger = logging.getLogger(__name__)

CONFIG_VERSION = 1

EXPERIMENT_IDS = [
    "theorem1",
    "theorem2",
    "theorem2.5",
    "theorem3",
    "theorem4",
    "stolz",
    "cartan",
    "logderiv",
    "logdiff",
    "logderiv_disc",
    "avoidance",
    "cantor",
    "examples",
    "intervals",
]

# Experiments without randomness may omit the seed.
DETERMINISTIC_IDS = ["theorem3", "avoidance", "cantor", "examples"]


@dataclass
class ExperimentConfig:
    """Configuration for one experiment run"""

    experiment: str
    gauge: Union[str, Dict[str, Any], None] = None
    generator: Dict[str, Any] = field(default_factory=dict)
    seed: Optional[int] = None
    samples: Dict[str, int] = field(default_factory=dict)
    tolerances: Dict[str, float] = field(default_factory=dict)
    params: Dict[str, Any] = field(default_factory=dict)
    out_dir: Optional[str] = None
    version: int = CONFIG_VERSION

    def sample_count(self, name: str) -> int:
        defaults = {"monte_carlo": "monte_carlo_samples", "z": "logderiv_samples"}
        return int(self.samples.get(name, settings.LAB.get(defaults.get(name, ""), 1000)))

    def tolerance(self, name: str, default: float) -> float:
        return float(self.tolerances.get(name, default))

    def output_dir(self) -> Path:
        base = Path(self.out_dir) if self.out_dir else Path(settings.ESETLAB_OUT)
        return base / self.experiment

    def with_overrides(self, seed: Optional[int] = None, out_dir: Optional[str] = None) -> "ExperimentConfig":
        changes: Dict[str, Any] = {}
        if seed is not None:
            changes["seed"] = seed
        if out_dir is not None:
            changes["out_dir"] = out_dir
        return replace(self, **changes)

    def to_dict(self) -> Dict[str, Any]:
        payload = {
            "version": self.version,
            "experiment": self.experiment,
            "generator": self.generator,
            "samples": self.samples,
            "tolerances": self.tolerances,
            "params": self.params,
        }
        if self.gauge is not None:
            payload["gauge"] = self.gauge
        if self.seed is not None:
            payload["seed"] = self.seed
        if self.out_dir is not None:
            payload["out_dir"] = self.out_dir
        return payload


SCHEMA = {
    "$id": "esetlab:experiment-config:1",
    "type": "object",
    "required": ["experiment"],
    "properties": {
        "version": {"type": "integer", "const": CONFIG_VERSION},
        "experiment": {"type": "string", "enum": EXPERIMENT_IDS},
        "gauge": {
            "oneOf": [
                {"type": "string", "minLength": 1},
                {
                    "type": "object",
                    "required": ["kind"],
                    "properties": {
                        "kind": {"type": "string"},
                        "params": {"type": "object", "additionalProperties": {"type": "number"}},
                    },
                    "additionalProperties": False,
                },
            ]
        },
        "generator": {"type": "object"},
        "seed": {"type": "integer", "minimum": 0},
        "samples": {"type": "object", "additionalProperties": {"type": "integer", "minimum": 1}},
        "tolerances": {"type": "object", "additionalProperties": {"type": "number", "exclusiveMinimum": 0}},
        "params": {"type": "object"},
        "out_dir": {"type": "string"},
    },
    "additionalProperties": False,
    "if": {"not": {"properties": {"experiment": {"enum": DETERMINISTIC_IDS}}}},
    "then": {"required": ["seed"]},
}


def parse_config(payload: Dict[str, Any]) -> ExperimentConfig:
    try:
        validate(instance=payload, schema=SCHEMA)
    except ValidationError as e:
        logger.warning(f"Config failed schema validation: {e.message}")
        raise InvalidInput(f"Invalid experiment config: {e.message}") from e
    return ExperimentConfig(**payload)


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise InvalidInput(f"Unable to read config {path}: {e}") from e
    config = parse_config(payload)
    logger.debug(f"Loaded config {path} for {config.experiment}")
    return config


def bundled_config(name: str) -> ExperimentConfig:
    """One of the configs shipped in esetlab/configs."""
    path = Path(settings.CONFIG_DIR) / f"{name}.json"
    if not path.exists():
        raise InvalidInput(f"No bundled config named {name!r}")
    return load_config(path)


def dump_json(payload: Any) -> str:
    """Canonical JSON: sorted keys, fixed separators, trailing newline."""
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=True) + "\n"


def write_text(path: Union[str, Path], text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.info(f"Wrote {path}")
    return path
