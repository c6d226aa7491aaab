"""Experiment configuration: JSON schema, validation and object construction."""

from __future__ import annotations

import copy
import json
import re
from dataclasses import dataclass
from pathlib import Path

import jsonschema
import numpy as np

from .engine import Constant, Harmonic, make_schedule
from .errors import ConfigError, InvalidInput
from .geometry import make_set
from .problems import Problem, QuadraticCosine, make_noise, make_objective

_num = {"type": "number"}
_vec = {"type": "array", "items": _num, "minItems": 1}
_mat = {"type": "array", "items": _vec, "minItems": 1}
_pos = {"type": "number", "exclusiveMinimum": 0}
_prob = {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1}
_alpha = {"type": "number", "exclusiveMinimum": 0, "maximum": 0.5}


def _one_of(**variants):
    return {
        "type": "object",
        "minProperties": 1,
        "maxProperties": 1,
        "additionalProperties": False,
        "properties": {
            k: {"type": "object", "additionalProperties": False, "properties": props,
                "required": req}
            for k, (props, req) in variants.items()
        },
    }


SET_SCHEMA = _one_of(
    box=({"lower": _vec, "upper": _vec}, ["lower", "upper"]),
    ball=({"center": _vec, "radius": _pos}, ["center", "radius"]),
    polytope=({"A": _mat, "b": _vec}, ["A", "b"]),
)

PROBLEM_SCHEMA = _one_of(
    quadratic_cosine=({"P": _mat, "q": _vec, "c": _num, "kappa": _num}, ["P", "q"]),
    quadratic=({"P": _mat, "q": _vec}, ["P"]),
    linear=({"q": _vec}, ["q"]),
    example41=({}, []),
)

NOISE_SCHEMA = _one_of(
    zero=({}, []),
    gaussian=({"sigma_hat": _pos}, ["sigma_hat"]),
    rademacher=({"magnitude": _pos}, ["magnitude"]),
    bounded=({"half_width": _pos}, ["half_width"]),
    ar1=({"rho": _prob, "sigma_hat": _pos}, ["rho", "sigma_hat"]),
)

SCHEDULE_SCHEMA = _one_of(
    constant=({"alpha": _alpha}, ["alpha"]),
    harmonic=({"a": _pos, "b": _pos}, ["a", "b"]),
    custom=({"values": {"type": "array", "items": _alpha, "minItems": 1}}, ["values"]),
)

PANEL_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "problem": PROBLEM_SCHEMA,
        "set": SET_SCHEMA,
        "noise": NOISE_SCHEMA,
        "schedule": SCHEDULE_SCHEMA,
        "N": {"type": "integer", "minimum": 1},
        "x0": _vec,
    },
}

#: published configuration schema; ``default`` entries are filled in by :func:`resolve`
SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "psgdlab experiment",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "experiment": {"enum": ["run", "example41", "fig1", "rates", "robbins_monro",
                                "constants"]},
        "problem": PROBLEM_SCHEMA,
        "set": SET_SCHEMA,
        "noise": NOISE_SCHEMA,
        "assumption": {"enum": ["A1", "A2", "A3"]},
        "schedule": SCHEDULE_SCHEMA,
        "N": {"type": "integer", "minimum": 1},
        "x0": _vec,
        "seeds": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "count": {"type": "integer", "minimum": 1, "default": 1},
                "master": {"type": "integer", "minimum": 0, "default": 0},
            },
            "default": {"count": 1, "master": 0},
        },
        "measures": {
            "type": "array",
            "items": {"enum": ["goldstein", "gradient_mapping", "tangent_residual",
                               "moreau"]},
            "uniqueItems": True,
            "default": ["goldstein", "gradient_mapping"],
        },
        "fixed_eps": {"type": "array", "items": {"type": "number", "minimum": 0}, "default": []},
        "moreau_lambda": {**_pos, "default": 0.1},
        "deltas": {"type": "array", "items": _prob, "default": [0.1]},
        "output_dir": {"type": "string", "default": "out"},
        "h": {**_pos, "maximum": 0.01},
        "threads": {"type": "integer", "minimum": 1, "default": 1},
        "tail_fraction": {**_prob, "default": 0.5},
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "N": {"type": "array", "items": {"type": "integer", "minimum": 1}},
                "alpha_rule": {"enum": ["N^-2/3", "N^-4/5"], "default": "N^-2/3"},
                "alpha_scale": {**_pos, "default": 1.0},
                "delta": {**_prob, "default": 0.1},
            },
            "required": ["N"],
        },
        "right": PANEL_SCHEMA,
        "divergence_candidates": {"type": "integer", "minimum": 2, "default": 16},
    },
}

_DOMAIN_MESSAGES = {
    "alpha": "alpha must lie in (0, 0.5]",
    "values": "alpha must lie in (0, 0.5]",
    "deltas": "delta must lie in (0, 1)",
    "delta": "delta must lie in (0, 1)",
}


@dataclass
class ExperimentConfig:
    """Validated configuration with defaults filled in."""

    raw: dict
    source: str | None = None

    def __getitem__(self, key):
        return self.raw[key]

    def get(self, key, default=None):
        return self.raw.get(key, default)

    @property
    def seed_count(self):
        return self.raw["seeds"]["count"]

    @property
    def master_seed(self):
        return self.raw["seeds"]["master"]

    @property
    def output_dir(self):
        return Path(self.raw["output_dir"])

    def to_json(self):
        return json.dumps(self.raw, indent=2, sort_keys=True)


def _locate(text, path):
    """Best-effort line number of the innermost key of ``path`` in ``text``."""
    if text is None:
        return None
    keys = [p for p in path if isinstance(p, str)]
    pos = 0
    line = None
    for key in keys:
        m = re.compile(r'"%s"\s*:' % re.escape(key)).search(text, pos)
        if m is None:
            break
        pos = m.end()
        line = text.count("\n", 0, m.start()) + 1
    return line


def _fill_defaults(schema, value):
    if not isinstance(value, dict) or schema.get("type") != "object":
        return value
    for key, sub in schema.get("properties", {}).items():
        if key not in value and "default" in sub:
            value[key] = copy.deepcopy(sub["default"])
        if key in value:
            _fill_defaults(sub, value[key])
    return value


def resolve(data, text=None, source=None):
    """Validate ``data`` against :data:`SCHEMA` and fill defaults."""
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(data),
                    key=lambda e: (len(e.path), [str(p) for p in e.path]))
    if errors:
        err = errors[0]
        path = list(err.absolute_path)
        key = next((p for p in reversed(path) if isinstance(p, str)), None)
        if err.validator in ("maximum", "minimum", "exclusiveMinimum", "exclusiveMaximum") \
                and key in _DOMAIN_MESSAGES:
            msg = _DOMAIN_MESSAGES[key]
        elif err.validator == "additionalProperties":
            msg = f"unknown key: {err.message}"
            extra = re.findall(r"'([^']+)'", err.message)
            if extra:
                path = path + [extra[0]]
        else:
            msg = err.message
        raise ConfigError(msg, path=path, line=_locate(text, path))
    data = _fill_defaults(SCHEMA, copy.deepcopy(data))
    return ExperimentConfig(data, source)


def parse_config(path):
    """Read and validate a JSON configuration file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}", path=str(path)) from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg}", path="/", line=exc.lineno) from exc
    return resolve(data, text, str(path))


# -- object construction ---------------------------------------------------------

def build_set(spec):
    try:
        return make_set(spec)
    except InvalidInput as exc:
        raise ConfigError(str(exc), path="set") from exc


def build_problem(section, dim=None):
    """Problem from a section holding ``problem``, ``noise`` and ``assumption``."""
    spec = section.get("problem")
    if spec is None:
        raise ConfigError("missing problem", path="problem")
    noise_spec = section.get("noise")
    try:
        if "example41" in spec:
            obj = QuadraticCosine.linear([-1.0])
            noise_spec = noise_spec or {"rademacher": {"magnitude": 2.0}}
        else:
            obj = make_objective(spec)
        noise = make_noise(noise_spec or {"zero": {}}, obj.dim)
        name = "example41" if "example41" in spec else "additive"
        return Problem(obj, noise, section.get("assumption"), name=name)
    except (InvalidInput, KeyError) as exc:
        raise ConfigError(str(exc), path="problem") from exc


def build_schedule(spec):
    try:
        return make_schedule(spec)
    except InvalidInput as exc:
        raise ConfigError(str(exc), path="schedule") from exc


def build_x0(section, cset):
    x0 = section.get("x0")
    x0 = np.zeros(cset.dim) if x0 is None else np.asarray(x0, dtype=float)
    if x0.shape != (cset.dim,):
        raise ConfigError(f"x0 must have {cset.dim} entries", path="x0")
    if not cset.contains(x0):
        raise ConfigError("x0 lies outside the set", path="x0")
    return x0


def require(cfg, *keys):
    for key in keys:
        if cfg.get(key) is None:
            raise ConfigError(f"missing required key {key!r}", path=key)


def is_robbins_monro(schedule):
    return isinstance(schedule, Harmonic)


def is_constant(schedule):
    return isinstance(schedule, Constant)

