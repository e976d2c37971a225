"""
Run configuration: a JSON document with ``structure``, ``grid``,
``excitation`` and ``options`` sections, plus the embedded presets.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from typing import Any

import jsonschema

from .core import PTLaserError, SpectralGrid
from .elements import (
    PRESETS,
    DfbHalf,
    GainSlab,
    Mirror,
    NearThresholdModel,
    Propagation,
    Slab,
    StructureSpec,
)
from .scattering import MODES
from .spectral import SearchRegion


class ConfigError(PTLaserError):
    pass


_number = {"type": "number"}
_complex = {
    "oneOf": [
        {"type": "number"},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    ]
}

_ELEMENT_FIELDS = {
    "slab": ({"n": _complex, "kl": _number, "length": _number}, ["n", "kl"]),
    "mirror": ({"r_m": _number}, ["r_m"]),
    "gain_slab": ({"gl": _number, "delta_g": _number, "length": _number}, ["gl"]),
    "dfb_half": ({"q0l": _number, "gl": _number, "offset": _number, "length": _number}, ["q0l", "gl"]),
    "propagation": ({"phase": _number, "length": _number}, ["phase"]),
    "near_threshold": (
        {"alpha": _number, "beta": _number, "eps": _number, "kappa": _complex},
        ["alpha", "beta", "eps"],
    ),
}

_ELEMENT_SCHEMAS = [
    {
        "type": "object",
        "properties": {"type": {"const": name}, **props},
        "required": ["type", *req],
        "additionalProperties": False,
    }
    for name, (props, req) in _ELEMENT_FIELDS.items()
]

SCHEMA = {
    "type": "object",
    "properties": {
        "structure": {
            "type": "object",
            "properties": {
                "preset": {"enum": sorted(PRESETS)},
                "params": {"type": "object"},
                "elements": {"type": "array", "minItems": 1, "items": {"oneOf": _ELEMENT_SCHEMAS}},
                "n0": {"type": "number", "exclusiveMinimum": 0},
            },
            "oneOf": [{"required": ["preset"]}, {"required": ["elements"]}],
            "additionalProperties": False,
        },
        "grid": {
            "type": "object",
            "properties": {"start": _number, "stop": _number, "count": {"type": "integer"}},
            "required": ["start", "stop", "count"],
            "additionalProperties": False,
        },
        "excitation": {
            "type": "object",
            "properties": {
                "mode": {"enum": list(MODES)},
                "sigma": {"type": "number", "minimum": 0},
                "phi": _number,
                "ratio": _complex,
                "cpa_at": {"oneOf": [{"type": "number"}, {"const": "auto"}]},
            },
            "required": ["mode"],
            "additionalProperties": False,
        },
        "options": {
            "type": "object",
            "properties": {
                "region": {
                    "type": "object",
                    "properties": {
                        "re_min": _number,
                        "re_max": _number,
                        "im_min": _number,
                        "im_max": _number,
                        "density": {"type": "integer", "minimum": 2},
                    },
                    "required": ["re_min", "re_max", "im_min", "im_max"],
                    "additionalProperties": False,
                },
                "tol": {"type": "number", "exclusiveMinimum": 0},
                "gtol": {"type": "number", "exclusiveMinimum": 0},
                "g_range": {"type": "array", "items": _number, "minItems": 2, "maxItems": 2},
                "pt_tol": {"type": "number", "exclusiveMinimum": 0},
                "pt_samples": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer"},
            },
            "additionalProperties": False,
        },
    },
    "required": ["structure"],
    "additionalProperties": False,
}


PRESET_CONFIGS: dict[str, dict[str, Any]] = {
    "fig2a": {
        "structure": {"preset": "near_threshold", "params": {"alpha": 3.0, "beta": 0.3, "eps": 0.02, "kappa": 1.0}},
        "grid": {"start": -0.2, "stop": 0.2, "count": 401},
        "excitation": {"mode": "coherent", "cpa_at": 0.0},
        "options": {"region": {"re_min": -0.5, "re_max": 0.5, "im_min": -0.5, "im_max": 0.5}},
    },
    "fig2b": {
        "structure": {"preset": "pt_dfb", "params": {"q0l": 1.0, "gl": 4.43}},
        "grid": {"start": -8.0, "stop": 8.0, "count": 1601},
        "excitation": {"mode": "coherent", "cpa_at": "auto"},
        "options": {"region": {"re_min": -8.0, "re_max": 8.0, "im_min": -2.0, "im_max": 2.0}, "g_range": [3.0, 6.0]},
    },
    "pt_dfb": {
        "structure": {"preset": "pt_dfb", "params": {"q0l": 1.0, "gl": 4.43}},
        "grid": {"start": -8.0, "stop": 8.0, "count": 1601},
        "excitation": {"mode": "single_left"},
        "options": {"region": {"re_min": -8.0, "re_max": 8.0, "im_min": -2.0, "im_max": 2.0}, "g_range": [3.0, 6.0]},
    },
    "fp_laser": {
        "structure": {"preset": "fp_laser", "params": {"r_m": 0.9, "gl": 0.05}},
        "grid": {"start": 0.0, "stop": 6.283185307179586, "count": 629},
        "excitation": {"mode": "single_left"},
        "options": {"region": {"re_min": 0.1, "re_max": 6.0, "im_min": -1.0, "im_max": 1.0}, "g_range": [0.0, 0.5]},
    },
    "near_threshold": {
        "structure": {"preset": "near_threshold", "params": {"alpha": 3.0, "beta": 0.3, "eps": 0.02, "kappa": 1.0}},
        "grid": {"start": -0.2, "stop": 0.2, "count": 401},
        "excitation": {"mode": "single_left"},
        "options": {"region": {"re_min": -0.5, "re_max": 0.5, "im_min": -0.5, "im_max": 0.5}},
    },
}

DEFAULT_OPTIONS = {"tol": 1e-8, "gtol": 1e-4, "pt_tol": 1e-12, "pt_samples": 1000, "seed": 0}


def _as_complex(v) -> complex:
    return complex(v[0], v[1]) if isinstance(v, list) else complex(v)


def _element(doc: dict):
    doc = dict(doc)
    kind = doc.pop("type")
    if "n" in doc:
        doc["n"] = _as_complex(doc["n"])
    if "kappa" in doc:
        doc["kappa"] = _as_complex(doc["kappa"])
    cls = {
        "slab": Slab,
        "mirror": Mirror,
        "gain_slab": GainSlab,
        "dfb_half": DfbHalf,
        "propagation": Propagation,
        "near_threshold": NearThresholdModel,
    }[kind]
    return cls(**doc)


@dataclass
class RunConfig:
    structure: StructureSpec
    grid: SpectralGrid | None
    excitation: dict
    options: dict
    preset: str
    document: dict

    @property
    def region(self) -> SearchRegion | None:
        reg = self.options.get("region")
        return SearchRegion(**reg) if reg else None


def set_path(doc: dict, dotted: str, value):
    keys = dotted.split(".")
    node = doc
    for k in keys[:-1]:
        node = node.setdefault(k, {})
        if not isinstance(node, dict):
            raise ConfigError(f"cannot set {dotted!r}: {k!r} is not an object")
    node[keys[-1]] = value


def assemble(preset: str | None = None, document: dict | None = None, overrides=()) -> dict:
    """Merge a preset, a user document and ``(path, value)`` overrides."""
    if preset is None and document is None:
        raise ConfigError("give --config or --preset")
    doc: dict = {}
    if preset is not None:
        if preset not in PRESET_CONFIGS:
            raise ConfigError(f"unknown preset {preset!r}; choose from {sorted(PRESET_CONFIGS)}")
        doc = copy.deepcopy(PRESET_CONFIGS[preset])
    if document is not None:
        for section, body in document.items():
            if isinstance(body, dict) and isinstance(doc.get(section), dict):
                if section == "structure":
                    doc[section] = copy.deepcopy(body)
                else:
                    doc[section].update(copy.deepcopy(body))
            else:
                doc[section] = copy.deepcopy(body)
    for path, value in overrides:
        set_path(doc, path, value)
    return doc


def parse(doc: dict, preset: str | None = None) -> RunConfig:
    """Validate ``doc`` and build the run objects; raises :class:`ConfigError`."""
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config error at {where}: {exc.message}") from None
    try:
        st = doc["structure"]
        if "preset" in st:
            params = dict(st.get("params", {}))
            if "kappa" in params:
                params["kappa"] = _as_complex(params["kappa"])
            structure = PRESETS[st["preset"]](**params)
        else:
            structure = StructureSpec(tuple(_element(e) for e in st["elements"]), n0=st.get("n0", 1.0))
        grid = SpectralGrid(**doc["grid"]) if "grid" in doc else None
        options = {**DEFAULT_OPTIONS, **doc.get("options", {})}
        if "region" in options:
            SearchRegion(**options["region"])
        excitation = dict(doc.get("excitation", {"mode": "single_left"}))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"config error: {exc}") from None
    return RunConfig(structure, grid, excitation, options, preset or structure.name, doc)


def load(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
