"""Magnetic pseudodifferential calculus on torus hulls."""

import json
from pathlib import Path

from ._magweyl import (
    Config,
    ConfigError,
    InputError,
    cocycle,
    cocycle_identity_defect,
    compose,
    compose_zero,
    expand,
    morphism_defect,
    rep_matrix,
    slope_fit,
    spectral_norm,
    triangle_flux,
    triangle_flux_oracle,
    validate_field,
)
from ._magweyl import audit as _audit

__all__ = [
    "Config",
    "ConfigError",
    "InputError",
    "audit",
    "cocycle",
    "cocycle_identity_defect",
    "compose",
    "compose_zero",
    "expand",
    "load_config",
    "morphism_defect",
    "rep_matrix",
    "slope_fit",
    "spectral_norm",
    "triangle_flux",
    "triangle_flux_oracle",
    "validate_field",
]


def load_config(source):
    """Config from a path, a JSON string or a dict."""
    if isinstance(source, dict):
        return Config.from_json(json.dumps(source))
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        return Config.from_json(Path(source).read_text())
    return Config.from_json(source)


def audit(config):
    """Returns (report dict, csv text, overall pass)."""
    document, csv, passed = _audit(config)
    return json.loads(document), csv, passed
