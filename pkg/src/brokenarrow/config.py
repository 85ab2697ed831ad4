#!/usr/bin/env python3
"""brokenarrow.config

Shared configuration utilities for the brokenarrow CLI and library.

This module provides the helpers every subcommand needs:
- strict YAML loading (config/defaults.yaml)
- resolution of defaults: built-in fallbacks < YAML file < CLI flags
- parsing of symbolic numerals ("pi/4", "sqrt(2/5)") via sympy
- the RunConfig record the CLI hands to its handlers

Design notes:
- YAML loading is strict: an explicitly requested file must exist and be a mapping
  (ConfigError otherwise, exit code 2 in the CLI).
- The default config path may be absent; built-in fallbacks are used then.
- All functions are pure (no side effects on import).
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import yaml
from sympy import pi as sym_pi
from sympy.parsing.sympy_parser import parse_expr

from brokenarrow.errors import ConfigError


# -----------------------------------------------------------------------------
# Default paths and fallbacks
# -----------------------------------------------------------------------------
# Centralized so the CLI and tests use the same defaults.

DEFAULT_CONFIG_YAML = Path("config/defaults.yaml")

FALLBACK_DEFAULTS: Dict[str, Any] = {
    "tolerances": {
        "zero": 1e-10,
        "feasibility": 1e-9,
        "boundary": 1e-9,
        "normalization": 1e-9,
    },
    "sampling": {
        "seed": 20240101,
        "draws": 100000,
        "block_size": 65536,
        "rng": "PCG64",
    },
    "grid": {
        "points": 101,
        "resolution": 50,
    },
    "output": {
        "format": "json",
        "float_format": "%.17g",
    },
}

FAMILIES = ("hardy", "hu", "hu-generic", "singlet")


# -----------------------------------------------------------------------------
# YAML loading
# -----------------------------------------------------------------------------

def load_yaml(path: Path) -> Dict[str, Any]:
    """Load a YAML file and return it as a dict.

    Raises ConfigError when the file cannot serve as a config mapping.
    """
    if not path.exists():
        raise ConfigError(f"Config not found: {path}")
    try:
        with path.open("r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigError(f"Could not parse YAML at {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"Expected YAML mapping at {path}")
    return data


def _merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def load_defaults(path: Optional[Path] = None) -> Dict[str, Any]:
    """Resolve the defaults mapping.

    With path=None the default location is tried and silently skipped when
    absent (e.g. when running outside the repo root). An explicit path must exist.
    """
    if path is None:
        if not DEFAULT_CONFIG_YAML.exists():
            return copy.deepcopy(FALLBACK_DEFAULTS)
        path = DEFAULT_CONFIG_YAML
    return _merge(FALLBACK_DEFAULTS, load_yaml(path))


# -----------------------------------------------------------------------------
# Symbolic numerals
# -----------------------------------------------------------------------------

def parse_real(text: str) -> float:
    """Evaluate a real numeral such as '0.7854', 'pi/4' or 'sqrt(2/5)'."""
    try:
        expr = parse_expr(str(text).strip(), local_dict={"pi": sym_pi})
        value = float(expr.evalf(30))
    except Exception as e:
        raise ConfigError(f"Could not parse number: {text!r}") from e
    if not math.isfinite(value):
        raise ConfigError(f"Number is not finite: {text!r}")
    return value


def parse_angle(text: str, degrees: bool = False) -> float:
    """Parse an angle, returning radians."""
    value = parse_real(text)
    return math.radians(value) if degrees else value


def parse_complex(text: str) -> complex:
    """Parse 're,im' (or a bare real) into a complex number."""
    parts = [p for p in str(text).split(",")]
    if len(parts) == 1:
        return complex(parse_real(parts[0]), 0.0)
    if len(parts) != 2:
        raise ConfigError(f"Expected 're,im', got {text!r}")
    return complex(parse_real(parts[0]), parse_real(parts[1]))


def parse_complex_triple(items: Sequence[str]) -> Tuple[complex, complex, complex]:
    """Parse the three --uvw operands."""
    if len(items) != 3:
        raise ConfigError(f"--uvw takes exactly three 're,im' values, got {len(items)}")
    u, v, w = (parse_complex(x) for x in items)
    return (u, v, w)


def parse_settings(text: str, degrees: bool = False) -> List[Tuple[str, float]]:
    """Parse 'a=0,b=pi/4,c=pi/2' into [(label, peeling angle phi)].

    Values are full peeling angles; the basis half-angle is phi/2.
    """
    out: List[Tuple[str, float]] = []
    seen = set()
    for chunk in str(text).split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if "=" not in chunk:
            raise ConfigError(f"Setting must look like label=angle, got {chunk!r}")
        label, value = chunk.split("=", 1)
        label = label.strip()
        if not label or label in seen:
            raise ConfigError(f"Empty or duplicate setting label in {text!r}")
        seen.add(label)
        out.append((label, parse_angle(value, degrees=degrees)))
    if not out:
        raise ConfigError("No settings given")
    return out


# -----------------------------------------------------------------------------
# Run configuration
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    """Everything one CLI invocation needs, after defaults are resolved."""

    command: str
    family: Optional[str] = None
    alpha: Optional[float] = None
    uvw: Optional[Tuple[complex, complex, complex]] = None
    settings: Optional[Tuple[Tuple[str, float], ...]] = None
    tol: float = 1e-10
    feasibility_tol: float = 1e-9
    boundary_tol: float = 1e-9
    fmt: str = "json"
    out: Optional[Path] = None
    seed: int = 20240101
    draws: int = 100000
    block_size: int = 65536
    points: int = 101
    resolution: int = 50
    rng: str = "PCG64"
    extra: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for name in ("tol", "feasibility_tol", "boundary_tol"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be > 0")
        if self.fmt not in ("json", "csv"):
            raise ConfigError(f"Unknown format: {self.fmt}")
        if self.family is not None:
            if self.family not in FAMILIES:
                raise ConfigError(f"Unknown family: {self.family}")
            if self.family in ("hardy", "hu") and self.alpha is None and self.command != "sweep":
                raise ConfigError(f"--family {self.family} needs --alpha or --alpha-cos")
            if self.family == "hu-generic" and self.uvw is None:
                raise ConfigError("--family hu-generic needs --uvw")
        if self.points < 2:
            raise ConfigError("--points must be >= 2")
        if self.resolution < 1:
            raise ConfigError("--resolution must be > 0")
        if self.draws < 1:
            raise ConfigError("--draws must be > 0")

    def echo(self) -> Dict[str, Any]:
        """JSON-friendly echo of the config for the meta block."""
        return {
            "command": self.command,
            "family": self.family,
            "alpha": self.alpha,
            "uvw": [[z.real, z.imag] for z in self.uvw] if self.uvw else None,
            "settings": [list(s) for s in self.settings] if self.settings else None,
            "tol": self.tol,
            "feasibility_tol": self.feasibility_tol,
            "boundary_tol": self.boundary_tol,
            "format": self.fmt,
            "seed": self.seed,
            "draws": self.draws,
            "points": self.points,
            "resolution": self.resolution,
            **{k: v for k, v in self.extra.items()},
        }
