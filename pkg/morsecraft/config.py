"""
Run configuration - deterministic defaults for every search and command.

Values come from (in increasing precedence) the built-in defaults, an
optional YAML file, and explicit overrides (CLI flags).
"""

import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from pydantic import BaseModel, Field, field_validator

from .exceptions import FormatError

THREADS_ENV = "MORSECRAFT_THREADS"


def default_threads() -> int:
    """Worker cap from MORSECRAFT_THREADS, else machine parallelism."""
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            value = int(raw)
        except ValueError:
            raise FormatError(f"{THREADS_ENV} must be an integer, got {raw!r}")
        if value > 0:
            return value
    return os.cpu_count() or 1


class RunConfig(BaseModel):
    """
    Deterministic run parameters shared by searches and CLI commands.
    """

    seed: int = Field(0, description="Seed for randomized searches")
    budget: int = Field(1_000_000, description="Node expansions per search")
    restarts: int = Field(10, description="Restarts for random_morse")
    threads: int = Field(default_factory=default_threads, description="Worker cap for restarts")
    face_cap: int = Field(50_000_000, description="Hard cap on materialized faces")
    exhaustive_facet_limit: int = Field(16, description="Top facets allowed for exhaustive search")
    max_derived_rounds: int = Field(3, description="Derived rounds nicesub may apply")

    @field_validator("budget", "restarts", "threads", "face_cap", "exhaustive_facet_limit")
    @classmethod
    def _positive(cls, value: int) -> int:
        if value <= 0:
            raise ValueError("must be a positive integer")
        return value

    @field_validator("seed", "max_derived_rounds")
    @classmethod
    def _non_negative(cls, value: int) -> int:
        if value < 0:
            raise ValueError("must be non-negative")
        return value

    @classmethod
    def from_yaml(cls, path: str, overrides: Optional[Dict[str, Any]] = None) -> "RunConfig":
        """
        Load a configuration file and apply overrides on top.

        Args:
            path: YAML file holding a mapping of RunConfig fields
            overrides: Explicit values (None entries are ignored)

        Returns:
            Validated RunConfig
        """
        file_path = Path(path)
        if not file_path.exists():
            raise FileNotFoundError(f"Config file not found: {path}")
        data = yaml.safe_load(file_path.read_text(encoding="utf-8")) or {}
        if not isinstance(data, dict):
            raise FormatError(f"config {path} must contain a mapping")
        return cls.build(data, overrides)

    @classmethod
    def build(cls, base: Optional[Dict[str, Any]] = None, overrides: Optional[Dict[str, Any]] = None) -> "RunConfig":
        merged: Dict[str, Any] = dict(base or {})
        for key, value in (overrides or {}).items():
            if value is not None:
                merged[key] = value
        return cls(**merged)
