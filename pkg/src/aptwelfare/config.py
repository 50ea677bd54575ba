"""Shared numeric defaults and the run-level configuration record."""

from __future__ import annotations

import json
from dataclasses import dataclass, fields

from .errors import DomainError

# Absolute tolerance for probability comparisons. Shares within EQ_TOL of
# each other are equal; shares <= EQ_TOL are zero.
DEFAULT_EQ_TOL = 1e-9

# Minimum one-step share drop that counts as a genuine discontinuity.
DEFAULT_JUMP_THRESHOLD = 0.05

# Largest admissible share drop per unit of price for the continuity check.
DEFAULT_CONTINUITY_MODULUS = 10.0

# Number of quantile cells used when tabulating an inverse share curve.
DEFAULT_QUANTILE_MESH = 1024

# Bisection stops once the bracket is narrower than this (money units).
DEFAULT_BISECTION_TOL = 1e-9
DEFAULT_MAX_BISECTION_ITER = 200

# Absolute tolerance when matching money coordinates to grid points.
COORD_ATOL = 1e-9

# Tag stamped on every JSON document the CLI emits.
SCHEMA = "aptwelfare/1"


@dataclass
class RunConfig:
    """Bundle of tunable run parameters with validated defaults.

    The CLI builds one of these from flags and an optional JSON config file;
    library functions take the individual values as keyword arguments.
    """

    eq_tol: float = DEFAULT_EQ_TOL
    jump_threshold: float = DEFAULT_JUMP_THRESHOLD
    continuity_modulus: float = DEFAULT_CONTINUITY_MODULUS
    quantile_mesh: int = DEFAULT_QUANTILE_MESH
    bisection_tol: float = DEFAULT_BISECTION_TOL
    max_bisection_iter: int = DEFAULT_MAX_BISECTION_ITER
    seed: int = 0
    output_format: str = "json"

    def __post_init__(self):
        if not 0 < self.eq_tol < 1e-2:
            raise DomainError(f"eq_tol must be in (0, 1e-2), got {self.eq_tol}")
        if not 0 < self.jump_threshold <= 1:
            raise DomainError(
                f"jump_threshold must be in (0, 1], got {self.jump_threshold}"
            )
        if self.continuity_modulus <= 0:
            raise DomainError("continuity_modulus must be positive")
        if self.quantile_mesh < 2:
            raise DomainError("quantile_mesh must be at least 2")
        if not 0 < self.bisection_tol < 1:
            raise DomainError("bisection_tol must be in (0, 1)")
        if self.max_bisection_iter < 1:
            raise DomainError("max_bisection_iter must be positive")
        if self.output_format not in ("json", "table"):
            raise DomainError(f"unknown output format {self.output_format!r}")

    @classmethod
    def from_file(cls, path: str, **overrides) -> "RunConfig":
        """Load a JSON object of field overrides; explicit kwargs win."""
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        if not isinstance(raw, dict):
            raise DomainError("config file must hold a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise DomainError(f"unknown config keys: {', '.join(unknown)}")
        merged = {**raw, **{k: v for k, v in overrides.items() if v is not None}}
        return cls(**merged)
