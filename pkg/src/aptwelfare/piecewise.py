"""Monotone piecewise curves and threshold distributions.

Two primitives shared across the package:

* :class:`MonotoneCurve` tabulates a function on explicit knots and evaluates
  it either by linear interpolation or by right-continuous step lookup. It
  backs utility schedules and inverse share curves.
* :class:`AttentionCDF` is a distribution over consideration thresholds with
  an optional point mass at infinity, supporting exact CDF evaluation,
  survival queries, and inverse-transform sampling.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError

Knots = tuple[tuple[float, float], ...]

_MASS_TOL = 1e-12


def _as_knots(knots: Iterable[Sequence[float]]) -> Knots:
    out = tuple((float(x), float(y)) for x, y in knots)
    if not out:
        raise DomainError("a curve needs at least one knot")
    xs = [x for x, _ in out]
    if any(not math.isfinite(x) for x in xs):
        raise DomainError("knot positions must be finite")
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise DomainError("knot positions must be strictly increasing")
    return out


@dataclass(frozen=True)
class MonotoneCurve:
    """Piecewise curve over explicit knots.

    ``kind="linear"`` interpolates between knots; ``kind="step"`` holds the
    value of the largest knot at or below the query (right-continuous).
    Queries outside the knot span clamp to the end values. Evaluation at a
    knot position returns the tabulated value exactly, with no arithmetic.
    """

    knots: Knots
    kind: str = "linear"

    def __post_init__(self):
        object.__setattr__(self, "knots", _as_knots(self.knots))
        if self.kind not in ("linear", "step"):
            raise DomainError(f"unknown curve kind {self.kind!r}")
        object.__setattr__(self, "_xs", tuple(x for x, _ in self.knots))
        object.__setattr__(self, "_ys", tuple(y for _, y in self.knots))

    @classmethod
    def identity(cls, hi: float, lo: float = 0.0) -> "MonotoneCurve":
        """The map x -> x tabulated on [lo, hi]."""
        if hi <= lo:
            raise DomainError("identity span must have hi > lo")
        return cls(((lo, lo), (hi, hi)), kind="linear")

    @property
    def xs(self) -> tuple[float, ...]:
        return self._xs

    @property
    def ys(self) -> tuple[float, ...]:
        return self._ys

    @property
    def is_identity(self) -> bool:
        return self.kind == "linear" and all(x == y for x, y in self.knots)

    @property
    def non_decreasing(self) -> bool:
        ys = self._ys
        return all(b >= a for a, b in zip(ys, ys[1:]))

    @property
    def non_increasing(self) -> bool:
        ys = self._ys
        return all(b <= a for a, b in zip(ys, ys[1:]))

    @property
    def strictly_increasing(self) -> bool:
        ys = self._ys
        return all(b > a for a, b in zip(ys, ys[1:]))

    def __call__(self, x: float) -> float:
        xs, ys = self._xs, self._ys
        if x <= xs[0]:
            return ys[0]
        if x >= xs[-1]:
            return ys[-1]
        i = bisect_right(xs, x) - 1
        if xs[i] == x:
            return ys[i]
        if self.kind == "step":
            return ys[i]
        slope = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])
        return ys[i] + (x - xs[i]) * slope

    def values(self, x: np.ndarray) -> np.ndarray:
        """Vectorized evaluation."""
        x = np.asarray(x, dtype=float)
        xs = np.asarray(self._xs)
        ys = np.asarray(self._ys)
        if self.kind == "linear":
            return np.interp(x, xs, ys)
        idx = np.searchsorted(xs, x, side="right") - 1
        idx = np.clip(idx, 0, len(xs) - 1)
        return ys[idx]

    def to_dict(self) -> dict:
        return {"knots": [[x, y] for x, y in self.knots], "kind": self.kind}


@dataclass(frozen=True)
class AttentionCDF:
    """Distribution of consideration thresholds.

    ``knots`` tabulate the CDF at increasing threshold values; ``kind``
    selects step (right-continuous, the shape read off grid data) or linear
    (continuous densities such as uniforms) behaviour between knots. A
    positive ``tail_mass`` is a point mass at +infinity: the CDF then never
    reaches 1 at any finite threshold, and the last knot value must equal
    ``1 - tail_mass``. With zero tail mass the last knot must reach exactly 1.

    ``extension_start`` optionally records the threshold from which knot
    values are monotone extension of the data rather than identified values.
    """

    knots: Knots
    kind: str = "step"
    tail_mass: float = 0.0
    extension_start: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "knots", _as_knots(self.knots))
        if self.kind not in ("linear", "step"):
            raise DomainError(f"unknown CDF kind {self.kind!r}")
        ts = [t for t, _ in self.knots]
        vs = [v for _, v in self.knots]
        if ts[0] < 0:
            raise DomainError("thresholds must be non-negative")
        if any(not 0 <= v <= 1 for v in vs):
            raise DomainError("CDF values must lie in [0, 1]")
        if any(b < a for a, b in zip(vs, vs[1:])):
            raise DomainError("CDF values must be non-decreasing")
        if ts[0] == 0 and vs[0] != 0:
            raise DomainError("CDF must be 0 at threshold 0")
        if self.kind == "linear" and ts[0] > 0 and vs[0] != 0:
            raise DomainError("linear CDF must start at value 0")
        if not 0 <= self.tail_mass <= 1:
            raise DomainError("tail_mass must lie in [0, 1]")
        if abs(vs[-1] + self.tail_mass - 1.0) > _MASS_TOL:
            raise DomainError(
                "last knot value plus tail mass must equal 1 "
                f"(got {vs[-1]} + {self.tail_mass})"
            )
        object.__setattr__(self, "_ts", tuple(ts))
        object.__setattr__(self, "_vs", tuple(vs))

    @classmethod
    def uniform(cls, lo: float, hi: float) -> "AttentionCDF":
        """Thresholds uniform on [lo, hi], lo >= 0."""
        if lo < 0 or hi <= lo:
            raise DomainError("uniform support needs 0 <= lo < hi")
        return cls(((lo, 0.0), (hi, 1.0)), kind="linear")

    @property
    def tail_flag(self) -> bool:
        """True when threshold mass persists beyond every finite knot."""
        return self.tail_mass > 0

    @property
    def support_max(self) -> float:
        """Largest threshold carrying mass (inf when tail_flag is set)."""
        return math.inf if self.tail_flag else self._ts[-1]

    def value(self, t: float) -> float:
        """CDF at threshold t (right-continuous)."""
        ts, vs = self._ts, self._vs
        if t < ts[0]:
            return 0.0
        if t >= ts[-1]:
            return vs[-1]
        i = bisect_right(ts, t) - 1
        if self.kind == "step" or ts[i] == t:
            return vs[i]
        slope = (vs[i + 1] - vs[i]) / (ts[i + 1] - ts[i])
        return vs[i] + (t - ts[i]) * slope

    def survival(self, p: float) -> float:
        """Mass of thresholds strictly above p (atoms at p excluded)."""
        return 1.0 - self.value(p)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Inverse-transform sample of n thresholds; tail draws are inf."""
        if n < 1:
            raise DomainError("sample size must be positive")
        u = rng.random(n)
        out = np.full(n, math.inf)
        finite = u < 1.0 - self.tail_mass
        uf = u[finite]
        ts = np.asarray(self._ts)
        vs = np.asarray(self._vs)
        if self.kind == "step":
            idx = np.searchsorted(vs, uf, side="left")
            idx = np.clip(idx, 0, len(ts) - 1)
            out[finite] = ts[idx]
        else:
            out[finite] = np.interp(uf, vs, ts)
        return out

    def to_dict(self) -> dict:
        return {
            "knots": [[t, v] for t, v in self.knots],
            "kind": self.kind,
            "tail_mass": self.tail_mass,
            "tail_flag": self.tail_flag,
            "extension_start": self.extension_start,
        }
