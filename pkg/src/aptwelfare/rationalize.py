"""Constructing primitives that reproduce an observed dataset.

For datasets passing :func:`aptwelfare.axioms.check_apt`, the canonical
threshold-attention primitives are:

* ``u0(y) = y - (smallest price from which the share at y is zero)``,
* ``u1`` the identity on residual income,
* an attention CDF read off ``1 - share`` wherever the share is positive,
  anchored at zero, and extended monotonically through the zero tail (with a
  point mass at infinity when the data shows a genuine jump into the tail).

For income-invariant datasets passing :func:`check_qrum`, the canonical
random-utility primitives tabulate the inverse share curve on a quantile
mesh; utility differences are that curve with unit price coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .axioms import check_apt, check_qrum, income_invariant_curve
from .config import (
    DEFAULT_CONTINUITY_MODULUS,
    DEFAULT_EQ_TOL,
    DEFAULT_JUMP_THRESHOLD,
    DEFAULT_QUANTILE_MESH,
)
from .dataset import ChoiceDataset
from .errors import (
    DomainError,
    NoZeroPriceError,
    NotRationalizableError,
    VerificationError,
    WellDefinednessError,
)
from .piecewise import AttentionCDF, MonotoneCurve


@dataclass(frozen=True)
class UtilityPair:
    """Utility schedules for the outside option (u0, over income) and the
    good (u1, over residual income).

    u0 must be non-decreasing and u1 strictly increasing. Incomes where
    ``u0(y) < u1(0)`` never stop buying (the good dominates at every price
    up to income); :meth:`reaches_indifference` flags them, and welfare
    analysis at such an income is undefined.
    """

    u0: MonotoneCurve
    u1: MonotoneCurve

    def __post_init__(self):
        if not self.u0.non_decreasing:
            raise DomainError("u0 must be non-decreasing")
        if not self.u1.strictly_increasing:
            raise DomainError("u1 must be strictly increasing")

    def prefers_good(self, y: float, p: float) -> bool:
        """Strict preference for buying at price p with income y.

        Ties go to the outside option.
        """
        return self.u0(y) < self.u1(y - p)

    def reaches_indifference(self, y: float) -> bool:
        """Whether some price in [0, y] makes buying no better than not."""
        return self.u1(0.0) <= self.u0(y)

    def to_dict(self) -> dict:
        return {
            "u0": self.u0.to_dict(),
            "u1": "identity" if self.u1.is_identity else self.u1.to_dict(),
        }


@dataclass(frozen=True)
class QRUMPrimitives:
    """Canonical income-free random-utility primitives.

    ``f`` maps a uniform quantile in [0, 1] to the price at which that
    quantile of consumers is indifferent; it must be non-increasing and span
    the full unit interval. ``beta`` (price coefficient) and ``v0`` are the
    canonical constants; ``v1(nu) = v0 + beta * f(nu)``.
    """

    f: MonotoneCurve
    beta: float = 1.0
    v0: float = 0.0

    def __post_init__(self):
        if self.beta <= 0:
            raise DomainError("beta must be positive")
        if not self.f.non_increasing:
            raise DomainError("f must be non-increasing")
        if self.f.xs[0] != 0.0 or self.f.xs[-1] != 1.0:
            raise DomainError("f must be tabulated over the full interval [0, 1]")

    def v1(self, nu: float) -> float:
        return self.v0 + self.beta * self.f(nu)

    def choice_prob(self, p: float) -> float:
        """Mass of uniform quantiles nu with f(nu) >= p."""
        ys = self.f.ys
        xs = self.f.xs
        # Count knots with value >= p; ys is non-increasing.
        k = int(np.searchsorted(-np.asarray(ys), -p, side="right"))
        if k == 0:
            return 0.0
        if k == len(ys):
            return 1.0
        if self.f.kind == "step":
            return float(xs[k])
        # Linear: the curve crosses p inside segment (k-1, k).
        y_hi, y_lo = ys[k - 1], ys[k]
        x_lo, x_hi = xs[k - 1], xs[k]
        return float(x_lo + (y_hi - p) / (y_hi - y_lo) * (x_hi - x_lo))

    def to_dict(self) -> dict:
        return {"f": self.f.to_dict(), "beta": self.beta, "v0": self.v0}


def construct_u0(ds: ChoiceDataset, eq_tol: float = DEFAULT_EQ_TOL) -> MonotoneCurve:
    """Outside-option utility: income minus the price where buying stops.

    Requires every income column to reach zero (report C at grid scale);
    raises :class:`VerificationError` if the tabulated values fail to be
    non-decreasing, which signals an upstream axiom-check inconsistency.
    """
    knots = []
    prev: tuple[float, float] | None = None
    for y in ds.grid.incomes:
        v = float(y) - ds.min_zero_price(float(y), eq_tol)
        if prev is not None and v < prev[1]:
            raise VerificationError(
                f"u0 not monotone between incomes {prev[0]!r} and {float(y)!r}"
            )
        knots.append((float(y), v))
        prev = (float(y), v)
    return MonotoneCurve(tuple(knots), kind="linear")


def construct_u1(ds: ChoiceDataset) -> MonotoneCurve:
    """Identity utility over residual income [0, max income]."""
    return MonotoneCurve.identity(float(ds.grid.incomes[-1]))


def construct_g(
    ds: ChoiceDataset,
    eq_tol: float = DEFAULT_EQ_TOL,
    jump_threshold: float = DEFAULT_JUMP_THRESHOLD,
) -> AttentionCDF:
    """Attention CDF read off the data: ``1 - share`` where the share is
    positive, anchored at zero, extended through the zero tail.

    The extension jumps to 1 at the first all-zero grid price unless some
    income shows a one-step drop of at least ``jump_threshold`` into its zero
    tail; then the CDF holds its last identified value and the remaining mass
    is a point mass at infinity (``tail_mass``).
    """
    grid = ds.grid
    values: list[float | None] = [None] * grid.n_prices
    for i in range(grid.n_prices):
        ref: float | None = None
        for j in range(grid.n_incomes):
            if i > grid.top_price_index(j):
                continue
            v = float(ds.q[i, j])
            if v <= eq_tol:
                continue
            if ref is None:
                ref = v
            elif abs(v - ref) > eq_tol:
                raise WellDefinednessError(
                    f"conflicting positive shares at price {float(grid.prices[i])!r}: "
                    f"{ref!r} vs {v!r}"
                )
        values[i] = ref

    last_pos = -1
    for i, v in enumerate(values):
        if v is not None:
            last_pos = i
    if any(v is None for v in values[: last_pos + 1]):
        gap = next(i for i, v in enumerate(values[: last_pos + 1]) if v is None)
        raise WellDefinednessError(
            f"no positive share at price {grid.prices[gap]!r} although larger "
            "prices still show positive shares"
        )

    knots: list[tuple[float, float]] = [(0.0, 0.0)]
    for i in range(1, last_pos + 1):
        knots.append((float(grid.prices[i]), 1.0 - float(values[i])))

    tail = False
    for y in grid.incomes:
        try:
            p_bar = ds.min_zero_price(float(y), eq_tol)
        except NoZeroPriceError:
            continue
        if p_bar <= float(grid.prices[0]):
            continue
        if ds.jump_at(float(y), p_bar, jump_threshold).is_jump:
            tail = True
            break

    extension_start: float | None = None
    tail_mass = 0.0
    first_undefined = max(last_pos + 1, 1)
    if first_undefined < grid.n_prices:
        extension_start = float(grid.prices[first_undefined])
        if tail:
            tail_mass = 1.0 - knots[-1][1]
        else:
            knots.append((extension_start, 1.0))
    else:
        # Shares stay positive through the top of the grid; whatever mass is
        # unaccounted for lies beyond the observed prices.
        tail_mass = 1.0 - knots[-1][1]

    return AttentionCDF(
        tuple(knots), kind="step", tail_mass=tail_mass, extension_start=extension_start
    )


def apt_rationalize(
    ds: ChoiceDataset,
    eq_tol: float = DEFAULT_EQ_TOL,
    jump_threshold: float = DEFAULT_JUMP_THRESHOLD,
    exact_grid: bool = False,
    reports=None,
) -> tuple[UtilityPair, AttentionCDF]:
    """Construct and verify threshold-attention primitives for a dataset.

    Runs :func:`check_apt` first (or reuses precomputed ``reports``) and
    raises :class:`NotRationalizableError` on failure. After construction,
    re-evaluates the model at every grid cell and raises
    :class:`VerificationError` if any cell is off by more than eq_tol.
    """
    suite = reports if reports is not None else check_apt(
        ds, eq_tol, jump_threshold, exact_grid
    )
    if not suite.passed:
        raise NotRationalizableError(
            f"dataset fails axioms: {', '.join(suite.failed_axioms)}", suite=suite
        )
    pair = UtilityPair(construct_u0(ds, eq_tol), construct_u1(ds))
    g = construct_g(ds, eq_tol, jump_threshold)

    grid = ds.grid
    for j, y in enumerate(grid.incomes):
        top = grid.top_price_index(j)
        for i in range(top + 1):
            p = float(grid.prices[i])
            model = g.survival(p) if pair.prefers_good(float(y), p) else 0.0
            observed = float(ds.q[i, j])
            if abs(model - observed) > eq_tol:
                raise VerificationError(
                    f"constructed primitives give {model!r} at "
                    f"(price {p!r}, income {float(y)!r}) but data has {observed!r}"
                )
    return pair, g


def qrum_quantile(
    ds: ChoiceDataset, nu: float, eq_tol: float = DEFAULT_EQ_TOL
) -> float:
    """Largest grid price whose share is at least nu.

    The inverse of the income-free share curve, evaluated as a supremum over
    grid prices. Requires an income-invariant dataset; nu must not exceed
    the largest share.
    """
    if not 0 <= nu <= 1:
        raise DomainError(f"quantile must lie in [0, 1], got {nu!r}")
    curve = income_invariant_curve(ds, eq_tol)
    qualifying = np.flatnonzero(curve >= nu - eq_tol)
    if qualifying.size == 0:
        raise DomainError(f"no grid price has share >= {nu!r}")
    return float(ds.grid.prices[int(qualifying[-1])])


def qrum_construct(
    ds: ChoiceDataset,
    quantile_mesh: int = DEFAULT_QUANTILE_MESH,
    eq_tol: float = DEFAULT_EQ_TOL,
    continuity_modulus: float = DEFAULT_CONTINUITY_MODULUS,
    forward_tol: float | None = None,
) -> QRUMPrimitives:
    """Tabulate the inverse share curve on a uniform quantile mesh.

    Runs :func:`check_qrum` first and raises
    :class:`NotRationalizableError` on failure. After construction, checks
    that the uniform-quantile mass of ``{f(nu) >= p}`` reproduces the share
    at every grid price within ``forward_tol`` (default ``2 / quantile_mesh``)
    and raises :class:`VerificationError` otherwise.
    """
    suite = check_qrum(ds, eq_tol, continuity_modulus)
    if not suite.passed:
        raise NotRationalizableError(
            f"dataset fails axioms: {', '.join(suite.failed_axioms)}", suite=suite
        )
    if forward_tol is None:
        forward_tol = 2.0 / quantile_mesh

    mesh = np.linspace(0.0, 1.0, quantile_mesh + 1)
    knots = tuple((float(nu), qrum_quantile(ds, float(nu), eq_tol)) for nu in mesh)
    prims = QRUMPrimitives(MonotoneCurve(knots, kind="step"))

    curve = income_invariant_curve(ds, eq_tol)
    for i, p in enumerate(ds.grid.prices):
        err = abs(prims.choice_prob(float(p)) - float(curve[i]))
        if err > forward_tol:
            raise VerificationError(
                f"forward check failed at price {float(p)!r}: "
                f"error {err!r} exceeds {forward_tol!r}"
            )
    return prims
