"""Equivalent-variation distributions for a price increase.

Given a dataset and a price change (p_old -> p_new at a fixed income), two
distributions of the compensating income S are identified:

* Under threshold attention (:func:`ev_distribution_apt`): non-buyers at the
  old price lose nothing; buyers who keep buying lose exactly the price
  difference; switchers lose their whole surplus, the gap between the
  reservation price and the old price. When the reservation price is
  point-identified (a detected jump into the zero tail, or full attention
  assumed) the result is three atoms; otherwise the switcher mass is only
  located inside an interval.
* Under income-free random utility (:func:`ev_distribution_rum`): the CDF at
  offset z is one minus the share at price p_old + z, tabulated at grid
  offsets, with a terminal atom at the full price difference.

:func:`fosd_check` compares the two; the attention-model distribution should
first-order stochastically dominate the random-utility one.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .config import COORD_ATOL, DEFAULT_EQ_TOL, DEFAULT_JUMP_THRESHOLD
from .dataset import ChoiceDataset
from .errors import DomainError, NotApplicableError, ProvenanceError

_MASS_TOL = 1e-9


@dataclass(frozen=True)
class PriceChange:
    """A price increase p_old -> p_new faced at a fixed income."""

    p_old: float
    p_new: float
    income: float

    def __post_init__(self):
        if self.p_old < 0:
            raise DomainError("p_old must be non-negative")
        if self.p_new <= self.p_old:
            raise DomainError(
                f"price change must be an increase, got {self.p_old!r} -> {self.p_new!r}"
            )
        if self.p_new > self.income:
            raise DomainError("p_new must not exceed income")

    @property
    def delta(self) -> float:
        return self.p_new - self.p_old

    def to_dict(self) -> dict:
        return {"p_old": self.p_old, "p_new": self.p_new, "income": self.income}


@dataclass(frozen=True)
class ReservationBound:
    """Identified location of the reservation price at one income.

    ``min_zero_price`` is always a lower bound; the reservation price itself
    lies in [reservation_lo, reservation_hi], a point iff ``point_identified``.
    """

    min_zero_price: float
    reservation_lo: float
    reservation_hi: float
    point_identified: bool

    def __post_init__(self):
        if self.min_zero_price != self.reservation_lo:
            raise DomainError("lower bound must equal the smallest zero-share price")
        if self.reservation_hi < self.reservation_lo:
            raise DomainError("bounds must satisfy lo <= hi")
        if self.point_identified and self.reservation_lo != self.reservation_hi:
            raise DomainError("point identification requires lo == hi")

    def to_dict(self) -> dict:
        return {
            "min_zero_price": self.min_zero_price,
            "reservation_lo": self.reservation_lo,
            "reservation_hi": self.reservation_hi,
            "point_identified": self.point_identified,
        }


@dataclass(frozen=True)
class IntervalMass:
    """Probability mass located somewhere inside [lo, hi]."""

    lo: float
    hi: float
    mass: float

    def __post_init__(self):
        if self.hi < self.lo:
            raise DomainError("interval needs lo <= hi")
        if not 0 < self.mass <= 1:
            raise DomainError("interval mass must lie in (0, 1]")

    def to_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "mass": self.mass}


@dataclass(frozen=True)
class EVDistribution:
    """Distribution of equivalent variation for one price change.

    ``atoms`` are (value, mass) pairs, sorted by value. ``interval`` holds
    mass whose location is only set-identified. ``staircase``, when present,
    tabulates the CDF at offsets in [0, delta): it already includes the atom
    at 0, rises through the continuous part, and the CDF jumps to 1 at delta.
    """

    model: str
    price_change: PriceChange
    atoms: tuple[tuple[float, float], ...]
    interval: IntervalMass | None = None
    staircase: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        if self.model not in ("apt", "rum", "empirical"):
            raise DomainError(f"unknown model label {self.model!r}")
        atoms = tuple((float(v), float(m)) for v, m in self.atoms)
        if any(m <= 0 for _, m in atoms):
            raise DomainError("atom masses must be positive")
        if any(v < 0 for v, _ in atoms):
            raise DomainError("equivalent variation cannot be negative")
        if any(b[0] <= a[0] for a, b in zip(atoms, atoms[1:])):
            raise DomainError("atoms must be sorted by strictly increasing value")
        object.__setattr__(self, "atoms", atoms)
        if self.staircase is not None:
            stair = tuple((float(z), float(f)) for z, f in self.staircase)
            if not stair or stair[0][0] != 0.0:
                raise DomainError("staircase must start at offset 0")
            if any(b[0] <= a[0] for a, b in zip(stair, stair[1:])):
                raise DomainError("staircase offsets must be strictly increasing")
            if any(b[1] < a[1] for a, b in zip(stair, stair[1:])):
                raise DomainError("staircase CDF must be non-decreasing")
            if any(not 0 <= f <= 1 for _, f in stair):
                raise DomainError("staircase CDF values must lie in [0, 1]")
            if stair[-1][0] >= self.price_change.delta:
                raise DomainError("staircase offsets must stay below delta")
            object.__setattr__(self, "staircase", stair)
        total = sum(m for _, m in atoms)
        if self.interval is not None:
            total += self.interval.mass
        if self.staircase is not None:
            # Mass the continuous part adds beyond the atom at offset 0.
            total += self.staircase[-1][1] - self.staircase[0][1]
        if abs(total - 1.0) > _MASS_TOL:
            raise DomainError(f"masses must sum to 1, got {total!r}")

    def cdf(self, z: float, interval_at: str = "lo") -> float:
        """CDF at z. Interval mass counts from its lo or hi endpoint.

        ``interval_at="lo"`` gives the stochastically smallest member of the
        identified set (the pointwise largest CDF), "hi" the other extreme.
        """
        if interval_at not in ("lo", "hi"):
            raise DomainError(f"interval_at must be 'lo' or 'hi', got {interval_at!r}")
        if z < 0:
            return 0.0
        if self.staircase is not None:
            if z >= self.price_change.delta:
                return 1.0
            i = bisect_right([o for o, _ in self.staircase], z) - 1
            return self.staircase[i][1] if i >= 0 else 0.0
        total = sum((m for v, m in self.atoms if v <= z), 0.0)
        if self.interval is not None:
            anchor = self.interval.lo if interval_at == "lo" else self.interval.hi
            if anchor <= z:
                total += self.interval.mass
        return total

    def breakpoints(self) -> tuple[float, ...]:
        """Sorted offsets where this CDF can move."""
        pts = {0.0, self.price_change.delta}
        pts.update(v for v, _ in self.atoms)
        if self.interval is not None:
            pts.update((self.interval.lo, self.interval.hi))
        if self.staircase is not None:
            pts.update(z for z, _ in self.staircase)
        return tuple(sorted(pts))

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "price_change": self.price_change.to_dict(),
            "atoms": [[v, m] for v, m in self.atoms],
            "interval": self.interval.to_dict() if self.interval else None,
            "cdf": [[z, f] for z, f in self.staircase] if self.staircase else None,
        }


@dataclass(frozen=True)
class FosdResult:
    """Outcome of a first-order stochastic dominance comparison."""

    dominates: bool
    max_gap: float
    max_gap_at: float
    violation_gap: float | None
    violation_at: float | None
    dominates_upper: bool

    def to_dict(self) -> dict:
        return {
            "verdict": self.dominates,
            "max_gap": self.max_gap,
            "max_gap_at": self.max_gap_at,
            "violation_gap": self.violation_gap,
            "violation_at": self.violation_at,
            "dominates_upper": self.dominates_upper,
        }


def _merge_atoms(raw: list[tuple[float, float]]) -> tuple[tuple[float, float], ...]:
    """Sort, merge near-coincident values, drop non-positive masses."""
    out: list[tuple[float, float]] = []
    for v, m in sorted(raw):
        if m <= 0:
            continue
        if out and abs(out[-1][0] - v) <= COORD_ATOL:
            out[-1] = (out[-1][0], out[-1][1] + m)
        else:
            out.append((v, m))
    return tuple(out)


def p10_bounds(
    ds: ChoiceDataset,
    y: float,
    assume_full_attention: bool = False,
    p_initial: float | None = None,
    eq_tol: float = DEFAULT_EQ_TOL,
    jump_threshold: float = DEFAULT_JUMP_THRESHOLD,
) -> ReservationBound:
    """Bound the reservation price (the price that stops purchases) at income y.

    The smallest zero-share price is always a lower bound. It is the
    reservation price itself exactly when the share jumps into the zero tail
    (drop >= jump_threshold) or when full attention is assumed; otherwise
    inattention may have silenced demand early and only [lower bound, income]
    is identified.

    Raises :class:`NotApplicableError` when nobody buys at ``p_initial`` (or,
    with no initial price given, at any price), since the data then reveal
    nothing about willingness to pay.
    """
    prices, col = ds.column(y)
    if p_initial is not None:
        i = ds.grid.price_index(p_initial)
        if i >= len(col) or col[i] <= eq_tol:
            raise NotApplicableError(
                f"no purchases at price {p_initial!r}, income {y!r}; "
                "reservation price not revealed"
            )
    elif not np.any(col > eq_tol):
        raise NotApplicableError(
            f"no purchases at any price for income {y!r}; "
            "reservation price not revealed"
        )
    p_bar = ds.min_zero_price(y, eq_tol)
    point = assume_full_attention
    if not point and p_bar > float(prices[0]):
        point = ds.jump_at(y, p_bar, jump_threshold).is_jump
    hi = p_bar if point else float(y)
    return ReservationBound(
        min_zero_price=p_bar,
        reservation_lo=p_bar,
        reservation_hi=hi,
        point_identified=point,
    )


def ev_distribution_apt(
    ds: ChoiceDataset,
    pc: PriceChange,
    assume_full_attention: bool = False,
    eq_tol: float = DEFAULT_EQ_TOL,
    jump_threshold: float = DEFAULT_JUMP_THRESHOLD,
) -> EVDistribution:
    """Identified equivalent-variation distribution under threshold attention.

    Masses follow the observed shares at the two prices: ``1 - q(p_old)`` at
    zero, ``q(p_new)`` at the full price difference, and the switcher mass
    ``q(p_old) - q(p_new)`` at the surplus gap. Switchers lose attention (or
    interest) entirely, so their loss is reservation price minus old price,
    which can exceed the price difference; it is an atom when the reservation
    price is point-identified and otherwise an interval reaching up to
    ``income - p_old``. When nobody buys at the old price the distribution is
    a unit atom at zero.
    """
    q_old = ds.q1(pc.p_old, pc.income)
    q_new = ds.q1(pc.p_new, pc.income)
    if q_old <= eq_tol:
        return EVDistribution("apt", pc, atoms=((0.0, 1.0),))
    if q_new > q_old + eq_tol:
        raise DomainError(
            "share rises over the price change; equivalent variation is "
            "undefined for non-rationalizable data"
        )
    bound = p10_bounds(
        ds,
        pc.income,
        assume_full_attention=assume_full_attention,
        p_initial=pc.p_old,
        eq_tol=eq_tol,
        jump_threshold=jump_threshold,
    )
    switchers = max(q_old - q_new, 0.0)
    raw = [(0.0, 1.0 - q_old), (pc.delta, q_new)]
    interval = None
    if bound.point_identified:
        raw.append((bound.reservation_lo - pc.p_old, switchers))
    elif switchers > 0:
        interval = IntervalMass(
            lo=bound.reservation_lo - pc.p_old,
            hi=pc.income - pc.p_old,
            mass=switchers,
        )
    return EVDistribution("apt", pc, atoms=_merge_atoms(raw), interval=interval)


def ev_distribution_rum(
    ds: ChoiceDataset, pc: PriceChange, eq_tol: float = DEFAULT_EQ_TOL
) -> EVDistribution:
    """Equivalent-variation distribution under income-free random utility.

    Everyone stays attentive, so a buyer's loss is capped at the price
    difference: the CDF at offset z in [0, delta) is ``1 - q(p_old + z)``,
    tabulated at every grid offset, with the remaining mass an atom at delta.
    Requires the share column to be non-increasing over [p_old, p_new].
    """
    grid = ds.grid
    j = grid.income_index(pc.income)
    i_old = grid.price_index(pc.p_old)
    i_new = grid.price_index(pc.p_new)
    col = ds.q[: grid.top_price_index(j) + 1, j]
    seg = col[i_old : i_new + 1]
    rises = np.flatnonzero(np.diff(seg) > eq_tol)
    if rises.size:
        raise DomainError(
            "share must be non-increasing over the price change; it rises at "
            f"price {float(grid.prices[i_old + int(rises[0]) + 1])!r}"
        )
    stair = tuple(
        (float(grid.prices[i] - grid.prices[i_old]), 1.0 - float(col[i]))
        for i in range(i_old, i_new)
    )
    q_old = float(col[i_old])
    q_last = float(col[i_new - 1])
    raw = [(0.0, 1.0 - q_old), (pc.delta, q_last)]
    return EVDistribution("rum", pc, atoms=_merge_atoms(raw), staircase=stair)


def fosd_check(
    f_apt: EVDistribution,
    f_rum: EVDistribution,
    eq_tol: float = DEFAULT_EQ_TOL,
) -> FosdResult:
    """Does the first distribution first-order stochastically dominate the
    second?

    Dominance holds when the first CDF sits at or below the second at every
    breakpoint of either distribution. Interval mass in the first distribution
    is placed at its lower endpoint (the stochastically smallest member of
    the identified set), so a pass is the strongest checkable claim; the
    result also reports whether dominance survives the upper-endpoint
    placement.
    """
    if f_apt.price_change != f_rum.price_change:
        raise ProvenanceError(
            "distributions describe different price changes: "
            f"{f_apt.price_change} vs {f_rum.price_change}"
        )
    zs = sorted(set(f_apt.breakpoints()) | set(f_rum.breakpoints()))
    max_gap = -math.inf
    max_gap_at = zs[0]
    min_gap = math.inf
    min_gap_at = zs[0]
    dominates_upper = True
    for z in zs:
        gap = f_rum.cdf(z) - f_apt.cdf(z, interval_at="lo")
        if gap > max_gap:
            max_gap, max_gap_at = gap, z
        if gap < min_gap:
            min_gap, min_gap_at = gap, z
        if f_apt.cdf(z, interval_at="hi") > f_rum.cdf(z) + eq_tol:
            dominates_upper = False
    dominates = min_gap >= -eq_tol
    return FosdResult(
        dominates=dominates,
        max_gap=max_gap,
        max_gap_at=max_gap_at,
        violation_gap=None if dominates else min_gap,
        violation_at=None if dominates else min_gap_at,
        dominates_upper=dominates_upper,
    )
