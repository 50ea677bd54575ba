"""Consumer-level simulation oracle.

Builds synthetic populations, runs their exact forward choice model onto a
price/income grid, and measures equivalent variation consumer by consumer by
solving each indifference equation numerically. Nothing here reuses the
identification formulas, so simulated results are an independent check on
them.

Two population kinds are supported:

* ``"apt"``: one utility pair shared by everyone plus heterogeneous attention
  thresholds, given either as a continuous law (:class:`~.piecewise.AttentionCDF`)
  or as an explicit finite list.
* ``"qrum"``: income-free random utility, heterogeneous valuations given by a
  quantile curve (:class:`~.rationalize.QRUMPrimitives`).
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

import numpy as np

from .config import (
    COORD_ATOL,
    DEFAULT_BISECTION_TOL,
    DEFAULT_MAX_BISECTION_ITER,
)
from .dataset import ChoiceDataset, PriceGrid, dataset_from_function
from .errors import ConvergenceError, DomainError
from .piecewise import AttentionCDF, MonotoneCurve
from .rationalize import QRUMPrimitives, UtilityPair
from .welfare import EVDistribution, PriceChange


@dataclass(frozen=True)
class Population:
    """A synthetic population with a known data-generating process.

    Exactly one attention description (``attention`` law or finite
    ``thresholds``) is required for kind "apt"; kind "qrum" instead requires
    ``qrum`` and nothing else.
    """

    kind: str
    utilities: UtilityPair | None = None
    attention: AttentionCDF | None = None
    thresholds: tuple[float, ...] | None = None
    qrum: QRUMPrimitives | None = None
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("apt", "qrum"):
            raise DomainError(f"population kind must be 'apt' or 'qrum', got {self.kind!r}")
        if self.thresholds is not None:
            ts = tuple(float(t) for t in self.thresholds)
            if not ts:
                raise DomainError("thresholds must be non-empty")
            if any(math.isnan(t) or t < 0 for t in ts):
                raise DomainError("thresholds must be non-negative (inf allowed)")
            object.__setattr__(self, "thresholds", ts)
        if self.kind == "apt":
            if self.utilities is None:
                raise DomainError("kind 'apt' requires utilities")
            if (self.attention is None) == (self.thresholds is None):
                raise DomainError(
                    "kind 'apt' requires exactly one of attention or thresholds"
                )
            if self.qrum is not None:
                raise DomainError("kind 'apt' does not take qrum primitives")
        else:
            if self.qrum is None:
                raise DomainError("kind 'qrum' requires qrum primitives")
            if not (
                self.utilities is None
                and self.attention is None
                and self.thresholds is None
            ):
                raise DomainError("kind 'qrum' takes only qrum primitives")

    def attention_survival(self, p: float) -> float:
        """Fraction of the population attentive at price p (threshold > p)."""
        if self.thresholds is not None:
            n = len(self.thresholds)
            return sum(1 for t in self.thresholds if t > p) / n
        if self.attention is not None:
            return self.attention.survival(p)
        return 1.0

    def sample_thresholds(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.thresholds is not None:
            return np.asarray(self.thresholds, dtype=float)
        assert self.attention is not None
        return self.attention.sample(rng, n)


def population_from_spec(spec: dict) -> Population:
    """Build a population from a plain-dict description (CLI ``--spec``).

    Recognized keys: ``kind``; for "apt": ``u0_knots`` (list of [x, value]
    knots, or the string "linear" for the identity outside-good utility over
    [0, max income]), ``u1_offset`` (float c, giving the inside-good utility
    x + c; default 0 is the identity), ``g`` ({"uniform": [lo, hi]},
    {"knots": [[t, F], ...], "kind": ...}, or {"thresholds": [...]}), and a
    top-level ``tail_mass`` (never-attentive share stacked on a "uniform" or
    "knots" attention form); for "qrum": ``qrum`` ({"f_knots":
    [[nu, price], ...], "f_kind": "step"|"linear", "beta", "v0"}). ``u0``,
    ``u1`` ("identity", {"offset": c}, or {"knots": [...]}), and
    ``attention`` are accepted as richer aliases of ``u0_knots``,
    ``u1_offset``, and ``g``. ``seed`` and ``incomes`` are allowed everywhere
    (``incomes`` is read by callers that build grids, not here).
    """
    if not isinstance(spec, dict):
        raise DomainError("population spec must be a JSON object")
    known = {
        "kind",
        "u0",
        "u0_knots",
        "u1",
        "u1_offset",
        "attention",
        "g",
        "tail_mass",
        "qrum",
        "seed",
        "incomes",
    }
    unknown = set(spec) - known
    if unknown:
        raise DomainError(f"unknown population spec keys: {sorted(unknown)}")
    kind = spec.get("kind")
    seed = int(spec.get("seed", 0))
    if kind == "qrum":
        q = spec.get("qrum")
        if not isinstance(q, dict) or "f_knots" not in q:
            raise DomainError("kind 'qrum' needs qrum.f_knots")
        f = MonotoneCurve(
            tuple((float(x), float(v)) for x, v in q["f_knots"]),
            kind=q.get("f_kind", "step"),
        )
        return Population(
            kind="qrum",
            qrum=QRUMPrimitives(
                f, beta=float(q.get("beta", 1.0)), v0=float(q.get("v0", 0.0))
            ),
            seed=seed,
        )
    if kind != "apt":
        raise DomainError(f"population kind must be 'apt' or 'qrum', got {kind!r}")

    if "u0" in spec and "u0_knots" in spec:
        raise DomainError("give u0 knots under one key, not both u0 and u0_knots")
    u0_spec = spec.get("u0_knots", spec.get("u0"))
    if u0_spec == "linear":
        incomes = spec.get("incomes")
        if not incomes:
            raise DomainError("u0_knots 'linear' needs incomes to fix the domain")
        u0 = MonotoneCurve.identity(max(float(y) for y in incomes))
    elif u0_spec:
        u0 = MonotoneCurve(tuple((float(x), float(v)) for x, v in u0_spec))
    else:
        raise DomainError("kind 'apt' needs u0 knots")

    if "u1" in spec and "u1_offset" in spec:
        raise DomainError("give the inside utility under one key, not both")
    if "u1_offset" in spec:
        u1_spec = {"offset": float(spec["u1_offset"])}
    else:
        u1_spec = spec.get("u1", "identity")
    hi = max(u0.xs[-1], 1.0)
    if u1_spec == "identity":
        u1 = MonotoneCurve.identity(hi)
    elif isinstance(u1_spec, dict) and "offset" in u1_spec:
        c = float(u1_spec["offset"])
        u1 = MonotoneCurve(((0.0, c), (hi, hi + c)))
    elif isinstance(u1_spec, dict) and "knots" in u1_spec:
        u1 = MonotoneCurve(tuple((float(x), float(v)) for x, v in u1_spec["knots"]))
    else:
        raise DomainError(f"unrecognized u1 spec {u1_spec!r}")

    if "g" in spec and "attention" in spec:
        raise DomainError("give the attention spec under one key, not both")
    att = spec.get("g", spec.get("attention"))
    if not isinstance(att, dict):
        raise DomainError("kind 'apt' needs an attention spec object under 'g'")
    tail_mass = float(spec.get("tail_mass", att.get("tail_mass", 0.0)))
    utilities = UtilityPair(u0, u1)
    if "thresholds" in att:
        if tail_mass:
            raise DomainError(
                "tail_mass does not combine with explicit thresholds; "
                "use infinite thresholds for never-attentive consumers"
            )
        return Population(
            kind="apt",
            utilities=utilities,
            thresholds=tuple(float(t) for t in att["thresholds"]),
            seed=seed,
        )
    if "uniform" in att:
        lo, hi_t = (float(v) for v in att["uniform"])
        if tail_mass:
            cdf = AttentionCDF(
                ((lo, 0.0), (hi_t, 1.0 - tail_mass)),
                kind="linear",
                tail_mass=tail_mass,
            )
        else:
            cdf = AttentionCDF.uniform(lo, hi_t)
    elif "knots" in att:
        cdf = AttentionCDF(
            tuple((float(t), float(v)) for t, v in att["knots"]),
            kind=att.get("kind", "step"),
            tail_mass=tail_mass,
        )
    else:
        raise DomainError(
            "attention spec needs one of 'uniform', 'knots', or 'thresholds'"
        )
    return Population(kind="apt", utilities=utilities, attention=cdf, seed=seed)


def _augment_prices(grid: PriceGrid, extra: list[float]) -> PriceGrid:
    """Union extra price points into a grid, keeping it income-compatible.

    Points closer than the coordinate tolerance to an existing grid price
    (or to an already-kept extra) are dropped, so originals always win and
    income prices stay exact.
    """
    originals = [float(p) for p in grid.prices]
    top = originals[-1]
    kept: list[float] = []
    for p in sorted(set(float(e) for e in extra)):
        if not (0.0 < p <= top and math.isfinite(p)):
            continue
        i = bisect.bisect_left(originals, p)
        near_orig = (i < len(originals) and originals[i] - p <= COORD_ATOL) or (
            i > 0 and p - originals[i - 1] <= COORD_ATOL
        )
        if near_orig or (kept and p - kept[-1] <= COORD_ATOL):
            continue
        kept.append(p)
    return PriceGrid(np.asarray(sorted(originals + kept)), np.asarray(grid.incomes))


def reservation_price(
    utilities: UtilityPair,
    y: float,
    tol: float = DEFAULT_BISECTION_TOL,
    max_iter: int = DEFAULT_MAX_BISECTION_ITER,
) -> float:
    """Price at which buying stops mattering at income y.

    Solves ``u1(y - p) = u0(y)`` by bisection; returns 0.0 when even a free
    good would not be chosen.
    """
    if y <= 0:
        raise DomainError("income must be positive")
    if not utilities.reaches_indifference(y):
        raise DomainError(
            f"income {float(y)} never stops buying: u1(0) = "
            f"{utilities.u1(0.0)} exceeds u0({float(y)}) = {utilities.u0(y)}"
        )
    target = utilities.u0(y)
    if utilities.u1(y) <= target:
        return 0.0
    lo, hi = 0.0, float(y)
    for _ in range(max_iter):
        if hi - lo <= tol:
            return 0.5 * (lo + hi)
        mid = 0.5 * (lo + hi)
        if utilities.u1(y - mid) > target:
            lo = mid
        else:
            hi = mid
    raise ConvergenceError(
        f"reservation price bisection did not reach tol {tol!r} in {max_iter} steps"
    )


def forward_choice_prob(
    pop: Population, grid: PriceGrid, inject_breakpoints: bool = False
) -> ChoiceDataset:
    """Exact model-implied dataset for a population on a grid.

    For kind "apt" the share at (p, y) is the attentive fraction when the
    good is strictly preferred at that price and zero otherwise; finite
    threshold lists are counted exactly. For kind "qrum" the share is the
    valuation-quantile measure above p, constant across incomes.

    ``inject_breakpoints=True`` first refines the price grid with the points
    where the model can move: each income's reservation price and the
    attention (or valuation) curve knots.
    """
    if inject_breakpoints:
        extra: list[float] = []
        if pop.kind == "apt":
            assert pop.utilities is not None
            extra += [
                reservation_price(pop.utilities, float(y))
                for y in grid.incomes
                if pop.utilities.reaches_indifference(float(y))
            ]
            if pop.attention is not None:
                extra += [float(t) for t, _ in pop.attention.knots]
            else:
                assert pop.thresholds is not None
                extra += [t for t in pop.thresholds if math.isfinite(t)]
        else:
            assert pop.qrum is not None
            extra += [float(v) for v in pop.qrum.f.ys]
        grid = _augment_prices(grid, extra)

    if pop.kind == "qrum":
        assert pop.qrum is not None
        qr = pop.qrum
        return dataset_from_function(grid, lambda p, y: qr.choice_prob(p))

    assert pop.utilities is not None
    pair = pop.utilities

    def share(p: float, y: float) -> float:
        if not pair.prefers_good(y, p):
            return 0.0
        return pop.attention_survival(p)

    return dataset_from_function(grid, share)


@dataclass(frozen=True)
class ConsumerEV:
    """Equivalent variation of one simulated consumer."""

    consumer: int
    attention: str
    ev: float
    boundary: bool = False

    def to_dict(self) -> dict:
        return {
            "consumer": self.consumer,
            "attention": self.attention,
            "ev": self.ev,
            "boundary": self.boundary,
        }


def _attention_class(threshold: float, pc: PriceChange) -> str:
    if threshold <= pc.p_old:
        return "none"
    if threshold <= pc.p_new:
        return "partial"
    return "full"


def consumer_ev(
    utilities: UtilityPair,
    threshold: float,
    pc: PriceChange,
    bisection_tol: float = DEFAULT_BISECTION_TOL,
    max_iter: int = DEFAULT_MAX_BISECTION_ITER,
    consumer: int = 0,
) -> ConsumerEV:
    """Solve one consumer's indifference equation for a price increase.

    The compensation S removed from pre-change income makes the consumer's
    best attainable utility at the old price equal to their post-change
    utility. A consumer inattentive at the old price is unaffected (S = 0).
    One inattentive at only the new price falls back to the outside option,
    so their loss is their entire surplus. The equation is solved by
    bisection on [0, income - p_old]; no identification formula is used.
    """
    y = pc.income
    if not utilities.reaches_indifference(y):
        raise DomainError(
            f"income {float(y)} never stops buying: u1(0) = "
            f"{utilities.u1(0.0)} exceeds u0({float(y)}) = {utilities.u0(y)}; "
            "equivalent variation is undefined there"
        )
    cls = _attention_class(threshold, pc)
    if cls == "none":
        return ConsumerEV(consumer, cls, 0.0)
    if cls == "full":
        after_buy = utilities.u1(y - pc.p_new)
        rhs = max(utilities.u0(y), after_buy)
        boundary = abs(utilities.u0(y) - after_buy) <= bisection_tol
    else:
        rhs = utilities.u0(y)
        boundary = False

    def gap(s: float) -> float:
        return max(utilities.u0(y - s), utilities.u1(y - s - pc.p_old)) - rhs

    if gap(0.0) <= 0.0:
        return ConsumerEV(consumer, cls, 0.0, boundary)
    lo, hi = 0.0, y - pc.p_old
    if gap(hi) > 0.0:
        raise ConvergenceError("indifference equation has no root below full income")
    for _ in range(max_iter):
        if hi - lo <= bisection_tol:
            s = 0.5 * (lo + hi)
            return ConsumerEV(consumer, cls, 0.0 if s < bisection_tol else s, boundary)
        mid = 0.5 * (lo + hi)
        if gap(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    raise ConvergenceError(
        f"equivalent-variation bisection did not reach tol {bisection_tol!r} "
        f"in {max_iter} steps"
    )


def monte_carlo_ev(
    pop: Population,
    pc: PriceChange,
    n: int = 100_000,
    seed: int | None = None,
    bisection_tol: float = DEFAULT_BISECTION_TOL,
    max_iter: int = DEFAULT_MAX_BISECTION_ITER,
) -> EVDistribution:
    """Empirical equivalent-variation distribution of a simulated population.

    For kind "apt", draws ``n`` attention thresholds (or takes a finite
    threshold list as-is), classifies each consumer against the price change,
    and solves the indifference equation once per attention class, since
    consumers in a class share the same utilities and hence the same answer.
    For kind "qrum", draws ``n`` valuation quantiles; a consumer's loss is
    their valuation capped at the new price, minus the old price, floored at
    zero. Returns atoms of the empirical distribution (values grouped at
    nine decimals), labeled model "empirical".
    """
    if n <= 0:
        raise DomainError("sample size must be positive")
    rng = np.random.default_rng(pop.seed if seed is None else seed)
    values: np.ndarray
    if pop.kind == "apt":
        assert pop.utilities is not None
        ts = pop.sample_thresholds(rng, n)
        classes = np.fromiter(
            (0 if t <= pc.p_old else (1 if t <= pc.p_new else 2) for t in ts),
            dtype=int,
            count=len(ts),
        )
        # One representative solve per attention class present.
        reps = {0: pc.p_old, 1: 0.5 * (pc.p_old + pc.p_new), 2: math.inf}
        ev_by_class = {
            c: consumer_ev(
                pop.utilities, reps[c], pc, bisection_tol, max_iter
            ).ev
            for c in np.unique(classes)
        }
        values = np.fromiter(
            (ev_by_class[c] for c in classes), dtype=float, count=len(classes)
        )
    else:
        assert pop.qrum is not None
        nus = rng.random(n)
        vals = pop.qrum.f.values(nus)
        values = np.clip(np.minimum(vals, pc.p_new) - pc.p_old, 0.0, None)
    rounded = np.round(values, 9)
    uniq, counts = np.unique(rounded, return_counts=True)
    total = len(values)
    atoms = tuple((float(v), int(c) / total) for v, c in zip(uniq, counts))
    return EVDistribution("empirical", pc, atoms=atoms)
