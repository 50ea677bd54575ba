"""End-to-end worked example with hand-checkable numbers.

One income (10), prices on a uniform grid, and the linear share curve
``q(p) = max(0, 1 - p/3)``. Everything downstream has a closed form:

* buying stops at price 3, so the outside option is worth ``10 - 3 = 7``
  and the attention CDF is ``G(p) = p/3`` below 3;
* for the price increase 1 -> 2, a third of consumers never buy (value 0),
  a third keep buying (value 1), and a third switch away. The switchers'
  value is point-identified at 2 only under full attention, since the share
  slides into zero continuously (no detectable jump); by default that mass
  is only located in [2, 9];
* the income-free comparison CDF is ``F(z) = (1 + z)/3`` on [0, 1), which
  the attention-model distribution dominates with a largest gap of 1/3 at
  the full price difference.

:func:`run_demo` recomputes all of this through the public pipeline and
compares against the table above. The numbers depend only on the shares at
prices 1, 1.5, and 2 and on where the curve hits zero, so any grid step
that keeps those prices on the grid (0.01 and 0.5 both do) reproduces the
same masses.
"""

from __future__ import annotations

import numpy as np

from .axioms import check_apt, check_qrum
from .config import DEFAULT_JUMP_THRESHOLD
from .dataset import ChoiceDataset, PriceGrid, dataset_from_function
from .errors import DomainError
from .rationalize import apt_rationalize, qrum_quantile
from .welfare import (
    PriceChange,
    ev_distribution_apt,
    ev_distribution_rum,
    fosd_check,
    p10_bounds,
)

DEMO_K = 3.0
DEMO_INCOME = 10.0
DEMO_STEP = 0.01
DEMO_TOL = 1e-6

_ATOMS_FULL = ((0.0, 1.0 / 3.0), (1.0, 1.0 / 3.0), (2.0, 1.0 / 3.0))
_ATOMS_PARTIAL = ((0.0, 1.0 / 3.0), (1.0, 1.0 / 3.0))


def expected_values(point_identified: bool = False) -> dict[str, object]:
    """Known answers for the worked example under either attention stance.

    ``point_identified`` selects the variant where the switchers' value sits
    at the reservation price 2 (full attention assumed, or the grid coarse
    enough that the share's entry into zero reads as a jump). The masses are
    the same either way; only the location of the switcher third differs.
    """
    return {
        "q_at_p_old": 2.0 / 3.0,
        "q_at_p_new": 1.0 / 3.0,
        "min_zero_price": 3.0,
        "u0_at_income": 7.0,
        "g_at_1_5": 0.5,
        "apt_atoms": _ATOMS_FULL if point_identified else _ATOMS_PARTIAL,
        "apt_interval": None if point_identified else (2.0, 9.0, 1.0 / 3.0),
        "apt_atoms_full": _ATOMS_FULL,
        "reservation_point_identified": point_identified,
        "rum_cdf_at_half": 0.5,
        "fosd": True,
        "max_gap": 1.0 / 3.0,
        "max_gap_at": 1.0,
        "qrum_pass": True,
        "qrum_quantile_half": 1.5,
    }


def demo_dataset(
    k: float = DEMO_K, income: float = DEMO_INCOME, step: float = DEMO_STEP
) -> ChoiceDataset:
    """Linear share curve ``max(0, 1 - p/k)`` on a uniform price grid."""
    n = round(income / step)
    prices = np.linspace(0.0, income, n + 1)
    grid = PriceGrid(prices, np.array([income]))
    return dataset_from_function(grid, lambda p, y: max(0.0, 1.0 - p / k))


def _matches(expected, actual, tol: float = DEMO_TOL) -> bool:
    if isinstance(expected, bool):
        return expected == actual
    if isinstance(expected, (int, float)):
        return isinstance(actual, (int, float)) and abs(expected - actual) <= tol
    if isinstance(expected, tuple):
        if not isinstance(actual, tuple) or len(expected) != len(actual):
            return False
        return all(_matches(e, a, tol) for e, a in zip(expected, actual))
    return expected == actual


def run_demo(
    step: float = DEMO_STEP, assume_full_attention: bool = False
) -> dict:
    """Recompute the worked example and compare against its known answers.

    Args:
        step: Uniform price-grid step. Must divide 0.5 so that the probe
            prices 1, 1.5, 2, and 3 stay on the grid.
        assume_full_attention: Treat every consumer as attentive at all
            prices, which point-identifies the switchers' value at 2 instead
            of locating it in [2, 9].

    Returns:
        A payload with the expected and recomputed value for each named
        quantity, a per-quantity match flag (tolerance 1e-6), and
        ``all_match``.
    """
    ratio = 0.5 / step
    if abs(ratio - round(ratio)) > 1e-9 or step <= 0:
        raise DomainError(
            f"grid step {step} must divide 0.5 so the probe prices stay on the grid"
        )
    ds = demo_dataset(step=step)
    suite = check_apt(ds)
    pair, attention = apt_rationalize(ds, reports=suite)

    pc = PriceChange(1.0, 2.0, DEMO_INCOME)
    bound = p10_bounds(
        ds,
        DEMO_INCOME,
        assume_full_attention=assume_full_attention,
        p_initial=pc.p_old,
    )
    f_apt = ev_distribution_apt(
        ds, pc, assume_full_attention=assume_full_attention
    )
    f_apt_full = ev_distribution_apt(ds, pc, assume_full_attention=True)
    f_rum = ev_distribution_rum(ds, pc)
    fosd = fosd_check(f_apt, f_rum)
    qrum_suite = check_qrum(ds)

    # The curve enters zero by a one-step drop of step/k; a coarse grid makes
    # that drop a detectable jump, which point-identifies the reservation
    # price exactly as assuming full attention does.
    point_expected = assume_full_attention or (
        step >= DEMO_K * DEFAULT_JUMP_THRESHOLD - 1e-9
    )

    actual: dict[str, object] = {
        "q_at_p_old": ds.q1(pc.p_old, DEMO_INCOME),
        "q_at_p_new": ds.q1(pc.p_new, DEMO_INCOME),
        "min_zero_price": ds.min_zero_price(DEMO_INCOME),
        "u0_at_income": pair.u0(DEMO_INCOME),
        "g_at_1_5": attention.value(1.5),
        "apt_atoms": f_apt.atoms,
        "apt_interval": (
            (f_apt.interval.lo, f_apt.interval.hi, f_apt.interval.mass)
            if f_apt.interval
            else None
        ),
        "apt_atoms_full": f_apt_full.atoms,
        "reservation_point_identified": bound.point_identified,
        "rum_cdf_at_half": f_rum.cdf(0.5),
        "fosd": fosd.dominates,
        "max_gap": fosd.max_gap,
        "max_gap_at": fosd.max_gap_at,
        "qrum_pass": qrum_suite.passed,
        "qrum_quantile_half": qrum_quantile(ds, 0.5),
    }

    expected = expected_values(point_expected)
    matches = {k: _matches(expected[k], actual[k]) for k in expected}
    return {
        "suite_passed": suite.passed,
        "assume_full_attention": assume_full_attention,
        "grid_step": step,
        "expected": expected,
        "actual": actual,
        "matches": matches,
        "all_match": suite.passed and all(matches.values()),
        "tolerance": DEMO_TOL,
    }
