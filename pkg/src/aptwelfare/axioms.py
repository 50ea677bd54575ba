"""Behavioral consistency checks on choice datasets.

Two suites:

* :func:`check_apt` runs the six reports (A_i, A_ii, B, C, D, E) that jointly
  characterize datasets generated by threshold-attention behaviour. A dataset
  is declared rationalizable in that sense iff every report passes.
* :func:`check_qrum` runs the three reports (A_QRUM, B_QRUM, C_QRUM) for the
  stricter income-free random-utility shape, after verifying that shares do
  not vary with income at any common price.

Each report carries machine-checkable witnesses: the grid cells and values
demonstrating a violation. A report fails iff it has at least one witness.
Report D can also carry warnings (suspected discontinuities that a finite
grid cannot distinguish from genuine violations); warnings never fail the
suite unless the grid is declared exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import (
    DEFAULT_CONTINUITY_MODULUS,
    DEFAULT_EQ_TOL,
    DEFAULT_JUMP_THRESHOLD,
)
from .dataset import ChoiceDataset, _locate
from .errors import IncomeVarianceError

AXIOM_DESCRIPTIONS = {
    "A_i": "shares cannot rise when price and income rise by the same amount",
    "A_ii": "shares are non-increasing in price at each income",
    "B": "positive shares at a common price agree across incomes",
    "C": "every income has a price with zero share",
    "D": "no isolated positive share directly below the zero tail",
    "E": "the share at price zero is zero or one",
    "A_QRUM": "the income-free share curve is non-increasing in price",
    "B_QRUM": "no one-step share drop steeper than the continuity modulus",
    "C_QRUM": "share one at the lowest price and zero at the highest",
}


@dataclass(frozen=True)
class Witness:
    """Cells and values demonstrating one violation."""

    cells: tuple[tuple[float, float], ...]
    values: tuple[float, ...]
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "cells": [[p, y] for p, y in self.cells],
            "values": list(self.values),
            "note": self.note,
        }


@dataclass(frozen=True)
class AxiomReport:
    """Outcome of one axiom check. Fails iff witnesses is non-empty."""

    axiom: str
    witnesses: tuple[Witness, ...] = ()
    warnings: tuple[Witness, ...] = ()

    @property
    def passed(self) -> bool:
        return not self.witnesses

    @property
    def description(self) -> str:
        return AXIOM_DESCRIPTIONS[self.axiom]

    def to_dict(self) -> dict:
        return {
            "axiom": self.axiom,
            "verdict": "pass" if self.passed else "fail",
            "description": self.description,
            "witnesses": [w.to_dict() for w in self.witnesses],
            "warnings": [w.to_dict() for w in self.warnings],
        }


@dataclass(frozen=True)
class AxiomSuiteResult:
    """Reports from one suite, in fixed order."""

    reports: tuple[AxiomReport, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    @property
    def failed_axioms(self) -> tuple[str, ...]:
        return tuple(r.axiom for r in self.reports if not r.passed)

    def report(self, axiom: str) -> AxiomReport:
        for r in self.reports:
            if r.axiom == axiom:
                return r
        raise KeyError(axiom)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "reports": [r.to_dict() for r in self.reports],
        }


def check_axiom_a(
    ds: ChoiceDataset, eq_tol: float = DEFAULT_EQ_TOL
) -> tuple[AxiomReport, AxiomReport]:
    """Both monotonicity reports: the diagonal part (A_i) and the price
    part (A_ii)."""
    grid = ds.grid
    prices, incomes, q = grid.prices, grid.incomes, ds.q

    diag: list[Witness] = []
    for j1 in range(grid.n_incomes):
        for j2 in range(j1 + 1, grid.n_incomes):
            eps = float(incomes[j2] - incomes[j1])
            top1 = grid.top_price_index(j1)
            for i in range(top1 + 1):
                k = _locate(prices, float(prices[i]) + eps)
                if k is None or k > grid.top_price_index(j2):
                    continue
                lo, hi = float(q[i, j1]), float(q[k, j2])
                if hi > lo + eq_tol:
                    diag.append(
                        Witness(
                            cells=(
                                (float(prices[i]), float(incomes[j1])),
                                (float(prices[k]), float(incomes[j2])),
                            ),
                            values=(lo, hi),
                            note="share rose along an equal price/income shift",
                        )
                    )

    monot: list[Witness] = []
    for j in range(grid.n_incomes):
        top = grid.top_price_index(j)
        col = q[: top + 1, j]
        for i in range(1, top + 1):
            if col[i] > col[i - 1] + eq_tol:
                monot.append(
                    Witness(
                        cells=(
                            (float(prices[i - 1]), float(incomes[j])),
                            (float(prices[i]), float(incomes[j])),
                        ),
                        values=(float(col[i - 1]), float(col[i])),
                        note="share rose with price at fixed income",
                    )
                )

    return (
        AxiomReport("A_i", tuple(diag)),
        AxiomReport("A_ii", tuple(monot)),
    )


def check_axiom_b(ds: ChoiceDataset, eq_tol: float = DEFAULT_EQ_TOL) -> AxiomReport:
    """Positive shares at one price must coincide across incomes."""
    grid = ds.grid
    witnesses: list[Witness] = []
    for i in range(grid.n_prices):
        ref_j = None
        ref_v = 0.0
        for j in range(grid.n_incomes):
            if i > grid.top_price_index(j):
                continue
            v = float(ds.q[i, j])
            if v <= eq_tol:
                continue
            if ref_j is None:
                ref_j, ref_v = j, v
            elif abs(v - ref_v) > eq_tol:
                witnesses.append(
                    Witness(
                        cells=(
                            (float(grid.prices[i]), float(grid.incomes[ref_j])),
                            (float(grid.prices[i]), float(grid.incomes[j])),
                        ),
                        values=(ref_v, v),
                        note="two positive shares differ at a common price",
                    )
                )
    return AxiomReport("B", tuple(witnesses))


def check_axiom_c(ds: ChoiceDataset, eq_tol: float = DEFAULT_EQ_TOL) -> AxiomReport:
    """Each income column must contain a zero share."""
    grid = ds.grid
    witnesses: list[Witness] = []
    for j in range(grid.n_incomes):
        top = grid.top_price_index(j)
        col = ds.q[: top + 1, j]
        if np.all(col > eq_tol):
            witnesses.append(
                Witness(
                    cells=((float(grid.prices[top]), float(grid.incomes[j])),),
                    values=(float(col[top]),),
                    note="share still positive at the income's own price",
                )
            )
    return AxiomReport("C", tuple(witnesses))


def check_axiom_d(
    ds: ChoiceDataset,
    eq_tol: float = DEFAULT_EQ_TOL,
    jump_threshold: float = DEFAULT_JUMP_THRESHOLD,
    exact_grid: bool = False,
) -> AxiomReport:
    """Probe the boundary between the positive region and the zero tail.

    On a finite grid, a positive share immediately before an all-zero tail is
    ambiguous: it may be the discretization of a curve that falls
    (continuously or by a jump between grid points) to zero, or a genuinely
    isolated positive value. Drops below ``jump_threshold`` are treated as
    benign discretization. Drops at or above it are flagged: as warnings by
    default, as failures when ``exact_grid`` declares that the observed
    prices are the full support.
    """
    grid = ds.grid
    witnesses: list[Witness] = []
    warnings: list[Witness] = []
    for j in range(grid.n_incomes):
        top = grid.top_price_index(j)
        col = ds.q[: top + 1, j]
        positive = np.flatnonzero(col > eq_tol)
        if positive.size == 0:
            continue
        last = int(positive[-1])
        if last == top:
            # No zero tail at all; report C speaks to that.
            continue
        drop = float(col[last])
        if drop < jump_threshold:
            continue
        w = Witness(
            cells=(
                (float(grid.prices[last]), float(grid.incomes[j])),
                (float(grid.prices[last + 1]), float(grid.incomes[j])),
            ),
            values=(drop, float(col[last + 1])),
            note="positive share drops straight to the zero tail",
        )
        if exact_grid:
            witnesses.append(w)
        else:
            warnings.append(w)
    return AxiomReport("D", tuple(witnesses), tuple(warnings))


def check_axiom_e(ds: ChoiceDataset, eq_tol: float = DEFAULT_EQ_TOL) -> AxiomReport:
    """At price zero the share must be 0 or 1."""
    grid = ds.grid
    witnesses: list[Witness] = []
    for j in range(grid.n_incomes):
        v = float(ds.q[0, j])
        if v > eq_tol and abs(v - 1.0) > eq_tol:
            witnesses.append(
                Witness(
                    cells=((float(grid.prices[0]), float(grid.incomes[j])),),
                    values=(v,),
                    note="share at price zero is strictly between 0 and 1",
                )
            )
    return AxiomReport("E", tuple(witnesses))


def check_apt(
    ds: ChoiceDataset,
    eq_tol: float = DEFAULT_EQ_TOL,
    jump_threshold: float = DEFAULT_JUMP_THRESHOLD,
    exact_grid: bool = False,
) -> AxiomSuiteResult:
    """Run all six threshold-attention reports in fixed order."""
    a_i, a_ii = check_axiom_a(ds, eq_tol)
    return AxiomSuiteResult(
        (
            a_i,
            a_ii,
            check_axiom_b(ds, eq_tol),
            check_axiom_c(ds, eq_tol),
            check_axiom_d(ds, eq_tol, jump_threshold, exact_grid),
            check_axiom_e(ds, eq_tol),
        )
    )


def income_invariant_curve(
    ds: ChoiceDataset, eq_tol: float = DEFAULT_EQ_TOL
) -> np.ndarray:
    """Collapse a dataset whose shares do not depend on income to one curve.

    Returns the share at each grid price. Raises
    :class:`IncomeVarianceError` at the first price where two incomes
    disagree by more than eq_tol (zeros included, unlike report B).
    """
    grid = ds.grid
    for i in range(grid.n_prices):
        vals = [
            (j, float(ds.q[i, j]))
            for j in range(grid.n_incomes)
            if i <= grid.top_price_index(j)
        ]
        lo = min(vals, key=lambda t: t[1])
        hi = max(vals, key=lambda t: t[1])
        if hi[1] - lo[1] > eq_tol:
            raise IncomeVarianceError(
                f"share varies with income at price {float(grid.prices[i])!r}: "
                f"{lo[1]!r} at income {float(grid.incomes[lo[0]])!r} vs "
                f"{hi[1]!r} at income {float(grid.incomes[hi[0]])!r}"
            )
    # Widest column is defined at every price once the grid is valid.
    return np.array(ds.q[:, grid.n_incomes - 1], dtype=float)


def check_qrum(
    ds: ChoiceDataset,
    eq_tol: float = DEFAULT_EQ_TOL,
    continuity_modulus: float = DEFAULT_CONTINUITY_MODULUS,
) -> AxiomSuiteResult:
    """Run the three income-free reports on the collapsed share curve.

    Raises :class:`IncomeVarianceError` when the dataset has no such curve.
    """
    curve = income_invariant_curve(ds, eq_tol)
    prices = ds.grid.prices
    y = float(ds.grid.incomes[-1])

    monot: list[Witness] = []
    steep: list[Witness] = []
    for i in range(1, len(prices)):
        rise = float(curve[i] - curve[i - 1])
        if rise > eq_tol:
            monot.append(
                Witness(
                    cells=((float(prices[i - 1]), y), (float(prices[i]), y)),
                    values=(float(curve[i - 1]), float(curve[i])),
                    note="share curve rose with price",
                )
            )
        bound = continuity_modulus * float(prices[i] - prices[i - 1])
        if -rise > bound + eq_tol:
            steep.append(
                Witness(
                    cells=((float(prices[i - 1]), y), (float(prices[i]), y)),
                    values=(float(curve[i - 1]), float(curve[i])),
                    note=f"one-step drop exceeds modulus bound {bound!r}",
                )
            )

    ends: list[Witness] = []
    if abs(float(curve[0]) - 1.0) > eq_tol:
        ends.append(
            Witness(
                cells=((float(prices[0]), y),),
                values=(float(curve[0]),),
                note="share at the lowest price is not 1",
            )
        )
    if float(curve[-1]) > eq_tol:
        ends.append(
            Witness(
                cells=((float(prices[-1]), y),),
                values=(float(curve[-1]),),
                note="share at the highest price is not 0",
            )
        )

    return AxiomSuiteResult(
        (
            AxiomReport("A_QRUM", tuple(monot)),
            AxiomReport("B_QRUM", tuple(steep)),
            AxiomReport("C_QRUM", tuple(ends)),
        )
    )
