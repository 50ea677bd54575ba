"""Shared fixtures: dataset assembly, cell mutation, witness replay, and a
random population generator with exact binary arithmetic.

Everything here is deterministic given the caller's seeded generator; no
fixture draws randomness of its own.
"""

import math

import numpy as np
import pytest

from aptwelfare import (
    AttentionCDF,
    ChoiceDataset,
    MonotoneCurve,
    Population,
    PriceGrid,
    UtilityPair,
    uniform_grid,
)


def _build_dataset(prices, incomes, columns):
    """Assemble a dataset from per-income share columns.

    ``columns`` maps each income to the list of shares at grid prices up to
    that income; cells above an income stay NaN as the dataset requires.
    """
    prices = np.asarray(prices, dtype=float)
    incomes = np.asarray(incomes, dtype=float)
    q = np.full((len(prices), len(incomes)), np.nan)
    for j, y in enumerate(incomes):
        col = columns[float(y)]
        q[: len(col), j] = col
    return ChoiceDataset(PriceGrid(prices, incomes), q)


def _mutate_cell(ds, p, y, value):
    """Copy a dataset with the share at (p, y) overwritten."""
    q = np.array(ds.q, dtype=float)
    q[ds.grid.price_index(p), ds.grid.income_index(y)] = value
    return ChoiceDataset(ds.grid, q)


def _replay_witness(ds, axiom, witness, eq_tol=1e-9, jump_threshold=0.05,
                    continuity_modulus=10.0):
    """Re-check that a witness points at cells that violate its axiom."""
    cells, values = witness.cells, witness.values
    if axiom != "D":
        # every cited cell must hold exactly the cited share
        for (p, y), v in zip(cells, values):
            if ds.q1(p, y) != v:
                return False
    if axiom == "A_i":
        (p1, y1), (p2, y2) = cells
        lo, hi = values
        return (
            y1 < y2
            and math.isclose(p2 - p1, y2 - y1, abs_tol=1e-9)
            and hi > lo + eq_tol
        )
    if axiom in ("A_ii", "A_QRUM"):
        (p1, y1), (p2, y2) = cells
        lo, hi = values
        return y1 == y2 and p1 < p2 and hi > lo + eq_tol
    if axiom == "B":
        (p1, y1), (p2, y2) = cells
        a, b = values
        return (
            p1 == p2
            and y1 != y2
            and a > eq_tol
            and b > eq_tol
            and abs(b - a) > eq_tol
        )
    if axiom == "C":
        ((p, y),) = cells
        top = float(ds.grid.prices[ds.grid.top_price_index(ds.grid.income_index(y))])
        return p == top and values[0] > eq_tol
    if axiom == "D":
        (p1, y1), (p2, y2) = cells
        drop, nxt = values
        return (
            y1 == y2
            and p1 < p2
            and ds.q1(p2, y2) == nxt
            and nxt <= eq_tol
            and math.isclose(ds.q1(p1, y1) - nxt, drop, abs_tol=1e-12)
            and drop >= jump_threshold
        )
    if axiom == "E":
        ((p, y),) = cells
        v = values[0]
        return p == 0.0 and v > eq_tol and abs(v - 1.0) > eq_tol
    if axiom == "B_QRUM":
        (p1, y1), (p2, y2) = cells
        lo, hi = values
        return p1 < p2 and lo - hi > continuity_modulus * (p2 - p1) + eq_tol
    if axiom == "C_QRUM":
        ((p, y),) = cells
        v = values[0]
        if p == float(ds.grid.prices[0]):
            return abs(v - 1.0) > eq_tol
        return p == float(ds.grid.prices[-1]) and v > eq_tol
    raise KeyError(axiom)


def _make_apt_population(rng, mode="mixed"):
    """Draw a threshold-attention population whose forward shares are exact.

    Incomes and reservation prices are integers, thresholds sit on the odd
    quarter lattice, and attention masses are multiples of 1/64, so every
    grid share is an exact binary float. ``mode`` controls thresholds
    relative to reservation prices: "high" puts mass strictly above every
    reservation price, "low" keeps all mass at least 0.75 below every one,
    and "mixed" allows either per income but never the ambiguous middle
    (a top threshold exactly one grid step under a reservation price).
    """
    step = 0.25
    n_inc = int(rng.integers(2, 4))
    incomes = sorted(
        float(v) for v in rng.choice(np.arange(2.0, 7.0), size=n_inc, replace=False)
    )
    offset = float(rng.choice([0.0, 0.5, 1.0, 1.25]))
    reservations: list[int] = []
    for j, y in enumerate(incomes):
        # keep y - r(y) non-decreasing so the low-good utility is monotone
        cap = y if j == 0 else min(y, reservations[-1] + (y - incomes[j - 1]))
        reservations.append(int(rng.integers(1, int(cap) + 1)))
    r_min, r_max = min(reservations), max(reservations)
    lattice = [0.25 + 0.5 * k for k in range(int(2 * max(incomes)) + 2)]
    if mode == "low":
        lattice = [t for t in lattice if t <= r_min - 0.75]

    def acceptable(ts, tail64):
        t_max = max(ts)
        for r in reservations:
            above = tail64 > 0 or any(t > r for t in ts)
            if mode == "high" and not above:
                return False
            if mode == "low" and above:
                return False
            if not (above or t_max <= r - 0.75):
                return False
        return True

    ts, tail64 = None, 0
    for _ in range(50):
        k = int(rng.integers(1, min(4, len(lattice)) + 1))
        cand = sorted(float(t) for t in rng.choice(lattice, size=k, replace=False))
        cand_tail = (
            int(rng.integers(4, 17))
            if (mode != "low" and rng.random() < 0.4)
            else 0
        )
        if acceptable(cand, cand_tail):
            ts, tail64 = cand, cand_tail
            break
    if ts is None:
        ts, tail64 = ([0.25], 0) if mode == "low" else ([r_max + 0.25], 0)
    avail = 64 - tail64
    cuts = sorted(
        int(c) for c in rng.choice(np.arange(1, avail), size=len(ts) - 1, replace=False)
    ) + [avail]
    attention = AttentionCDF(
        tuple((t, c / 64.0) for t, c in zip(ts, cuts)),
        kind="step",
        tail_mass=tail64 / 64.0,
    )
    hi = max(incomes)
    u1 = MonotoneCurve(((0.0, offset), (hi, hi + offset)))
    u0 = MonotoneCurve(
        tuple((y, y + offset - r) for y, r in zip(incomes, reservations))
    )
    pop = Population(
        kind="apt",
        utilities=UtilityPair(u0, u1),
        attention=attention,
        seed=int(rng.integers(0, 2**31)),
    )
    return {
        "pop": pop,
        "grid": uniform_grid(incomes, step),
        "incomes": incomes,
        "reservations": reservations,
        "offset": offset,
        "tail_mass": tail64 / 64.0,
        "thresholds": ts,
    }


@pytest.fixture
def dataset_builder():
    return _build_dataset


@pytest.fixture
def mutate_cell():
    return _mutate_cell


@pytest.fixture
def replay_witness():
    return _replay_witness


@pytest.fixture(scope="session")
def apt_population_factory():
    return _make_apt_population


@pytest.fixture
def mutation_base():
    """Passes every report; the terminal drops only raise D warnings."""
    return _build_dataset(
        [0.0, 1.0, 2.0, 3.0, 4.0],
        [2.0, 4.0],
        {2.0: [1.0, 0.5, 0.0], 4.0: [1.0, 0.5, 0.4, 0.3, 0.0]},
    )


@pytest.fixture
def quiet_base():
    """Passes every report with no D warnings (terminal drops under 0.05)."""
    return _build_dataset(
        [0.0, 1.0, 2.0, 3.0, 4.0],
        [2.0, 4.0],
        {2.0: [1.0, 0.04, 0.0], 4.0: [1.0, 0.04, 0.04, 0.04, 0.0]},
    )
