"""Binary-choice datasets on finite price/income grids.

A dataset records, for each grid cell (price p, income y) with p <= y, the
observed probability of buying the good. Cells with p > y do not exist.
The grid itself must contain the zero price, and every income must appear
among the prices (so the restriction of the price grid to [0, y] tops out
exactly at y). Datasets are immutable; all queries are pure lookups that
never extrapolate off the grid.

CSV interchange uses the header ``price,income,share``, one cell per row in
any order, with full coverage of the implied grid.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .config import COORD_ATOL, DEFAULT_EQ_TOL, DEFAULT_JUMP_THRESHOLD
from .errors import (
    CoverageError,
    CsvFormatError,
    DomainError,
    GridLookupError,
    NoZeroPriceError,
)

CSV_HEADER = ("price", "income", "share")


def _locate(sorted_vals: np.ndarray, x: float, atol: float = COORD_ATOL) -> int | None:
    """Index of x in a sorted array within atol, or None."""
    i = int(np.searchsorted(sorted_vals, x))
    for j in (i - 1, i):
        if 0 <= j < len(sorted_vals) and abs(sorted_vals[j] - x) <= atol:
            return j
    return None


@dataclass(frozen=True)
class PriceGrid:
    """Finite observation grid: strictly increasing prices and incomes.

    Invariants enforced at construction:

    * prices are non-negative, strictly increasing, and include 0;
    * incomes are positive and strictly increasing;
    * every income matches a grid price (within a fixed absolute tolerance),
      so ``max{p in prices : p <= y} == y`` for each income y;
    * no price exceeds the largest income (such cells could never exist).
    """

    prices: np.ndarray
    incomes: np.ndarray

    def __post_init__(self):
        prices = np.asarray(self.prices, dtype=float).reshape(-1).copy()
        incomes = np.asarray(self.incomes, dtype=float).reshape(-1).copy()
        if prices.size == 0 or incomes.size == 0:
            raise DomainError("grid needs at least one price and one income")
        if np.any(~np.isfinite(prices)) or np.any(~np.isfinite(incomes)):
            raise DomainError("grid coordinates must be finite")
        if np.any(np.diff(prices) <= 0):
            raise DomainError("prices must be strictly increasing")
        if np.any(np.diff(incomes) <= 0):
            raise DomainError("incomes must be strictly increasing")
        if prices[0] < -COORD_ATOL:
            raise DomainError("prices must be non-negative")
        if abs(prices[0]) > COORD_ATOL:
            raise CoverageError("price grid must include the zero price")
        if incomes[0] <= 0:
            raise DomainError("incomes must be positive")
        income_idx = np.empty(len(incomes), dtype=int)
        for j, y in enumerate(incomes):
            i = _locate(prices, y)
            if i is None:
                raise CoverageError(
                    f"income {float(y)!r} has no matching grid price "
                    "(the price grid must top out exactly at each income)"
                )
            income_idx[j] = i
        if income_idx[-1] != len(prices) - 1:
            raise DomainError("prices beyond the largest income are not allowed")
        prices.flags.writeable = False
        incomes.flags.writeable = False
        income_idx.flags.writeable = False
        object.__setattr__(self, "prices", prices)
        object.__setattr__(self, "incomes", incomes)
        object.__setattr__(self, "income_price_idx", income_idx)

    @property
    def n_prices(self) -> int:
        return len(self.prices)

    @property
    def n_incomes(self) -> int:
        return len(self.incomes)

    def price_index(self, p: float) -> int:
        i = _locate(self.prices, p)
        if i is None:
            raise GridLookupError(f"price {p!r} is not on the grid")
        return i

    def income_index(self, y: float) -> int:
        j = _locate(self.incomes, y)
        if j is None:
            raise GridLookupError(f"income {y!r} is not on the grid")
        return j

    def top_price_index(self, j: int) -> int:
        """Index of the largest price not exceeding income j."""
        return int(self.income_price_idx[j])


@dataclass(frozen=True)
class JumpReport:
    """One-step discontinuity probe at a grid price.

    ``is_jump`` is true exactly when ``left_value - value >= threshold``
    (a drop equal to the threshold counts).
    """

    at_price: float
    left_value: float
    value: float
    is_jump: bool
    threshold: float

    def to_dict(self) -> dict:
        return {
            "at_price": self.at_price,
            "left_value": self.left_value,
            "value": self.value,
            "is_jump": self.is_jump,
            "threshold": self.threshold,
        }


@dataclass(frozen=True)
class ChoiceDataset:
    """Observed buy probabilities on a :class:`PriceGrid`.

    ``q`` has shape (n_prices, n_incomes); entry (i, j) is the share at
    (prices[i], incomes[j]) and must be NaN exactly where prices[i] exceeds
    incomes[j]. Instances are immutable.
    """

    grid: PriceGrid
    q: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float).copy()
        if q.shape != (self.grid.n_prices, self.grid.n_incomes):
            raise DomainError(
                f"q must have shape {(self.grid.n_prices, self.grid.n_incomes)}, "
                f"got {q.shape}"
            )
        for j in range(self.grid.n_incomes):
            top = self.grid.top_price_index(j)
            col = q[: top + 1, j]
            if np.any(~np.isfinite(col)):
                raise CoverageError(
                    f"missing share for income {float(self.grid.incomes[j])!r}"
                )
            if np.any(col < 0) or np.any(col > 1):
                raise DomainError("shares must lie in [0, 1]")
            if not np.all(np.isnan(q[top + 1 :, j])):
                raise DomainError("cells with price above income must be NaN")
        q.flags.writeable = False
        object.__setattr__(self, "q", q)

    # -- queries ---------------------------------------------------------

    def q1(self, p: float, y: float) -> float:
        """Share at grid cell (p, y). Off-grid queries raise."""
        i = self.grid.price_index(p)
        j = self.grid.income_index(y)
        if i > self.grid.top_price_index(j):
            raise GridLookupError(f"price {p!r} exceeds income {y!r}")
        return float(self.q[i, j])

    def column(self, y: float) -> tuple[np.ndarray, np.ndarray]:
        """(prices, shares) for all cells at income y in price order."""
        j = self.grid.income_index(y)
        top = self.grid.top_price_index(j)
        return self.grid.prices[: top + 1], self.q[: top + 1, j]

    def min_zero_price(self, y: float, eq_tol: float = DEFAULT_EQ_TOL) -> float:
        """Smallest grid price from which the share stays zero up to y.

        Shares <= eq_tol count as zero. Raises :class:`NoZeroPriceError`
        when the share at the income's own price is still positive.
        """
        prices, col = self.column(y)
        positive = np.flatnonzero(col > eq_tol)
        start = 0 if positive.size == 0 else int(positive[-1]) + 1
        if start >= len(col):
            raise NoZeroPriceError(
                f"share never reaches zero at income {y!r} "
                f"(still {float(col[-1])!r} at price {float(prices[-1])!r})"
            )
        return float(prices[start])

    def jump_at(
        self,
        y: float,
        p: float,
        jump_threshold: float = DEFAULT_JUMP_THRESHOLD,
    ) -> JumpReport:
        """Compare the share at p with the share one grid step below."""
        i = self.grid.price_index(p)
        j = self.grid.income_index(y)
        if i == 0:
            raise DomainError(
                f"price {p!r} is the smallest grid price; no predecessor to compare"
            )
        if i > self.grid.top_price_index(j):
            raise GridLookupError(f"price {p!r} exceeds income {y!r}")
        left = float(self.q[i - 1, j])
        value = float(self.q[i, j])
        return JumpReport(
            at_price=float(self.grid.prices[i]),
            left_value=left,
            value=value,
            is_jump=bool(left - value >= jump_threshold),
            threshold=jump_threshold,
        )


def uniform_grid(incomes, step: float) -> PriceGrid:
    """Price grid of equal steps from 0 to the largest income.

    Every income must sit on the step lattice (within the coordinate
    tolerance); prices are generated with exact endpoints.
    """
    ys = np.asarray(incomes, dtype=float).reshape(-1)
    if ys.size == 0:
        raise DomainError("at least one income is required")
    if step <= 0:
        raise DomainError("step must be positive")
    top = float(np.max(ys))
    n = round(top / step)
    if abs(n * step - top) > COORD_ATOL:
        raise DomainError(f"largest income {top!r} is not a multiple of step {step!r}")
    prices = np.linspace(0.0, top, n + 1)
    for y in ys:
        if _locate(prices, float(y)) is None:
            raise DomainError(f"income {float(y)!r} does not sit on the step lattice")
    return PriceGrid(prices, np.sort(ys))


def dataset_from_function(
    grid: PriceGrid, fn: Callable[[float, float], float]
) -> ChoiceDataset:
    """Tabulate ``fn(price, income)`` over every existing grid cell."""
    q = np.full((grid.n_prices, grid.n_incomes), np.nan)
    for j, y in enumerate(grid.incomes):
        top = grid.top_price_index(j)
        for i in range(top + 1):
            q[i, j] = fn(float(grid.prices[i]), float(y))
    return ChoiceDataset(grid, q)


def _dataset_from_cells(
    cells: list[tuple[float, float, float]],
    rows: list[int] | None = None,
) -> ChoiceDataset:
    """Assemble a dataset from (price, income, share) triples.

    ``rows`` optionally carries 1-based source row numbers for messages.
    """

    def where(k: int) -> str:
        return f" (row {rows[k]})" if rows is not None else f" (entry {k})"

    seen: dict[tuple[float, float], float] = {}
    for k, (p, y, s) in enumerate(cells):
        if not (np.isfinite(p) and np.isfinite(y) and np.isfinite(s)):
            raise DomainError(f"non-finite value{where(k)}")
        if p < 0:
            raise DomainError(f"negative price {p!r}{where(k)}")
        if y <= 0:
            raise DomainError(f"non-positive income {y!r}{where(k)}")
        if not 0 <= s <= 1:
            raise DomainError(f"share {s!r} outside [0, 1]{where(k)}")
        if p > y:
            raise DomainError(f"price {p!r} exceeds income {y!r}{where(k)}")
        key = (p, y)
        if key in seen:
            raise CsvFormatError(f"duplicate cell (price {p!r}, income {y!r}){where(k)}")
        seen[key] = s

    if not seen:
        raise CsvFormatError("no data rows")
    prices = np.array(sorted({p for p, _ in seen}))
    incomes = np.array(sorted({y for _, y in seen}))
    grid = PriceGrid(prices, incomes)
    q = np.full((grid.n_prices, grid.n_incomes), np.nan)
    for j, y in enumerate(grid.incomes):
        top = grid.top_price_index(j)
        for i in range(top + 1):
            key = (float(grid.prices[i]), float(y))
            if key not in seen:
                raise CoverageError(
                    f"missing cell (price {key[0]!r}, income {key[1]!r})"
                )
            q[i, j] = seen[key]
    return ChoiceDataset(grid, q)


def load_csv(path: str | os.PathLike) -> ChoiceDataset:
    """Read a ``price,income,share`` CSV into a validated dataset."""
    cells: list[tuple[float, float, float]] = []
    rows: list[int] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvFormatError("empty file") from None
        if tuple(h.strip().lower() for h in header) != CSV_HEADER:
            raise CsvFormatError(
                f"expected header {','.join(CSV_HEADER)!r}, got {','.join(header)!r}"
            )
        for n, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise CsvFormatError(f"expected 3 fields, got {len(row)} (row {n})")
            try:
                p, y, s = (float(f) for f in row)
            except ValueError:
                raise CsvFormatError(f"unparseable row {row!r} (row {n})") from None
            cells.append((p, y, s))
            rows.append(n)
    return _dataset_from_cells(cells, rows)


def save_csv(ds: ChoiceDataset, path: str | os.PathLike) -> None:
    """Write a dataset as ``price,income,share`` rows, income-major.

    Floats are written with shortest round-trip representations, so
    ``load_csv`` after ``save_csv`` reproduces the dataset exactly.
    """
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for j, y in enumerate(ds.grid.incomes):
            top = ds.grid.top_price_index(j)
            for i in range(top + 1):
                writer.writerow(
                    [repr(float(ds.grid.prices[i])), repr(float(y)), repr(float(ds.q[i, j]))]
                )


def as_choice_dataset(data) -> ChoiceDataset:
    """Coerce supported inputs to a :class:`ChoiceDataset`.

    Accepts an existing dataset, a CSV path, or an array-like of
    (price, income, share) rows with full grid coverage.
    """
    if isinstance(data, ChoiceDataset):
        return data
    if isinstance(data, (str, os.PathLike)):
        return load_csv(data)
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise DomainError(
            "expected a ChoiceDataset, a CSV path, or an (n, 3) array of "
            "(price, income, share) rows"
        )
    return _dataset_from_cells([(float(p), float(y), float(s)) for p, y, s in arr])
