"""Scikit-learn style wrappers around the rationalization pipeline.

The estimators accept a :class:`~.dataset.ChoiceDataset`, a CSV path, or an
(n, 3) array of (price, income, share) rows; ``fit`` runs the axiom suite and,
when it passes, constructs the primitives. Verdicts live on fitted attributes
(``rationalizable_``, ``suite_``) rather than raising, so a failed test is a
result, not an exception; ``predict`` does raise, since there is no model to
predict from.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .axioms import check_apt, check_qrum, income_invariant_curve
from .config import (
    DEFAULT_CONTINUITY_MODULUS,
    DEFAULT_EQ_TOL,
    DEFAULT_JUMP_THRESHOLD,
    DEFAULT_QUANTILE_MESH,
)
from .dataset import as_choice_dataset
from .errors import (
    DomainError,
    IncomeVarianceError,
    NotApplicableError,
    NotRationalizableError,
)
from .rationalize import apt_rationalize, qrum_construct


class APTRationalizer(BaseEstimator):
    """Test a dataset against the threshold-attention axioms and, on a pass,
    build utilities and an attention distribution that reproduce it.

    Parameters
    ----------
    eq_tol : float
        Slack for share equality comparisons.
    jump_threshold : float
        Minimum drop into the zero tail that counts as a detected jump.
    exact_grid : bool
        Treat the grid as exhaustive: an isolated positive share just below
        the zero tail then fails the suite instead of warning.

    Attributes (after ``fit``)
    --------------------------
    suite_ : AxiomSuiteResult
    rationalizable_ : bool
    utilities_ : UtilityPair or None
    attention_ : AttentionCDF or None
    """

    def __init__(
        self,
        eq_tol: float = DEFAULT_EQ_TOL,
        jump_threshold: float = DEFAULT_JUMP_THRESHOLD,
        exact_grid: bool = False,
    ):
        self.eq_tol = eq_tol
        self.jump_threshold = jump_threshold
        self.exact_grid = exact_grid

    def fit(self, X, y=None):
        ds = as_choice_dataset(X)
        self.dataset_ = ds
        self.suite_ = check_apt(
            ds,
            eq_tol=self.eq_tol,
            jump_threshold=self.jump_threshold,
            exact_grid=self.exact_grid,
        )
        self.rationalizable_ = self.suite_.passed
        if self.rationalizable_:
            self.utilities_, self.attention_ = apt_rationalize(
                ds,
                eq_tol=self.eq_tol,
                jump_threshold=self.jump_threshold,
                exact_grid=self.exact_grid,
                reports=self.suite_,
            )
        else:
            self.utilities_ = None
            self.attention_ = None
        return self

    def predict(self, X):
        """Model-implied shares for an (n, 2) array of (price, income) pairs."""
        check_is_fitted(self, "suite_")
        if not self.rationalizable_:
            raise NotRationalizableError(
                "dataset failed the axiom suite; no model to predict from",
                suite=self.suite_,
            )
        arr = np.asarray(X, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise DomainError("predict expects an (n, 2) array of (price, income)")
        out = np.empty(len(arr))
        for i, (p, y_) in enumerate(arr):
            if p < 0 or y_ <= 0 or p > y_:
                raise DomainError(f"invalid (price, income) pair ({p!r}, {y_!r})")
            if self.utilities_.prefers_good(y_, p):
                out[i] = self.attention_.survival(p)
            else:
                out[i] = 0.0
        return out


class QRUMRationalizer(BaseEstimator):
    """Test a dataset against the income-free random-utility axioms and, on a
    pass, build a valuation quantile curve that reproduces it.

    ``applicable_`` is False when the share curve varies across incomes, in
    which case no suite is run and no primitives exist.

    Attributes (after ``fit``)
    --------------------------
    applicable_ : bool
    suite_ : AxiomSuiteResult or None
    rationalizable_ : bool
    qrum_ : QRUMPrimitives or None
    """

    def __init__(
        self,
        eq_tol: float = DEFAULT_EQ_TOL,
        continuity_modulus: float = DEFAULT_CONTINUITY_MODULUS,
        quantile_mesh: int = DEFAULT_QUANTILE_MESH,
    ):
        self.eq_tol = eq_tol
        self.continuity_modulus = continuity_modulus
        self.quantile_mesh = quantile_mesh

    def fit(self, X, y=None):
        ds = as_choice_dataset(X)
        self.dataset_ = ds
        try:
            income_invariant_curve(ds, eq_tol=self.eq_tol)
        except IncomeVarianceError:
            self.applicable_ = False
            self.suite_ = None
            self.rationalizable_ = False
            self.qrum_ = None
            return self
        self.applicable_ = True
        self.suite_ = check_qrum(
            ds, eq_tol=self.eq_tol, continuity_modulus=self.continuity_modulus
        )
        self.rationalizable_ = self.suite_.passed
        if self.rationalizable_:
            self.qrum_ = qrum_construct(
                ds,
                quantile_mesh=self.quantile_mesh,
                eq_tol=self.eq_tol,
                continuity_modulus=self.continuity_modulus,
            )
        else:
            self.qrum_ = None
        return self

    def predict(self, X):
        """Model-implied shares for an (n,) array of prices (income-free)."""
        check_is_fitted(self, "applicable_")
        if not self.applicable_:
            raise NotApplicableError(
                "share curve varies across incomes; income-free model does not apply"
            )
        if not self.rationalizable_:
            raise NotRationalizableError(
                "dataset failed the axiom suite; no model to predict from",
                suite=self.suite_,
            )
        arr = np.asarray(X, dtype=float)
        if arr.ndim == 2 and arr.shape[1] >= 1:
            arr = arr[:, 0]
        if arr.ndim != 1:
            raise DomainError("predict expects an (n,) array of prices")
        return np.array([self.qrum_.choice_prob(float(p)) for p in arr])
