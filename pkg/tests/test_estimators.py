"""Estimator facade: fit stores verdicts, predict replays the model."""

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from aptwelfare import (
    APTRationalizer,
    DomainError,
    NotApplicableError,
    NotRationalizableError,
    QRUMRationalizer,
    save_csv,
)


class TestAPTRationalizer:
    def test_fit_on_passing_data(self, mutation_base):
        est = APTRationalizer().fit(mutation_base)
        assert est.rationalizable_
        assert est.suite_.passed
        assert est.utilities_.u0.knots == ((2.0, 0.0), (4.0, 0.0))
        assert est.attention_.tail_flag

    def test_predict_replays_the_dataset(self, mutation_base):
        est = APTRationalizer().fit(mutation_base)
        grid = mutation_base.grid
        pairs, expected = [], []
        for j, y in enumerate(grid.incomes):
            for i in range(grid.top_price_index(j) + 1):
                pairs.append([float(grid.prices[i]), float(y)])
                expected.append(float(mutation_base.q[i, j]))
        np.testing.assert_allclose(est.predict(pairs), expected, atol=1e-9)

    def test_fit_stores_failure_instead_of_raising(
        self, mutation_base, mutate_cell
    ):
        bad = mutate_cell(mutation_base, 2.0, 4.0, 0.55)
        est = APTRationalizer().fit(bad)
        assert not est.rationalizable_
        assert est.utilities_ is None
        with pytest.raises(NotRationalizableError) as exc:
            est.predict([[1.0, 4.0]])
        assert exc.value.suite.failed_axioms == ("A_ii",)

    def test_predict_before_fit_raises(self):
        with pytest.raises(NotFittedError):
            APTRationalizer().predict([[1.0, 2.0]])

    def test_predict_validates_pairs(self, mutation_base):
        est = APTRationalizer().fit(mutation_base)
        with pytest.raises(DomainError):
            est.predict([[1.0, 2.0, 3.0]])
        with pytest.raises(DomainError):
            est.predict([[3.0, 2.0]])  # price above income

    def test_fit_accepts_csv_paths(self, tmp_path, mutation_base):
        path = tmp_path / "shares.csv"
        save_csv(mutation_base, path)
        est = APTRationalizer().fit(str(path))
        assert est.rationalizable_

    def test_fit_accepts_row_arrays(self, mutation_base):
        grid = mutation_base.grid
        rows = [
            [float(grid.prices[i]), float(y), float(mutation_base.q[i, j])]
            for j, y in enumerate(grid.incomes)
            for i in range(grid.top_price_index(j) + 1)
        ]
        est = APTRationalizer().fit(np.asarray(rows))
        assert est.rationalizable_

    def test_exact_grid_parameter_reaches_the_suite(self, mutation_base):
        est = APTRationalizer(exact_grid=True).fit(mutation_base)
        assert not est.rationalizable_
        assert est.suite_.failed_axioms == ("D",)

    def test_clone_keeps_parameters(self):
        est = APTRationalizer(eq_tol=1e-6, jump_threshold=0.1, exact_grid=True)
        twin = clone(est)
        assert twin.get_params() == est.get_params()


class TestQRUMRationalizer:
    def test_fit_on_income_free_data(self, dataset_builder):
        ds = dataset_builder(
            [0.0, 0.5, 1.0, 1.5, 2.0],
            [2.0],
            {2.0: [1.0, 0.75, 0.5, 0.25, 0.0]},
        )
        est = QRUMRationalizer().fit(ds)
        assert est.applicable_
        assert est.rationalizable_
        preds = est.predict([0.0, 0.5, 1.0])
        np.testing.assert_allclose(preds, [1.0, 0.75, 0.5], atol=2 / 1024)

    def test_income_varying_data_is_inapplicable(self, mutation_base):
        est = QRUMRationalizer().fit(mutation_base)
        assert not est.applicable_
        assert est.suite_ is None
        with pytest.raises(NotApplicableError):
            est.predict([1.0])

    def test_failing_suite_blocks_predict(self, dataset_builder):
        ds = dataset_builder([0.0, 1.0, 2.0], [2.0], {2.0: [1.0, 0.4, 0.5]})
        est = QRUMRationalizer().fit(ds)
        assert est.applicable_
        assert not est.rationalizable_
        with pytest.raises(NotRationalizableError):
            est.predict([1.0])

    def test_predict_before_fit_raises(self):
        with pytest.raises(NotFittedError):
            QRUMRationalizer().predict([1.0])

    def test_clone_keeps_parameters(self):
        est = QRUMRationalizer(eq_tol=1e-6, continuity_modulus=5.0, quantile_mesh=256)
        assert clone(est).get_params() == est.get_params()
