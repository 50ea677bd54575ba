"""Population specs, forward simulation, and the consumer-level oracle."""

import math

import numpy as np
import pytest

from aptwelfare import (
    AttentionCDF,
    DomainError,
    MonotoneCurve,
    Population,
    PriceChange,
    QRUMPrimitives,
    UtilityPair,
    consumer_ev,
    forward_choice_prob,
    monte_carlo_ev,
    population_from_spec,
    reservation_price,
    uniform_grid,
)


def _pair(knots, offset=0.0, hi=None):
    u0 = MonotoneCurve(tuple(knots))
    top = hi if hi is not None else max(x for x, _ in knots)
    u1 = MonotoneCurve(((0.0, offset), (top, top + offset)))
    return UtilityPair(u0, u1)


@pytest.fixture
def step_pop():
    """Reservation 1 at income 2 and 2 at income 4; step attention."""
    return Population(
        kind="apt",
        utilities=_pair([(2.0, 1.0), (4.0, 2.0)]),
        attention=AttentionCDF(((0.5, 0.25), (1.5, 1.0))),
        seed=3,
    )


class TestPopulationValidation:
    def test_unknown_kind(self):
        with pytest.raises(DomainError):
            Population(kind="logit")

    def test_apt_needs_exactly_one_attention_source(self):
        pair = _pair([(2.0, 1.0)])
        with pytest.raises(DomainError):
            Population(kind="apt", utilities=pair)
        with pytest.raises(DomainError):
            Population(
                kind="apt",
                utilities=pair,
                attention=AttentionCDF.uniform(0.0, 1.0),
                thresholds=(0.5,),
            )

    def test_thresholds_must_be_clean(self):
        pair = _pair([(2.0, 1.0)])
        with pytest.raises(DomainError):
            Population(kind="apt", utilities=pair, thresholds=(-1.0,))
        with pytest.raises(DomainError):
            Population(kind="apt", utilities=pair, thresholds=(math.nan,))
        Population(kind="apt", utilities=pair, thresholds=(0.5, math.inf))

    def test_qrum_kind_excludes_choice_primitives(self):
        prim = QRUMPrimitives(MonotoneCurve(((0.0, 2.0), (1.0, 0.0))))
        Population(kind="qrum", qrum=prim)
        with pytest.raises(DomainError):
            Population(kind="qrum", qrum=prim, utilities=_pair([(2.0, 1.0)]))
        with pytest.raises(DomainError):
            Population(kind="qrum")

    def test_attention_survival_is_strict(self):
        pair = _pair([(4.0, 2.0)])
        pop = Population(kind="apt", utilities=pair, thresholds=(1.0, 2.0))
        assert pop.attention_survival(1.0) == 0.5
        assert pop.attention_survival(0.5) == 1.0
        assert pop.attention_survival(2.0) == 0.0

    def test_finite_threshold_lists_sample_as_themselves(self):
        pair = _pair([(4.0, 2.0)])
        pop = Population(kind="apt", utilities=pair, thresholds=(1.0, 2.0))
        draws = pop.sample_thresholds(np.random.default_rng(0), 10)
        assert list(draws) == [1.0, 2.0]


class TestPopulationFromSpec:
    def test_unknown_keys_are_rejected(self):
        with pytest.raises(DomainError):
            population_from_spec({"kind": "apt", "fancy": 1})

    def test_conflicting_utility_keys_are_rejected(self):
        base = {
            "kind": "apt",
            "u0_knots": [[2.0, 1.0]],
            "g": {"uniform": [0.0, 1.0]},
        }
        with pytest.raises(DomainError):
            population_from_spec({**base, "u0": {"knots": [[2.0, 1.0]]}})

    def test_linear_u0_needs_incomes(self):
        spec = {"kind": "apt", "u0_knots": "linear", "g": {"uniform": [0.0, 1.0]}}
        with pytest.raises(DomainError):
            population_from_spec(spec)
        pop = population_from_spec({**spec, "incomes": [2.0, 4.0]})
        assert pop.utilities.u0(4.0) == 4.0

    def test_u1_offset_shifts_the_identity(self):
        pop = population_from_spec(
            {
                "kind": "apt",
                "u0_knots": "linear",
                "u1_offset": 1.5,
                "g": {"uniform": [0.0, 2.0]},
                "incomes": [2.0, 4.0],
            }
        )
        assert pop.utilities.u1(0.0) == 1.5
        assert pop.utilities.u1(2.0) == pytest.approx(3.5)

    def test_uniform_attention_with_tail_mass(self):
        pop = population_from_spec(
            {
                "kind": "apt",
                "u0_knots": [[2.0, 0.5], [4.0, 2.0]],
                "g": {"uniform": [0.0, 2.0]},
                "tail_mass": 0.25,
                "incomes": [2.0, 4.0],
            }
        )
        assert pop.attention.tail_mass == 0.25
        assert pop.attention.value(2.0) == pytest.approx(0.75)
        assert pop.attention.kind == "linear"

    def test_finite_thresholds_with_tail_mass_are_contradictory(self):
        spec = {
            "kind": "apt",
            "u0_knots": [[2.0, 0.5]],
            "attention": {"thresholds": [0.5, 1.0]},
            "tail_mass": 0.25,
        }
        with pytest.raises(DomainError):
            population_from_spec(spec)

    def test_threshold_list_population(self):
        pop = population_from_spec(
            {
                "kind": "apt",
                "u0_knots": [[2.0, 0.5]],
                "attention": {"thresholds": [0.5, 1.0]},
            }
        )
        assert pop.thresholds == (0.5, 1.0)

    def test_qrum_spec(self):
        pop = population_from_spec(
            {
                "kind": "qrum",
                "qrum": {"f_knots": [[0.0, 3.0], [1.0, 0.0]], "f_kind": "linear"},
                "seed": 9,
            }
        )
        assert pop.kind == "qrum"
        assert pop.seed == 9
        assert pop.qrum.choice_prob(1.5) == pytest.approx(0.5)


class TestForwardChoiceProb:
    def test_hand_computed_shares(self, step_pop):
        grid = uniform_grid([2.0, 4.0], 0.5)
        ds = forward_choice_prob(step_pop, grid)
        assert ds.q1(0.0, 2.0) == 1.0
        assert ds.q1(0.5, 2.0) == 0.75
        assert ds.q1(1.0, 2.0) == 0.0  # reservation tie goes to the outside good
        assert ds.q1(0.5, 4.0) == 0.75
        assert ds.q1(1.0, 4.0) == 0.75
        assert ds.q1(1.5, 4.0) == 0.0  # attention mass at 1.5 is not strict
        assert ds.q1(2.0, 4.0) == 0.0

    def test_qrum_forward_is_income_free(self):
        prim = QRUMPrimitives(MonotoneCurve(((0.0, 3.0), (1.0, 0.0))))
        pop = Population(kind="qrum", qrum=prim)
        ds = forward_choice_prob(pop, uniform_grid([3.0, 6.0], 0.5))
        assert ds.q1(1.5, 3.0) == pytest.approx(0.5)
        assert ds.q1(1.5, 6.0) == pytest.approx(0.5)
        assert ds.q1(0.0, 6.0) == 1.0
        assert ds.q1(3.0, 3.0) == pytest.approx(0.0)

    def test_injection_adds_reservations_and_thresholds(self, step_pop):
        grid = uniform_grid([2.0], 0.4)
        ds = forward_choice_prob(step_pop, grid, inject_breakpoints=True)
        prices = list(ds.grid.prices)
        for p in (0.5, 1.0, 1.5):
            assert any(abs(q - p) < 1e-6 for q in prices), p
        assert ds.q1(0.8, 2.0) == 0.75
        assert ds.q1(1.2, 2.0) == 0.0  # beyond the injected reservation price

    def test_injection_never_displaces_grid_points(self):
        # reservation price 1.2 already sits on the grid; the attention knot
        # differs from a grid point by less than the coordinate tolerance
        pop = Population(
            kind="apt",
            utilities=_pair([(2.0, 0.8)]),
            attention=AttentionCDF(((0.4 + 5e-10, 1.0),)),
        )
        grid = uniform_grid([2.0], 0.4)
        ds = forward_choice_prob(pop, grid, inject_breakpoints=True)
        assert list(ds.grid.prices) == list(grid.prices)

    def test_injection_skips_incomes_that_never_stop_buying(self):
        pair = UtilityPair(
            MonotoneCurve(((1.0, 0.0), (4.0, 3.5))),
            MonotoneCurve(((0.0, 0.5), (4.0, 4.5))),
        )
        pop = Population(
            kind="apt", utilities=pair, attention=AttentionCDF.uniform(0.0, 8.0)
        )
        # income 1 never reaches indifference: u1(0) = 0.5 > u0(1) = 0
        ds = forward_choice_prob(pop, uniform_grid([1.0, 4.0], 0.5),
                                 inject_breakpoints=True)
        assert float(ds.q[ds.grid.top_price_index(0), 0]) > 0.0


class TestReservationPrice:
    def test_linear_solutions(self, step_pop):
        pair = step_pop.utilities
        assert reservation_price(pair, 2.0) == pytest.approx(1.0, abs=1e-8)
        assert reservation_price(pair, 4.0) == pytest.approx(2.0, abs=1e-8)

    def test_zero_when_the_good_is_never_strictly_better(self):
        pair = UtilityPair(MonotoneCurve.identity(4.0), MonotoneCurve.identity(4.0))
        assert reservation_price(pair, 4.0) == 0.0

    def test_never_indifferent_income_is_rejected(self):
        pair = UtilityPair(
            MonotoneCurve.identity(4.0),
            MonotoneCurve(((0.0, 1.5), (4.0, 5.5))),
        )
        with pytest.raises(DomainError):
            reservation_price(pair, 1.0)


class TestConsumerEv:
    def _pc(self):
        return PriceChange(1.0, 2.0, 10.0)

    def _pair(self, r=3.0, offset=0.0, slope=1.0):
        y = 10.0
        u0 = MonotoneCurve(
            ((0.0, y + offset - r - slope * y), (y, y + offset - r))
        )
        u1 = MonotoneCurve(((0.0, offset), (y, y + offset)))
        return UtilityPair(u0, u1)

    def test_inattentive_consumers_lose_nothing(self):
        res = consumer_ev(self._pair(), 1.0, self._pc())
        assert res.attention == "none"
        assert res.ev == 0.0

    def test_partial_attention_loses_the_whole_surplus(self):
        res = consumer_ev(self._pair(r=3.0), 1.5, self._pc())
        assert res.attention == "partial"
        assert res.ev == pytest.approx(2.0, abs=1e-8)  # exceeds the delta

    def test_full_attention_pays_at_most_the_delta(self):
        res = consumer_ev(self._pair(r=3.0), 5.0, self._pc())
        assert res.attention == "full"
        assert res.ev == pytest.approx(1.0, abs=1e-8)
        assert not res.boundary

    def test_full_attention_with_early_exit_pays_the_reservation_gap(self):
        pc = PriceChange(1.0, 3.0, 10.0)
        res = consumer_ev(self._pair(r=2.0), 5.0, pc)
        assert res.ev == pytest.approx(1.0, abs=1e-8)

    def test_boundary_between_staying_and_leaving_is_flagged(self):
        pc = PriceChange(1.0, 3.0, 10.0)
        res = consumer_ev(self._pair(r=3.0), 5.0, pc)
        assert res.boundary
        assert res.ev == pytest.approx(2.0, abs=1e-8)

    def test_threshold_at_the_old_price_means_no_attention(self):
        res = consumer_ev(self._pair(r=3.0), 1.0, self._pc())
        assert res.attention == "none"

    def test_threshold_at_the_new_price_means_partial_attention(self):
        res = consumer_ev(self._pair(r=3.0), 2.0, self._pc())
        assert res.attention == "partial"

    def test_never_indifferent_income_is_rejected(self):
        pair = UtilityPair(
            MonotoneCurve.identity(10.0),
            MonotoneCurve(((0.0, 11.0), (10.0, 21.0))),
        )
        with pytest.raises(DomainError):
            consumer_ev(pair, 5.0, self._pc())


class TestMonteCarloEv:
    def test_finite_threshold_lists_give_exact_atoms(self):
        pop = Population(
            kind="apt",
            utilities=_pair([(10.0, 7.0)], hi=10.0),
            thresholds=(0.5, 1.5, 5.0, 5.0),
        )
        dist = monte_carlo_ev(pop, PriceChange(1.0, 2.0, 10.0), n=100)
        values = [v for v, _ in dist.atoms]
        masses = [m for _, m in dist.atoms]
        assert values == pytest.approx([0.0, 1.0, 2.0], abs=1e-8)
        assert masses == pytest.approx([0.25, 0.5, 0.25])

    def test_same_seed_same_distribution(self):
        pop = Population(
            kind="apt",
            utilities=_pair([(10.0, 7.0)], hi=10.0),
            attention=AttentionCDF.uniform(0.0, 4.0),
            seed=12,
        )
        pc = PriceChange(1.0, 2.0, 10.0)
        a = monte_carlo_ev(pop, pc, n=2000)
        b = monte_carlo_ev(pop, pc, n=2000)
        assert a.atoms == b.atoms

    def test_seed_override_changes_the_draw(self):
        pop = Population(
            kind="apt",
            utilities=_pair([(10.0, 7.0)], hi=10.0),
            attention=AttentionCDF.uniform(0.0, 4.0),
            seed=12,
        )
        pc = PriceChange(1.0, 2.0, 10.0)
        a = monte_carlo_ev(pop, pc, n=2000)
        c = monte_carlo_ev(pop, pc, n=2000, seed=99)
        assert a.atoms != c.atoms

    def test_qrum_oracle_matches_the_clipped_valuation(self):
        prim = QRUMPrimitives(MonotoneCurve(((0.0, 3.0), (1.0, 0.0))))
        pop = Population(kind="qrum", qrum=prim, seed=5)
        pc = PriceChange(1.0, 2.0, 3.0)
        n = 20_000
        dist = monte_carlo_ev(pop, pc, n=n)
        mean_ev = sum(v * m for v, m in dist.atoms)
        assert mean_ev == pytest.approx(0.5, abs=0.05)
        # P(EV <= 0.5) = P(valuation <= 1.5) = 0.5
        at_half = sum(m for v, m in dist.atoms if v <= 0.5)
        assert abs(at_half - 0.5) <= 3 * math.sqrt(0.25 / n)
        assert dist.model == "empirical"
        assert max(v for v, _ in dist.atoms) <= pc.delta + 1e-9
