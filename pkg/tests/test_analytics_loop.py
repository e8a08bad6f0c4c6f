"""Feedback-loop mathematics: gap arithmetic, geometric convergence, regimes."""

import math

import pytest

from oms.analytics import LoopParams, TimeSeries, quality_gap, simulate_loop
from oms.errors import ValidationError


class TestQualityGap:
    def test_identical_series_gap_is_zero(self):
        f = TimeSeries((1, 2, 3), (5.0, 5.0, 5.0))
        assert quality_gap(f, f).values == (0.0, 0.0, 0.0)

    def test_pointwise_subtraction(self):
        f = TimeSeries((1, 2), (100.0, 110.0))
        g = TimeSeries((1, 2), (120.0, 115.0))
        assert quality_gap(f, g).values == (20.0, 5.0)

    def test_lagging_supply_gives_all_positive_gap(self):
        demand = TimeSeries((2004, 2005, 2006), (509.0, 630.0, 750.0))
        supply = TimeSeries((2004, 2005, 2006), (400.0, 500.0, 600.0))
        gap = quality_gap(supply, demand)
        assert all(v > 0 for v in gap.values)

    def test_misaligned_series_rejected(self):
        with pytest.raises(ValidationError):
            quality_gap(TimeSeries((1,), (1.0,)), TimeSeries((2,), (1.0,)))

    def test_time_indices_strictly_increase(self):
        with pytest.raises(ValidationError):
            TimeSeries((1, 1), (0.0, 0.0))


class TestSimulation:
    def test_unit_gain_corrects_in_one_review(self):
        trace = simulate_loop(100.0, 0.0, LoopParams(gain=1.0), horizon=5)
        gaps = trace.gaps_after_reviews()
        assert gaps[0] == 0.0
        assert all(g == 0.0 for g in gaps)
        assert trace.rows[0]["f"] == 100.0

    def test_half_gain_halves_the_gap_each_review(self):
        trace = simulate_loop(100.0, 0.0, LoopParams(gain=0.5), horizon=6)
        gaps = trace.gaps_after_reviews()
        assert gaps == pytest.approx([50.0, 25.0, 12.5, 6.25, 3.125, 1.5625])

    def test_dead_zone_suppresses_small_gaps(self):
        trace = simulate_loop(5.0, 0.0, LoopParams(gain=1.0, sensitivity=10.0),
                              horizon=10)
        assert trace.frequency == 0.0
        assert all(r["action"] is None for r in trace.rows)
        assert trace.gaps_after_reviews()[-1] == 5.0

    @pytest.mark.parametrize("gain", [0.25, 0.5, 1.0, 1.5])
    def test_geometric_decay_exact(self, gain):
        q0, horizon = 80.0, 30
        trace = simulate_loop(q0, 0.0, LoopParams(gain=gain), horizon=horizon)
        for n, gap in enumerate(trace.gaps_after_reviews(), start=1):
            assert abs(abs(gap) - abs(1 - gain) ** n * q0) < 1e-9

    def test_gain_two_oscillates_at_constant_amplitude(self):
        trace = simulate_loop(60.0, 0.0, LoopParams(gain=2.0), horizon=12)
        gaps = trace.gaps_after_reviews()
        assert all(abs(abs(g) - 60.0) < 1e-9 for g in gaps)
        assert trace.classify_regime() == "oscillating"

    def test_beyond_two_diverges(self):
        trace = simulate_loop(10.0, 0.0, LoopParams(gain=2.5), horizon=12)
        gaps = trace.gaps_after_reviews()
        assert abs(gaps[-1]) > abs(gaps[0])
        assert trace.classify_regime() == "diverging"

    def test_inside_unit_interval_converges(self):
        trace = simulate_loop(10.0, 0.0, LoopParams(gain=0.3), horizon=20)
        assert trace.classify_regime() == "converging"

    def test_review_period_spaces_actions(self):
        trace = simulate_loop(100.0, 0.0, LoopParams(gain=1.0, review_period=3),
                              horizon=9)
        reviewed = [r["t"] for r in trace.rows if r["reviewed"]]
        assert reviewed == [3, 6, 9]
        assert trace.period == 3
        assert trace.frequency == pytest.approx(1 / 9)  # one action at t=3

    def test_accuracy_zero_without_noise(self):
        trace = simulate_loop(100.0, 0.0, LoopParams(gain=0.5), horizon=10)
        assert trace.accuracy == 0.0

    def test_noise_yields_positive_accuracy_error(self):
        params = LoopParams(gain=0.5, noise_sigma=5.0, seed=11)
        trace = simulate_loop(100.0, 0.0, params, horizon=50)
        assert trace.accuracy > 0.0
        # seeded: deterministic repeat
        again = simulate_loop(100.0, 0.0, params, horizon=50)
        assert trace.accuracy == again.accuracy

    def test_series_demand_tracks_changes(self):
        g = TimeSeries(tuple(range(1, 7)), (10.0, 10.0, 10.0, 30.0, 30.0, 30.0))
        trace = simulate_loop(g, 0.0, LoopParams(gain=1.0))
        assert trace.rows[2]["gap"] == 0.0
        assert trace.rows[3]["gap_before"] == 20.0
        assert trace.rows[5]["gap"] == 0.0

    def test_invalid_gain_rejected(self):
        with pytest.raises(ValidationError):
            LoopParams(gain=0.0)
        with pytest.raises(ValidationError):
            LoopParams(gain=-1.0)
        with pytest.raises(ValidationError):
            LoopParams(gain=math.inf)

    def test_constant_demand_requires_horizon(self):
        with pytest.raises(ValidationError):
            simulate_loop(100.0, 0.0, LoopParams(gain=1.0))

    def test_callable_demand(self):
        trace = simulate_loop(lambda t: float(10 * t), 0.0,
                              LoopParams(gain=1.0), horizon=4)
        assert [r["g"] for r in trace.rows] == [10.0, 20.0, 30.0, 40.0]

    def test_trace_table_shape(self):
        trace = simulate_loop(10.0, 0.0, LoopParams(gain=0.5), horizon=3)
        table = trace.to_table()
        assert table["columns"] == ["t", "f", "g", "gap", "reviewed", "action"]
        assert len(table["rows"]) == 3
        assert table["metrics"]["period"] == 1
        assert table["metrics"]["regime"] == "converging"
