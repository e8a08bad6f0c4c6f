"""Management feedback loop over the quality gap.

The environment demands quality g(t); the organization's value proposition
delivers f(t); the gap is their pointwise difference. Management reviews the
measured gap every ``review_period`` steps and, when it exceeds the
sensitivity threshold, corrects proportionally: f <- f + gain * measured_gap.

With constant demand, no noise, and zero threshold the gap after n reviews is
exactly (1 - gain)^n times the initial gap: gains inside (0, 2) converge,
gain 2 oscillates at constant amplitude, beyond 2 the loop diverges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from ..errors import ValidationError


@dataclass(frozen=True)
class TimeSeries:
    """Ordered (t, value) samples with strictly increasing time indices."""

    times: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.times) != len(self.values):
            raise ValidationError("time and value lists must have equal length")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValidationError("time indices must be strictly increasing")

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[float, float]]) -> "TimeSeries":
        return cls(tuple(float(t) for t, _ in pairs),
                   tuple(float(v) for _, v in pairs))

    def __len__(self) -> int:
        return len(self.times)


def quality_gap(f: TimeSeries, g: TimeSeries) -> TimeSeries:
    """Pointwise demanded-minus-delivered quality.

    Positive values mean the environment expects more than the organization
    is delivering (sales will lag targets); the aligned time grids are
    required, not resampled.
    """
    if f.times != g.times:
        raise ValidationError("series must share the same time indices")
    return TimeSeries(f.times, tuple(gv - fv for fv, gv in zip(f.values, g.values)))


@dataclass(frozen=True)
class LoopParams:
    gain: float                      # proportional correction strength
    sensitivity: float = 0.0         # dead zone: |gap| below this is ignored
    review_period: int = 1           # steps between management reviews
    noise_sigma: float = 0.0         # measurement noise on the reviewed gap
    seed: Optional[int] = None

    def __post_init__(self):
        if not (self.gain > 0) or not math.isfinite(self.gain):
            raise ValidationError("gain must be a positive finite number")
        if self.sensitivity < 0 or not math.isfinite(self.sensitivity):
            raise ValidationError("sensitivity must be finite and >= 0")
        if self.review_period < 1:
            raise ValidationError("review period is at least one step")
        if self.noise_sigma < 0 or not math.isfinite(self.noise_sigma):
            raise ValidationError("noise sigma must be finite and >= 0")


@dataclass
class LoopTrace:
    """Simulation record plus the loop's characteristic metrics."""

    rows: list[dict] = field(default_factory=list)
    # metrics
    frequency: float = 0.0      # corrective actions per step
    sensitivity: float = 0.0    # the configured dead zone
    accuracy: float = 0.0       # mean |measured gap - true gap| at reviews
    period: int = 1             # steps per review iteration

    def gaps_after_reviews(self) -> list[float]:
        return [r["gap"] for r in self.rows if r["reviewed"]]

    def classify_regime(self) -> str:
        """converging / oscillating / diverging, from the observed gap trail."""
        gaps = [abs(r["gap_before"]) for r in self.rows if r["reviewed"]]
        gaps = [g for g in gaps if g > 1e-15]
        if len(gaps) < 2:
            return "converging"
        ratios = [b / a for a, b in zip(gaps, gaps[1:]) if a > 0]
        if not ratios:
            return "converging"
        mean_ratio = sum(ratios) / len(ratios)
        if mean_ratio > 1 + 1e-9:
            return "diverging"
        if mean_ratio < 1 - 1e-9:
            return "converging"
        return "oscillating"

    def to_table(self) -> dict:
        columns = ["t", "f", "g", "gap", "reviewed", "action"]
        return {"columns": columns,
                "rows": [[r[c] for c in columns] for r in self.rows],
                "metrics": {"frequency": self.frequency,
                            "sensitivity": self.sensitivity,
                            "accuracy": self.accuracy,
                            "period": self.period,
                            "regime": self.classify_regime()}}


DemandInput = Union[TimeSeries, Sequence[float], float, Callable[[int], float]]


def simulate_loop(g: DemandInput, f0: float, params: LoopParams,
                  horizon: Optional[int] = None) -> LoopTrace:
    """Run the review loop against a demand signal.

    ``g`` may be a TimeSeries, a plain sequence, a constant, or a callable of
    the step index. Each review measures the gap (with optional Gaussian
    noise), acts only when |measured| reaches the sensitivity threshold, and
    the trace records truth alongside the measurement so the adjustment error
    is observable.
    """
    demand = _demand_fn(g)
    steps = _horizon(g, horizon)
    if steps < 1:
        raise ValidationError("horizon must be at least one step")
    rng = np.random.default_rng(params.seed)
    f = float(f0)
    trace = LoopTrace(sensitivity=params.sensitivity, period=params.review_period)
    actions = 0
    measurement_errors: list[float] = []
    for t in range(1, steps + 1):
        g_t = demand(t)
        true_gap_before = g_t - f
        reviewed = (t % params.review_period == 0)
        action = None
        if reviewed:
            noise = float(rng.normal(0.0, params.noise_sigma)) if params.noise_sigma else 0.0
            measured = true_gap_before + noise
            measurement_errors.append(abs(measured - true_gap_before))
            if abs(measured) >= params.sensitivity and measured != 0.0:
                adjustment = params.gain * measured
                f += adjustment
                action = adjustment
                actions += 1
        trace.rows.append({
            "t": t, "f": f, "g": g_t, "gap_before": true_gap_before,
            "gap": g_t - f, "reviewed": reviewed, "action": action,
        })
    trace.frequency = actions / steps
    trace.accuracy = (sum(measurement_errors) / len(measurement_errors)
                      if measurement_errors else 0.0)
    return trace


def _demand_fn(g: DemandInput) -> Callable[[int], float]:
    if isinstance(g, TimeSeries):
        values = g.values
        return lambda t: values[min(t - 1, len(values) - 1)]
    if callable(g):
        return lambda t: float(g(t))
    if isinstance(g, (int, float)):
        return lambda t: float(g)
    values = [float(v) for v in g]
    if not values:
        raise ValidationError("demand sequence cannot be empty")
    return lambda t: values[min(t - 1, len(values) - 1)]


def _horizon(g: DemandInput, horizon: Optional[int]) -> int:
    if horizon is not None:
        return horizon
    if isinstance(g, TimeSeries):
        return len(g)
    if isinstance(g, (list, tuple)):
        return len(g)
    raise ValidationError("a horizon is required for constant or callable demand")
