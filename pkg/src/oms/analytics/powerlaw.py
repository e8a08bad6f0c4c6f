"""Power-law fitting and long-tail measures for participation data.

Counts against values are fit with a least-squares line in log-log space
(descriptive, not maximum-likelihood): a frequency proportional to
value**(-k) shows up as slope -k. The long-tail split reports how much of
the total mass the ranked head holds versus the tail, in exact rational
arithmetic so the shares always sum to one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..errors import ValidationError


@dataclass(frozen=True)
class PowerLawFit:
    """Fitted scale c, exponent k, and the log-log r-squared.

    ``power_law`` is False when the fitted exponent is not positive (a flat
    or rising profile); c and k still report what the regression saw.
    """

    c: float
    k: float
    r_squared: float
    power_law: bool
    points_used: int


def fit_power_law(samples: Sequence[tuple[float, float]]) -> PowerLawFit:
    """Least-squares log-log fit of (value, count) pairs.

    Bins with zero count (or non-positive value) are dropped; at least three
    usable points are required.
    """
    usable = [(v, c) for v, c in samples if v > 0 and c > 0]
    if len(usable) < 3:
        raise ValidationError(
            f"power-law fit needs at least 3 usable points, got {len(usable)}")
    x = np.log(np.array([v for v, _ in usable], dtype=float))
    y = np.log(np.array([c for _, c in usable], dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    if abs(slope) < 1e-12:  # numerically flat profile
        slope = 0.0
    predicted = slope * x + intercept
    ss_res = float(np.sum((y - predicted) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r_squared = 1.0 if ss_tot < 1e-20 else 1.0 - ss_res / ss_tot
    k = -float(slope)
    return PowerLawFit(c=float(math.exp(intercept)), k=k, r_squared=r_squared,
                       power_law=k > 0, points_used=len(usable))


@dataclass(frozen=True)
class TailShares:
    head_share: Fraction
    tail_share: Fraction
    critical_mass: bool

    def to_record(self) -> dict:
        return {"head_share": float(self.head_share),
                "tail_share": float(self.tail_share),
                "head_share_exact": [self.head_share.numerator,
                                     self.head_share.denominator],
                "critical_mass": self.critical_mass}


def tail_share(ranked_values: Sequence[float | int | Fraction],
               head_fraction: float | Fraction, *,
               critical_head: float | Fraction = Fraction(3, 100),
               critical_dominance: float | Fraction = Fraction(1, 2)) -> TailShares:
    """Split the ranked (descending) mass at the head fraction.

    head_share is the exact share of total value held by the top
    ceil(head_fraction * n) entries; tail_share is its complement. The
    critical-mass flag reports whether the top ``critical_head`` of entries
    (3% by default) already hold at least ``critical_dominance`` of the value.
    """
    values = [Fraction(v).limit_denominator(10**12) if isinstance(v, float)
              else Fraction(v) for v in ranked_values]
    if not values:
        raise ValidationError("ranked values cannot be empty")
    if any(b > a for a, b in zip(values, values[1:])):
        raise ValidationError("values must be ranked in descending order")
    if any(v < 0 for v in values):
        raise ValidationError("values must be non-negative")
    head_fraction = Fraction(head_fraction).limit_denominator(10**9)
    if not (0 < head_fraction < 1):
        raise ValidationError("head fraction must lie strictly between 0 and 1")
    total = sum(values)
    if total == 0:
        raise ValidationError("total value is zero; shares are undefined")
    n = len(values)
    head_n = math.ceil(head_fraction * n)
    head = sum(values[:head_n])
    head_share = Fraction(head, 1) / total
    crit_n = math.ceil(Fraction(critical_head).limit_denominator(10**9) * n)
    crit_share = Fraction(sum(values[:crit_n]), 1) / total
    return TailShares(
        head_share=head_share,
        tail_share=1 - head_share,
        critical_mass=crit_share >= Fraction(critical_dominance).limit_denominator(10**9),
    )


def synthesize_counts(c: float, k: float, values: Sequence[float], *,
                      noise: float = 0.0, seed: int | None = None) -> list[tuple[float, float]]:
    """Generate (value, count) pairs from count = c * value**(-k), optionally
    with multiplicative lognormal-free noise (1 + eps factors), for
    fit-recovery checks."""
    rng = np.random.default_rng(seed)
    out = []
    for v in values:
        count = c * float(v) ** (-k)
        if noise:
            count *= 1.0 + float(rng.uniform(-noise, noise))
        out.append((float(v), count))
    return out
