"""Consumer and circuit utility functions."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import ValidationError


@dataclass(frozen=True)
class UtilityParams:
    """Willingness-to-pay I, quality Q, price P, and the quality exponent."""

    willingness_to_pay: float
    quality: float
    price: float
    exponent: float = 1.0

    def __post_init__(self):
        if self.willingness_to_pay <= 0:
            raise ValidationError("willingness-to-pay must be positive")
        if self.quality <= 0 or self.price <= 0:
            raise ValidationError("quality and price must be positive")
        if self.exponent < 0 or not math.isfinite(self.exponent):
            raise ValidationError("exponent must be finite and >= 0")


def consumer_utility(p: UtilityParams) -> float:
    """U = I * (Q / P) ** exponent.

    Utility rises with quality and falls with price; at exponent zero the
    quality/price ratio stops mattering and utility is the willingness
    to pay itself.
    """
    return p.willingness_to_pay * (p.quality / p.price) ** p.exponent


def net_utility(utility: float, cost: float) -> float:
    """Net worth of implementing one communication circuit: utility minus cost."""
    return utility - cost
