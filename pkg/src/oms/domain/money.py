"""Money and pricing arithmetic.

All prices, charges, and wages live in integer minor currency units (pence).
Rates are exact rationals. No float ever enters a price path; rounding is
half-up to the minor unit at each named component (tax, margin), which makes
every stored breakdown reproducible bit-for-bit from its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from ..errors import ConfigurationError, ValidationError


@dataclass(frozen=True, order=True)
class Money:
    """An exact amount in minor units (pence). Single-currency (GBP)."""

    pence: int

    def __post_init__(self):
        if isinstance(self.pence, bool) or not isinstance(self.pence, int):
            raise ValidationError(f"money must be an integer number of pence, got {self.pence!r}")

    def __add__(self, other: "Money") -> "Money":
        return Money(self.pence + other.pence)

    def __sub__(self, other: "Money") -> "Money":
        return Money(self.pence - other.pence)

    def __mul__(self, qty: int) -> "Money":
        if isinstance(qty, bool) or not isinstance(qty, int):
            raise ValidationError(f"money multiplies by integer quantities only, got {qty!r}")
        return Money(self.pence * qty)

    __rmul__ = __mul__

    def __neg__(self) -> "Money":
        return Money(-self.pence)

    def is_negative(self) -> bool:
        return self.pence < 0

    @staticmethod
    def zero() -> "Money":
        return Money(0)

    def __str__(self) -> str:  # e.g. "£18.10"
        sign = "-" if self.pence < 0 else ""
        return f"{sign}£{abs(self.pence) // 100}.{abs(self.pence) % 100:02d}"


def round_half_up(value: Fraction) -> int:
    """Round an exact rational to the nearest integer, halves away from zero."""
    if value >= 0:
        return int((2 * value.numerator + value.denominator) // (2 * value.denominator))
    return -round_half_up(-value)


@dataclass(frozen=True)
class TaxRate:
    """Dimensionless sales-tax rate, 0 <= rate < 1, exact rational."""

    rate: Fraction

    def __post_init__(self):
        if not (0 <= self.rate < 1):
            raise ValidationError(f"tax rate must satisfy 0 <= rate < 1, got {self.rate}")

    @classmethod
    def basis_points(cls, bp: int) -> "TaxRate":
        return cls(Fraction(bp, 10_000))

    @classmethod
    def percent(cls, pct: int | Fraction) -> "TaxRate":
        return cls(Fraction(pct, 100))


@dataclass(frozen=True)
class MarginRate:
    """Dimensionless profit-margin rate, rate >= 0, exact rational."""

    rate: Fraction

    def __post_init__(self):
        if self.rate < 0:
            raise ValidationError(f"margin rate must be >= 0, got {self.rate}")

    @classmethod
    def basis_points(cls, bp: int) -> "MarginRate":
        return cls(Fraction(bp, 10_000))

    @classmethod
    def percent(cls, pct: int | Fraction) -> "MarginRate":
        return cls(Fraction(pct, 100))


def times_rate(amount: Money, rate: Fraction) -> Money:
    return Money(round_half_up(Fraction(amount.pence) * rate))


@dataclass(frozen=True)
class PriceBreakdown:
    """Itemized price. The total is always the exact component sum."""

    labor: Money
    products: Money
    margin: Money
    tax: Money
    delivery: Money
    total: Money

    def __post_init__(self):
        expected = self.labor + self.products + self.margin + self.tax + self.delivery
        if self.total != expected:
            raise ValidationError(
                f"breakdown total {self.total.pence} != component sum {expected.pence}")
        for name in ("labor", "products", "margin", "tax", "delivery", "total"):
            if getattr(self, name).is_negative():
                raise ValidationError(f"breakdown component {name} is negative")

    @classmethod
    def build(cls, *, labor: Money = Money(0), products: Money = Money(0),
              margin: Money = Money(0), tax: Money = Money(0),
              delivery: Money = Money(0)) -> "PriceBreakdown":
        return cls(labor=labor, products=products, margin=margin, tax=tax,
                   delivery=delivery, total=labor + products + margin + tax + delivery)

    @classmethod
    def zero(cls) -> "PriceBreakdown":
        return cls.build()

    def to_record(self) -> dict:
        return {
            "labor": self.labor.pence,
            "products": self.products.pence,
            "margin": self.margin.pence,
            "tax": self.tax.pence,
            "delivery": self.delivery.pence,
            "total": self.total.pence,
        }

    @classmethod
    def from_record(cls, record: dict) -> "PriceBreakdown":
        return cls(**{k: Money(record[k]) for k in
                      ("labor", "products", "margin", "tax", "delivery", "total")})


OrderLine = tuple[Money, int]  # (unit_price, qty)


def compute_order_price(lines: Sequence[OrderLine], tax_rate: TaxRate,
                        delivery: Money) -> PriceBreakdown:
    """Product-order price: sum of price x qty, plus tax, plus delivery charge.

    An empty cart is valid only with a zero delivery charge and prices to
    nothing.
    """
    if delivery.is_negative():
        raise ValidationError("delivery charge cannot be negative")
    if not lines:
        if delivery != Money(0):
            raise ValidationError("empty cart cannot carry a delivery charge")
        return PriceBreakdown.zero()
    subtotal = Money(0)
    for unit_price, qty in lines:
        if unit_price.is_negative():
            raise ValidationError(f"unit price cannot be negative: {unit_price.pence}")
        if isinstance(qty, bool) or not isinstance(qty, int) or qty < 1:
            raise ValidationError(f"quantity must be a positive integer, got {qty!r}")
        subtotal = subtotal + unit_price * qty
    tax = times_rate(subtotal, tax_rate.rate)
    return PriceBreakdown.build(products=subtotal, tax=tax, delivery=delivery)


def compute_service_price(labor: Money, products: Money, margin_rate: MarginRate,
                          tax_rate: TaxRate) -> PriceBreakdown:
    """One-off service price: labor + cleaning products + margin + sales tax.

    The margin applies to (labor + products); tax applies to the margined
    base, mirroring VAT-on-selling-price practice.
    """
    if labor.is_negative() or products.is_negative():
        raise ValidationError("labor and product costs must be non-negative")
    base = labor + products
    margin = times_rate(base, margin_rate.rate)
    tax = times_rate(base + margin, tax_rate.rate)
    return PriceBreakdown.build(labor=labor, products=products, margin=margin, tax=tax)


@dataclass(frozen=True)
class SupplierContractTerms:
    """Per-supplier delivery terms; a flat fee per delivery."""

    supplier_id: str
    flat_delivery_fee: Money

    def __post_init__(self):
        if self.flat_delivery_fee.is_negative():
            raise ValidationError("contract delivery fee cannot be negative")


def compute_delivery_charge(contract: Optional[SupplierContractTerms]) -> Money:
    """Delivery charge under the supplier's contract terms (flat per delivery)."""
    if contract is None:
        raise ConfigurationError("no supplier contract on file; delivery charge undefined")
    return contract.flat_delivery_fee
