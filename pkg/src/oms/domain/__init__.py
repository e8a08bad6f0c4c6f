"""Pure domain types: exact money arithmetic, pricing, and the rule registry."""

from .money import (Money, TaxRate, MarginRate, PriceBreakdown, SupplierContractTerms,
                    compute_order_price, compute_service_price, compute_delivery_charge,
                    round_half_up, times_rate)
from .rules import (Allow, Deny, Trigger, Value, RuleOutcome, RuleKind, Dynamism,
                    BusinessRule, RULES, ALL_RULE_IDS, check_rule)

__all__ = [
    "Money", "TaxRate", "MarginRate", "PriceBreakdown", "SupplierContractTerms",
    "compute_order_price", "compute_service_price", "compute_delivery_charge",
    "round_half_up", "times_rate",
    "Allow", "Deny", "Trigger", "Value", "RuleOutcome", "RuleKind", "Dynamism",
    "BusinessRule", "RULES", "ALL_RULE_IDS", "check_rule",
]
