"""Executable business-rule registry.

Twenty rules (BR1..BR20) drive account policy, pricing, scheduling priority,
sheet access, and reporting cadence. Each rule is registered with its kind
(fact / constraint / computation) and dynamism (static / dynamic) and a
deterministic evaluator over a context mapping:

* constraints evaluate to Allow or Deny(reason);
* facts evaluate to Allow or Trigger(event) — the event is the system action
  the fact mandates (reorder, password change, report generation, ...);
* computations evaluate to Value.

BR7 is the one constraint that resolves a contest rather than gating an
action, so it returns Value naming the winning contender.

Evaluators read only named context fields; a missing field raises
RuleEvaluationError naming it, and every rule evaluates without crashing for
every well-formed context.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date
from enum import Enum
from fractions import Fraction
from typing import Any, Callable, Mapping, Union

from ..errors import RuleEvaluationError, ValidationError
from .money import (Money, MarginRate, TaxRate, compute_order_price,
                    compute_service_price)


class RuleKind(str, Enum):
    FACT = "fact"
    CONSTRAINT = "constraint"
    COMPUTATION = "computation"


class Dynamism(str, Enum):
    STATIC = "static"
    DYNAMIC = "dynamic"


@dataclass(frozen=True)
class Allow:
    rule_id: str


@dataclass(frozen=True)
class Deny:
    rule_id: str
    reason: str


@dataclass(frozen=True)
class Trigger:
    rule_id: str
    event: str


@dataclass(frozen=True)
class Value:
    rule_id: str
    value: Any


RuleOutcome = Union[Allow, Deny, Trigger, Value]


@dataclass(frozen=True)
class BusinessRule:
    id: str
    kind: RuleKind
    dynamism: Dynamism
    source: str
    evaluate: Callable[[Mapping[str, Any]], RuleOutcome]


def _field(rule_id: str, context: Mapping[str, Any], name: str) -> Any:
    if name not in context:
        raise RuleEvaluationError(rule_id, name)
    return context[name]


MANAGEMENT_ROLES = {"director", "administrator"}


def _br1(ctx: Mapping[str, Any]) -> RuleOutcome:
    # system use requires an account
    if _field("BR1", ctx, "has_account"):
        return Allow("BR1")
    return Trigger("BR1", "create-account")


def _br2(ctx: Mapping[str, Any]) -> RuleOutcome:
    # no access while suspended or after leaving
    state = _field("BR2", ctx, "account_state")
    if state in ("suspended", "deleted"):
        return Trigger("BR2", "revoke-permissions")
    return Allow("BR2")


def _br3(ctx: Mapping[str, Any]) -> RuleOutcome:
    # restock when stock falls to half of store capacity
    stock = _field("BR3", ctx, "stock")
    capacity = _field("BR3", ctx, "capacity")
    if capacity <= 0:
        raise ValidationError("store capacity must be positive")
    if Fraction(stock, capacity) <= Fraction(1, 2):
        return Trigger("BR3", "reorder")
    return Allow("BR3")


def _on_duty(rule_id: str, ctx: Mapping[str, Any]) -> RuleOutcome:
    actor = _field(rule_id, ctx, "actor_id")
    on_duty = _field(rule_id, ctx, "on_duty_supervisor_id")
    if actor == on_duty:
        return Allow(rule_id)
    return Deny(rule_id, "sheet access is limited to the shift's on-duty supervisor")


def _br5(ctx: Mapping[str, Any]) -> RuleOutcome:
    breakdown = compute_service_price(
        Money(_field("BR5", ctx, "labor")),
        Money(_field("BR5", ctx, "products")),
        MarginRate.basis_points(_field("BR5", ctx, "margin_bp")),
        TaxRate.basis_points(_field("BR5", ctx, "tax_bp")),
    )
    return Value("BR5", breakdown)


def _br7(ctx: Mapping[str, Any]) -> RuleOutcome:
    # contracted customers win scheduling contests; ties keep submission order
    contenders = _field("BR7", ctx, "contenders")
    if not contenders:
        raise RuleEvaluationError("BR7", "contenders")
    winner = next((c for c in contenders if c.get("contracted")), contenders[0])
    return Value("BR7", winner["id"])


def _br8(ctx: Mapping[str, Any]) -> RuleOutcome:
    bits = _field("BR8", ctx, "encryption_bits")
    if bits >= 128:
        return Allow("BR8")
    return Deny("BR8", f"sensitive transmission needs >=128-bit protection, got {bits}")


def _br9(ctx: Mapping[str, Any]) -> RuleOutcome:
    age = _field("BR9", ctx, "password_age_days")
    if age > 21:
        return Trigger("BR9", "password-change")
    return Allow("BR9")


def _cadence(rule_id: str, event: str, due: Callable[[date, date], bool]):
    def evaluate(ctx: Mapping[str, Any]) -> RuleOutcome:
        now = date.fromisoformat(_field(rule_id, ctx, "now"))
        last_run = _field(rule_id, ctx, "last_run")
        if last_run is None or due(date.fromisoformat(last_run), now):
            return Trigger(rule_id, event)
        return Allow(rule_id)
    return evaluate


def _month_changed(last: date, now: date) -> bool:
    return (now.year, now.month) != (last.year, last.month)


def _week_changed(last: date, now: date) -> bool:
    return last.isocalendar()[:2] != now.isocalendar()[:2]


def _day_changed(last: date, now: date) -> bool:
    return last != now


def _br13(ctx: Mapping[str, Any]) -> RuleOutcome:
    if _field("BR13", ctx, "requested"):
        return Trigger("BR13", "generate-adhoc-report")
    return Allow("BR13")


def _br14(ctx: Mapping[str, Any]) -> RuleOutcome:
    lines = [(Money(p), q) for p, q in _field("BR14", ctx, "lines")]
    breakdown = compute_order_price(
        lines,
        TaxRate.basis_points(_field("BR14", ctx, "tax_bp")),
        Money(_field("BR14", ctx, "delivery")),
    )
    return Value("BR14", breakdown)


def _single_valued(rule_id: str, key: str, what: str):
    def evaluate(ctx: Mapping[str, Any]) -> RuleOutcome:
        values = _field(rule_id, ctx, key)
        if len(set(values)) <= 1:
            return Allow(rule_id)
        return Deny(rule_id, f"a single order must use one {what}")
    return evaluate


def _br17(ctx: Mapping[str, Any]) -> RuleOutcome:
    contract = _field("BR17", ctx, "contract")
    if contract is None:
        return Deny("BR17", "no supplier contract on file")
    return Value("BR17", Money(contract["flat_fee"]))


def _br18(ctx: Mapping[str, Any]) -> RuleOutcome:
    role = _field("BR18", ctx, "actor_role")
    if role in MANAGEMENT_ROLES:
        return Allow("BR18")
    return Deny("BR18", "only the director or administrator manages accounts")


def _br19(ctx: Mapping[str, Any]) -> RuleOutcome:
    role = _field("BR19", ctx, "actor_role")
    if role == "director":
        return Allow("BR19")
    if role == "administrator":
        if _field("BR19", ctx, "director_authorization"):
            return Allow("BR19")
        return Deny("BR19", "administrator account changes need director authorization")
    return Deny("BR19", "only the director or administrator changes accounts")


def _br20(ctx: Mapping[str, Any]) -> RuleOutcome:
    job = _field("BR20", ctx, "job")
    rater = _field("BR20", ctx, "rater_id")
    if job.get("customer_id") != rater:
        return Deny("BR20", "customers rate only jobs they requested")
    if job.get("status") != "completed":
        return Deny("BR20", "customers rate only completed jobs")
    return Allow("BR20")


_RULES: dict[str, BusinessRule] = {}


def _register(rule_id: str, kind: RuleKind, dynamism: Dynamism, source: str,
              evaluate: Callable[[Mapping[str, Any]], RuleOutcome]) -> None:
    if rule_id in _RULES:
        raise ValueError(f"duplicate rule id {rule_id}")
    _RULES[rule_id] = BusinessRule(rule_id, kind, dynamism, source, evaluate)


_register("BR1", RuleKind.FACT, Dynamism.STATIC, "Company security policy", _br1)
_register("BR2", RuleKind.FACT, Dynamism.STATIC, "Company security policy", _br2)
_register("BR3", RuleKind.FACT, Dynamism.DYNAMIC, "Company operational procedures", _br3)
_register("BR4", RuleKind.CONSTRAINT, Dynamism.STATIC, "Company security policy",
          lambda ctx: _on_duty("BR4", ctx))
_register("BR5", RuleKind.COMPUTATION, Dynamism.DYNAMIC, "Company pricing strategy, tax code", _br5)
_register("BR6", RuleKind.CONSTRAINT, Dynamism.STATIC, "Company security policy",
          lambda ctx: _on_duty("BR6", ctx))
_register("BR7", RuleKind.CONSTRAINT, Dynamism.STATIC, "Company operational procedures", _br7)
_register("BR8", RuleKind.CONSTRAINT, Dynamism.STATIC, "Company security policy", _br8)
_register("BR9", RuleKind.FACT, Dynamism.STATIC, "Company security policy", _br9)
_register("BR10", RuleKind.FACT, Dynamism.STATIC, "Company financial policy",
          _cadence("BR10", "generate-cash-flow-report", _month_changed))
_register("BR11", RuleKind.FACT, Dynamism.STATIC, "Company Human Resource policy",
          _cadence("BR11", "generate-productivity-report", _week_changed))
_register("BR12", RuleKind.FACT, Dynamism.STATIC, "Company operational procedures",
          _cadence("BR12", "generate-inventory-summary", _day_changed))
_register("BR13", RuleKind.FACT, Dynamism.STATIC, "Company operational procedures", _br13)
_register("BR14", RuleKind.COMPUTATION, Dynamism.DYNAMIC,
          "Supplier pricing strategy; state tax code", _br14)
_register("BR15", RuleKind.CONSTRAINT, Dynamism.STATIC, "Supplier's policy",
          _single_valued("BR15", "locations", "delivery location"))
_register("BR16", RuleKind.CONSTRAINT, Dynamism.STATIC, "Supplier's policy",
          _single_valued("BR16", "payment_methods", "payment method"))
_register("BR17", RuleKind.COMPUTATION, Dynamism.DYNAMIC, "Supply Contract terms", _br17)
_register("BR18", RuleKind.CONSTRAINT, Dynamism.STATIC, "Company security policy", _br18)
_register("BR19", RuleKind.CONSTRAINT, Dynamism.STATIC, "Company security policy", _br19)
_register("BR20", RuleKind.CONSTRAINT, Dynamism.STATIC, "", _br20)

RULES: Mapping[str, BusinessRule] = dict(_RULES)
ALL_RULE_IDS = tuple(f"BR{i}" for i in range(1, 21))


def check_rule(rule_id: str, context: Mapping[str, Any]) -> RuleOutcome:
    """Evaluate one business rule against a context mapping."""
    rule = RULES.get(rule_id)
    if rule is None:
        raise ValidationError(f"unknown rule id {rule_id!r}")
    return rule.evaluate(context)
