"""Shared error taxonomy.

Every error carries a stable machine code plus a human message; the HTTP
layer serializes them as ``{code, rule_id?, message, details}``.
"""

from __future__ import annotations

from typing import Any, Mapping, Optional


class OmsError(Exception):
    """Base class for all domain errors."""

    code = "error"

    def __init__(self, message: str, *, details: Optional[Mapping[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details: dict[str, Any] = dict(details or {})

    def to_body(self) -> dict[str, Any]:
        body: dict[str, Any] = {"code": self.code, "message": self.message, "details": self.details}
        rule_id = getattr(self, "rule_id", None)
        if rule_id:
            body["rule_id"] = rule_id
        return body


class ValidationError(OmsError):
    code = "validation"


class ConfigurationError(OmsError):
    code = "configuration"


class NotFoundError(OmsError):
    code = "not_found"


class AuthenticationError(OmsError):
    """Login required, failed, or the session is missing/expired."""

    code = "unauthenticated"


class DeniedError(OmsError):
    """An operation refused by policy; carries the business rule that denied it."""

    code = "denied"

    def __init__(self, message: str, *, rule_id: Optional[str] = None,
                 details: Optional[Mapping[str, Any]] = None):
        super().__init__(message, details=details)
        self.rule_id = rule_id


class ConflictError(OmsError):
    """Concurrent writers touched the same keys; the caller may retry."""

    code = "conflict"


class RuleEvaluationError(ValidationError):
    """A rule context is missing a field the rule reads."""

    code = "rule_context"

    def __init__(self, rule_id: str, field: str):
        super().__init__(
            f"rule {rule_id} requires context field {field!r}",
            details={"rule_id": rule_id, "field": field},
        )
        self.rule_id = rule_id
        self.field = field


class OrderFlowError(OmsError):
    """A recoverable problem inside an ordering flow (user can adjust and retry)."""

    code = "order_flow"


class TooLateError(OrderFlowError):
    code = "too_late"


class MaxUnitsError(OrderFlowError):
    code = "max_units"


class NoDeliveryTimesError(OrderFlowError):
    code = "no_delivery_times"


class PaymentRejectedError(OrderFlowError):
    code = "payment_rejected"


class ItemsUnavailableError(OrderFlowError):
    code = "items_unavailable"


class CapacityError(OrderFlowError):
    code = "no_capacity"


class InjectedFault(RuntimeError):
    """Raised by an armed failpoint; only tests arm failpoints."""

    def __init__(self, name: str):
        super().__init__(f"injected fault at step {name!r}")
        self.step = name
