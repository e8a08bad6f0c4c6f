"""Product and service ordering.

Two flows share the same shape: validate, quote, then commit everything as
one transaction (store the order, adjust stock, take the slot or labor
reservation, queue the notification emails) with rollback on any step
failure. Drafts park half-finished orders per account for later recovery,
and past orders inside the six-month window can seed a new one.
"""

from __future__ import annotations

import html
import math
from datetime import date as date_t, datetime, timedelta
from fractions import Fraction
from typing import Optional

from .catalog import CatalogService, SupplierInventoryClient
from .clock import Clock
from .config import AppConfig
from .domain.money import (Money, MarginRate, TaxRate, PriceBreakdown,
                           SupplierContractTerms, compute_delivery_charge,
                           compute_order_price, compute_service_price, round_half_up)
from .errors import (CapacityError, DeniedError, ItemsUnavailableError, MaxUnitsError,
                     NoDeliveryTimesError, NotFoundError, PaymentRejectedError,
                     TooLateError, ValidationError)
from .outbox import Failpoints, Outbox
from .scheduling import PremisesSpec, SchedulingService
from .store import AuditLog, Store, Transaction

REORDER_WINDOW_DAYS = 183  # strictly inside: age <= 182 days qualifies

PRODUCT_TRANSITIONS = {"accepted": {"sent", "cancelled"}, "sent": {"fulfilled"}}
SERVICE_TRANSITIONS = {"pending": {"scheduled", "completed", "cancelled"},
                       "scheduled": {"completed", "cancelled"}}


class SimulatedPaymentGateway:
    """Settlement stand-in: records the method, declines on demand."""

    def __init__(self, declined_prefixes: tuple[str, ...] = ("declined",)):
        self._declined = declined_prefixes

    def authorize(self, method: str, amount_pence: int) -> tuple[bool, str]:
        if any(method.startswith(p) for p in self._declined):
            return False, "payment method was declined by the provider"
        return True, ""


class OrderingService:
    def __init__(self, store: Store, clock: Clock, config: AppConfig,
                 catalog: CatalogService, scheduling: SchedulingService,
                 outbox: Outbox, audit: AuditLog, failpoints: Failpoints,
                 supplier_client: SupplierInventoryClient,
                 gateway: Optional[SimulatedPaymentGateway] = None):
        self._store = store
        self._clock = clock
        self._config = config
        self._catalog = catalog
        self._scheduling = scheduling
        self._outbox = outbox
        self._audit = audit
        self._failpoints = failpoints
        self._supplier = supplier_client
        self._gateway = gateway or SimulatedPaymentGateway()

    # -- product orders (director -> suppliers) --------------------------------

    def quote_product_order(self, *, lines: list[dict], date: str,
                            delivery: dict) -> PriceBreakdown:
        """Price a cart exactly as the commit path will store and email it."""
        priced = self._price_product_lines(lines, date)
        charge = Money(0)
        if delivery.get("mode") == "delivery":
            charge = self._delivery_charge_for(priced)
        tax = TaxRate.basis_points(self._config.tax_rate_bp)
        return compute_order_price(
            [(Money(l["unit_price"]), l["qty"]) for l in priced], tax, charge)

    def place_product_order(self, actor: dict, *, lines: list[dict], date: str,
                            delivery: dict, payment_method: str) -> dict:
        """Confirm a product order as one transaction.

        Stores the order (initial status accepted), decrements menu stock,
        books the delivery slot, and queues the director and supplier emails;
        any failure rolls the whole thing back. The supplier's own system is
        notified after commit.
        """
        if actor["role"] != "director":
            raise DeniedError("only the director orders cleaning products",
                              rule_id="BR18")
        if not lines:
            raise ValidationError("an order needs at least one line")
        self._check_cutoff(lines, date)
        priced = self._price_product_lines(lines, date)
        self._validate_delivery(delivery, date)
        breakdown = self.quote_product_order(lines=lines, date=date, delivery=delivery)
        self._authorize_payment(payment_method, breakdown, pickup_offered=True)
        suppliers = sorted({l["supplier_id"] for l in priced if l["supplier_id"]})
        now = self._clock.now()

        def commit(txn: Transaction) -> dict:
            self._failpoints.hit("product_order.store")
            order_no = txn.next_seq("order")
            order = {
                "id": order_no, "kind": "product", "director_id": actor["id"],
                "date": date, "lines": priced, "delivery": delivery,
                "payment_method": payment_method,
                "breakdown": breakdown.to_record(), "status": "accepted",
                "suppliers": suppliers, "supplier_notified": False,
                "created_at": now.isoformat(),
            }
            txn.put(f"order:product:{order_no}", order)
            self._failpoints.hit("product_order.inventory")
            for line in priced:
                self._catalog.adjust_stock(txn, date=date, audience="products",
                                           item_id=line["item_id"], delta=-line["qty"])
            self._failpoints.hit("product_order.menu")
            txn.put(f"inventory_expectation:{order_no}",
                    {"order_id": order_no, "date": date,
                     "items": [{"item_id": l["item_id"], "qty": l["qty"]} for l in priced]})
            self._failpoints.hit("product_order.times")
            if delivery["mode"] == "delivery":
                self._scheduling.confirm_slot(
                    txn, date=date, time=delivery["slot"],
                    order_ref=f"order:product:{order_no}",
                    prior_holder=delivery.get("draft_holder"))
            self._failpoints.hit("product_order.email_director")
            self._outbox.queue(txn, recipient=actor["email"] or actor["username"],
                               template="OrderConfirm",
                               payload={"order_id": order_no,
                                        "total": breakdown.total.pence,
                                        "delivery": delivery})
            self._failpoints.hit("product_order.email_supplier")
            for supplier_id in suppliers:
                supplier_lines = [l for l in priced if l["supplier_id"] == supplier_id]
                self._outbox.queue(txn, recipient=supplier_id, template="SupplierOrder",
                                   payload={"order_id": order_no,
                                            "items": supplier_lines,
                                            "delivery": delivery,
                                            "total": sum(l["unit_price"] * l["qty"]
                                                         for l in supplier_lines)})
            order["supplier_notified"] = True
            txn.put(f"order:product:{order_no}", order)
            self._audit.append(txn, actor=actor["username"], action="order.place",
                               entity=f"order:product:{order_no}",
                               timestamp=now.isoformat(), after=order)
            return order

        order = self._store.run(commit)
        for supplier_id in suppliers:
            self._supplier.transmit_order(
                supplier_id,
                [(l["item_id"], l["qty"]) for l in priced
                 if l["supplier_id"] == supplier_id])
        self._discard_draft(actor["id"])
        return order

    def _price_product_lines(self, lines: list[dict], date: str) -> list[dict]:
        today = self._clock.today()
        priced = []
        for line in lines:
            qty = line.get("qty", 0)
            if not isinstance(qty, int) or qty < 1:
                raise ValidationError(f"quantity must be a positive integer, got {qty!r}")
            entry = self._catalog.entry_for(date, "products", line["item_id"])
            if entry is None:
                raise ItemsUnavailableError(
                    f"item {line['item_id']!r} is not on the {date} menu",
                    details={"items": [line["item_id"]]})
            if qty > entry["available_units"]:
                raise MaxUnitsError(
                    f"only {entry['available_units']} units of "
                    f"{entry['name']} can be supplied",
                    details={"item_id": line["item_id"],
                             "max_units": entry["available_units"]})
            price = self._catalog.effective_price(line["item_id"], "products", today,
                                                  menu_price=entry["unit_price"])
            priced.append({"item_id": line["item_id"], "name": entry["name"],
                           "qty": qty, "unit_price": price.pence,
                           "supplier_id": entry["supplier_id"]})
        return priced

    def _check_cutoff(self, lines: list[dict], date: str) -> None:
        order_date = date_t.fromisoformat(date)
        today = self._clock.today()
        if order_date < today:
            raise ValidationError("orders cannot target a past date")
        if order_date != today:
            return
        now = self._clock.now().time()
        for line in lines:
            entry = self._catalog.entry_for(date, "products", line["item_id"])
            supplier_id = entry["supplier_id"] if entry else ""
            hh, mm = map(int, self._config.cutoff_for(supplier_id).split(":"))
            if (now.hour, now.minute) >= (hh, mm):
                raise TooLateError(
                    "too late to place an order for today",
                    details={"cutoff": self._config.cutoff_for(supplier_id),
                             "options": ["change-date", "cancel"]})

    def _validate_delivery(self, delivery: dict, date: str) -> None:
        mode = delivery.get("mode")
        if mode == "pickup":
            return
        if mode != "delivery":
            raise ValidationError("delivery must be 'delivery' or 'pickup'")
        if not delivery.get("location"):
            raise ValidationError("a delivery needs one delivery location")
        delivery["location"] = html.escape(delivery["location"])
        free = self._scheduling.available_delivery_times(date)
        slot = delivery.get("slot")
        if not free and slot is None:
            raise NoDeliveryTimesError(
                "no available delivery times for this date",
                details={"options": ["pickup", "cancel"]})
        if slot is None:
            raise ValidationError("choose a delivery time",
                                  details={"available": free})
        state = self._scheduling.slot_state(date, slot)
        if state is None:
            raise ValidationError(f"no delivery slot {slot} on {date}")

    def _delivery_charge_for(self, priced: list[dict]) -> Money:
        charge = Money(0)
        for supplier_id in sorted({l["supplier_id"] for l in priced if l["supplier_id"]}):
            contract = self._store.get(f"contract:{supplier_id}")
            terms = None
            if contract is not None:
                terms = SupplierContractTerms(supplier_id, Money(contract["flat_fee"]))
            charge = charge + compute_delivery_charge(terms)
        return charge

    def _authorize_payment(self, method: str, breakdown: PriceBreakdown,
                           *, pickup_offered: bool) -> None:
        if not method:
            raise ValidationError("select one payment method")
        ok, reason = self._gateway.authorize(method, breakdown.total.pence)
        if not ok:
            fallback = ["cash-on-pickup", "cancel"] if pickup_offered else ["cancel"]
            raise PaymentRejectedError(reason, details={"fallback": fallback})

    # -- service orders (customer -> company) -------------------------------------

    def quote_service_order(self, *, services: list[str], date: str,
                            premises: dict) -> dict:
        """Labor/product quote for a service request; pure computation."""
        spec = PremisesSpec.from_dict(premises)
        lines = []
        for item_id in services:
            entry = self._catalog.entry_for(date, "services", item_id)
            if entry is None:
                raise ItemsUnavailableError(
                    f"service {item_id!r} is not offered on {date}",
                    details={"items": [item_id]})
            base = self._scheduling.estimate_minutes(spec)
            minutes = math.ceil(base * entry.get("hours_factor_pct", 100) / 100)
            lines.append({"item_id": item_id, "name": entry["name"],
                          "minutes": minutes, "unit_price": entry["unit_price"]})
        total_minutes = sum(l["minutes"] for l in lines)
        breakdown = self._service_breakdown(lines)
        return {"lines": lines, "total_minutes": total_minutes,
                "breakdown": breakdown.to_record()}

    def _service_breakdown(self, lines: list[dict]) -> PriceBreakdown:
        rate = self._config.wage_rates.get("cleaning_staff", 900)
        minutes = sum(l["minutes"] for l in lines)
        labor = Money(round_half_up(Fraction(minutes * rate, 60)))
        products = Money(sum(l["unit_price"] for l in lines))
        return compute_service_price(
            labor, products,
            MarginRate.basis_points(self._config.margin_rate_bp),
            TaxRate.basis_points(self._config.tax_rate_bp))

    def place_service_order(self, actor: dict, *, services: list[str], date: str,
                            time: str, location: str, premises: dict,
                            payment_method: str, contracted: bool = False) -> dict:
        """Confirm a one-off service order, or propose a scale-down.

        When the date's free labor cannot take the whole request, the largest
        prefix of the requested services that fits is offered instead (or the
        nearest alternative dates when nothing fits).
        """
        if actor["role"] != "customer":
            raise DeniedError("service orders are placed by customers")
        if not services:
            raise ValidationError("select at least one service")
        if date_t.fromisoformat(date) < self._clock.today():
            raise ValidationError("orders cannot target a past date")
        if not location:
            raise ValidationError("provide the service location")
        location = html.escape(location)
        quote = self.quote_service_order(services=services, date=date, premises=premises)
        check = self._scheduling.capacity_check(date, quote["total_minutes"])
        if not check["feasible"] and not contracted:
            proposal = self._scale_down(quote["lines"], check["free_minutes"])
            if proposal:
                return {"scale_down": {
                    "services": [l["item_id"] for l in proposal],
                    "total_minutes": sum(l["minutes"] for l in proposal),
                    "reason": f"short {check['deficit_minutes']} labor minutes "
                              f"on {date}",
                }}
            raise CapacityError(
                "not enough capacity to fulfil the request",
                details={"deficit_minutes": check["deficit_minutes"],
                         "alternatives": self._scheduling.alternative_dates(
                             date, quote["total_minutes"])})
        breakdown = PriceBreakdown.from_record(quote["breakdown"])
        self._authorize_payment(payment_method, breakdown, pickup_offered=False)
        now = self._clock.now()

        def commit(txn: Transaction) -> dict:
            self._failpoints.hit("service_order.store")
            order_no = txn.next_seq("order")
            order = {
                "id": order_no, "kind": "service", "customer_id": actor["id"],
                "services": quote["lines"], "date": date, "time": time,
                "location": location, "premises": dict(premises),
                "payment_method": payment_method,
                "breakdown": quote["breakdown"], "status": "pending",
                "contracted": contracted, "created_at": now.isoformat(),
            }
            txn.put(f"order:service:{order_no}", order)
            self._failpoints.hit("service_order.schedule")
            assignment = self._scheduling.plan_assignment(
                txn, job_id=order_no, date=date,
                minutes=quote["total_minutes"], contracted=contracted)
            self._scheduling.confirm_assignment(txn, assignment["id"])
            order["assignment_id"] = assignment["id"]
            self._failpoints.hit("service_order.inventory")
            self._reserve_materials(txn, quote["lines"], order_no)
            self._failpoints.hit("service_order.menu")
            used = txn.get(f"capacity_used:{date}", {"date": date, "minutes": 0})
            used["minutes"] += quote["total_minutes"]
            txn.put(f"capacity_used:{date}", used)
            self._failpoints.hit("service_order.email")
            self._outbox.queue(txn, recipient=actor["email"] or actor["username"],
                               template="Receipt",
                               payload={"receipt_no": order_no,
                                        "total": breakdown.total.pence,
                                        "date": date, "time": time})
            txn.put(f"order:service:{order_no}", order)
            self._audit.append(txn, actor=actor["username"], action="order.place",
                               entity=f"order:service:{order_no}",
                               timestamp=now.isoformat(), after=order)
            return order

        order = self._store.run(commit)
        self._discard_draft(actor["id"])
        return order

    def _scale_down(self, lines: list[dict], free_minutes: int) -> list[dict]:
        """Largest prefix of the requested services that fits, request order kept."""
        prefix: list[dict] = []
        used = 0
        for line in lines:
            if used + line["minutes"] > free_minutes:
                break
            used += line["minutes"]
            prefix.append(line)
        return prefix

    def _reserve_materials(self, txn: Transaction, lines: list[dict], order_no: int) -> None:
        requirements: dict[str, int] = {}
        for line in lines:
            item = txn.get(f"item:services:{line['item_id']}") or {}
            for product_id, qty in (item.get("products_per_job") or {}).items():
                requirements[product_id] = requirements.get(product_id, 0) + qty
        for product_id, qty in sorted(requirements.items()):
            stock = txn.get(f"stock:{product_id}")
            if stock is None:
                continue
            if stock["standing"] < qty:
                raise CapacityError(
                    f"not enough {product_id} in stock for this job",
                    details={"item_id": product_id, "standing": stock["standing"]})
            stock["standing"] -= qty
            txn.put(f"stock:{product_id}", stock)
        if requirements:
            txn.put(f"reservation:{order_no}",
                    {"order_id": order_no, "items": requirements})

    # -- amendment / cancellation ---------------------------------------------------

    def amend_or_cancel(self, actor: dict, order_ref: str, action: dict) -> dict:
        """Cancel or amend an order that is still in its editable status."""
        kind, order = self._load_order(order_ref)
        self._check_owner(actor, kind, order)
        editable = "accepted" if kind == "product" else "pending"
        if order["status"] != editable:
            raise DeniedError(
                f"order can no longer be changed (status {order['status']})",
                details={"status": order["status"]})
        if action.get("type") == "cancel":
            return self._cancel(kind, order, actor)
        if action.get("type") == "amend":
            return self._amend(kind, order, actor, action)
        raise ValidationError("action must be 'cancel' or 'amend'")

    def _cancel(self, kind: str, order: dict, actor: dict) -> dict:
        now = self._clock.now()

        def commit(txn: Transaction) -> dict:
            live = txn.get(f"order:{kind}:{order['id']}")
            live["status"] = "cancelled"
            if kind == "product":
                for line in live["lines"]:
                    self._catalog.adjust_stock(txn, date=live["date"],
                                               audience="products",
                                               item_id=line["item_id"],
                                               delta=line["qty"])
                if live["delivery"]["mode"] == "delivery":
                    self._scheduling.release_slot(txn, date=live["date"],
                                                  time=live["delivery"]["slot"])
            else:
                if live.get("assignment_id"):
                    self._scheduling.release_assignment(txn, live["assignment_id"])
                self._release_materials(txn, live["id"])
            txn.put(f"order:{kind}:{order['id']}", live)
            self._audit.append(txn, actor=actor["username"], action="order.cancel",
                               entity=f"order:{kind}:{order['id']}",
                               timestamp=now.isoformat())
            return live
        return self._store.run(commit)

    def _release_materials(self, txn: Transaction, order_no: int) -> None:
        reservation = txn.get(f"reservation:{order_no}")
        if reservation is None:
            return
        for product_id, qty in reservation["items"].items():
            stock = txn.get(f"stock:{product_id}")
            if stock is not None:
                stock["standing"] += qty
                txn.put(f"stock:{product_id}", stock)
        txn.delete(f"reservation:{order_no}")

    def _amend(self, kind: str, order: dict, actor: dict, action: dict) -> dict:
        now = self._clock.now()
        if kind == "product":
            new_lines = action.get("lines") or order["lines"]
            new_delivery = action.get("delivery") or order["delivery"]
            priced = self._price_with_restored_stock(order, new_lines)
            charge = Money(0)
            if new_delivery.get("mode") == "delivery":
                charge = self._delivery_charge_for(priced)
            breakdown = compute_order_price(
                [(Money(l["unit_price"]), l["qty"]) for l in priced],
                TaxRate.basis_points(self._config.tax_rate_bp), charge)

            def commit(txn: Transaction) -> dict:
                live = txn.get(f"order:product:{order['id']}")
                for line in live["lines"]:
                    self._catalog.adjust_stock(txn, date=live["date"],
                                               audience="products",
                                               item_id=line["item_id"], delta=line["qty"])
                for line in priced:
                    self._catalog.adjust_stock(txn, date=live["date"],
                                               audience="products",
                                               item_id=line["item_id"], delta=-line["qty"])
                if live["delivery"]["mode"] == "delivery" and new_delivery != live["delivery"]:
                    self._scheduling.release_slot(txn, date=live["date"],
                                                  time=live["delivery"]["slot"])
                    if new_delivery["mode"] == "delivery":
                        self._scheduling.confirm_slot(
                            txn, date=live["date"], time=new_delivery["slot"],
                            order_ref=f"order:product:{live['id']}")
                live.update(lines=priced, delivery=new_delivery,
                            breakdown=breakdown.to_record(),
                            amended_at=now.isoformat())
                txn.put(f"order:product:{live['id']}", live)
                self._audit.append(txn, actor=actor["username"], action="order.amend",
                                   entity=f"order:product:{live['id']}",
                                   timestamp=now.isoformat(), after=live)
                return live
            return self._store.run(commit)

        new_services = action.get("services")
        if not new_services:
            raise ValidationError("service amendment needs the new service list")
        quote = self.quote_service_order(services=new_services, date=order["date"],
                                         premises=order["premises"])

        def commit(txn: Transaction) -> dict:
            live = txn.get(f"order:service:{order['id']}")
            if live.get("assignment_id"):
                self._scheduling.release_assignment(txn, live["assignment_id"])
            self._release_materials(txn, live["id"])
            assignment = self._scheduling.plan_assignment(
                txn, job_id=live["id"], date=live["date"],
                minutes=quote["total_minutes"], contracted=live["contracted"])
            self._scheduling.confirm_assignment(txn, assignment["id"])
            self._reserve_materials(txn, quote["lines"], live["id"])
            live.update(services=quote["lines"], breakdown=quote["breakdown"],
                        assignment_id=assignment["id"], amended_at=now.isoformat())
            txn.put(f"order:service:{live['id']}", live)
            self._audit.append(txn, actor=actor["username"], action="order.amend",
                               entity=f"order:service:{live['id']}",
                               timestamp=now.isoformat(), after=live)
            return live
        return self._store.run(commit)

    def _price_with_restored_stock(self, order: dict, new_lines: list[dict]) -> list[dict]:
        """Validate amended quantities as if the order's own stock were back."""
        restored = {l["item_id"]: l["qty"] for l in order["lines"]}
        today = self._clock.today()
        priced = []
        for line in new_lines:
            entry = self._catalog.entry_for(order["date"], "products", line["item_id"])
            if entry is None:
                raise ItemsUnavailableError(
                    f"item {line['item_id']!r} is not on the menu",
                    details={"items": [line["item_id"]]})
            available = entry["available_units"] + restored.get(line["item_id"], 0)
            if line["qty"] > available:
                raise MaxUnitsError(
                    f"only {available} units of {entry['name']} can be supplied",
                    details={"item_id": line["item_id"], "max_units": available})
            price = self._catalog.effective_price(line["item_id"], "products", today,
                                                  menu_price=entry["unit_price"])
            priced.append({"item_id": line["item_id"], "name": entry["name"],
                           "qty": line["qty"], "unit_price": price.pence,
                           "supplier_id": entry["supplier_id"]})
        return priced

    # -- status progression -----------------------------------------------------------

    def set_status(self, actor: dict, order_ref: str, new_status: str) -> dict:
        """Advance an order along its lifecycle (dispatch, completion, ...)."""
        kind, order = self._load_order(order_ref)
        allowed = PRODUCT_TRANSITIONS if kind == "product" else SERVICE_TRANSITIONS
        if new_status not in allowed.get(order["status"], set()):
            raise ValidationError(
                f"cannot move a {order['status']} order to {new_status}")
        if actor["role"] not in ("director", "administrator", "supervisor"):
            raise DeniedError("order progression is a staff operation")

        def commit(txn: Transaction) -> dict:
            live = txn.get(f"order:{kind}:{order['id']}")
            live["status"] = new_status
            txn.put(f"order:{kind}:{order['id']}", live)
            self._audit.append(txn, actor=actor["username"], action="order.status",
                               entity=f"order:{kind}:{order['id']}",
                               timestamp=self._clock.now().isoformat(), after=live)
            return live
        return self._store.run(commit)

    # -- history / reorder / drafts ------------------------------------------------------

    def order_history(self, actor: dict, kind: str) -> list[dict]:
        """Orders the actor owns, inside the six-month window, newest first."""
        cutoff = self._clock.today() - timedelta(days=REORDER_WINDOW_DAYS - 1)
        out = []
        for _, order in self._store.select(f"order:{kind}:"):
            if order.get("_hidden"):
                continue
            if date_t.fromisoformat(order["created_at"][:10]) < cutoff:
                continue
            owner = order.get("director_id") if kind == "product" else order.get("customer_id")
            if actor["role"] in ("director", "administrator") or owner == actor["id"]:
                out.append(order)
        return sorted(out, key=lambda o: -o["id"])

    def reorder_previous(self, actor: dict, order_ref: str,
                         new_date: str) -> dict:
        """Draft a new order from a past one, if every item is still available."""
        kind, order = self._load_order(order_ref)
        self._check_owner(actor, kind, order)
        age = (self._clock.today() - date_t.fromisoformat(order["created_at"][:10])).days
        if order.get("_hidden") or age >= REORDER_WINDOW_DAYS:
            raise NotFoundError("order is outside the six-month history window")
        missing = []
        if kind == "product":
            for line in order["lines"]:
                entry = self._catalog.entry_for(new_date, "products", line["item_id"])
                if entry is None or entry["available_units"] < line["qty"]:
                    missing.append(line["item_id"])
        else:
            for line in order["services"]:
                if self._catalog.entry_for(new_date, "services", line["item_id"]) is None:
                    missing.append(line["item_id"])
        if missing:
            raise ItemsUnavailableError(
                "some items from the past order are not available",
                details={"items": missing, "date": new_date})
        payload = {"kind": kind, "date": new_date, "source_order": order["id"]}
        if kind == "product":
            payload["lines"] = [{"item_id": l["item_id"], "qty": l["qty"]}
                                for l in order["lines"]]
        else:
            payload["services"] = [l["item_id"] for l in order["services"]]
            payload["premises"] = order["premises"]
            payload["location"] = order["location"]
        return self.save_draft(actor, payload)

    def save_draft(self, actor: dict, payload: dict) -> dict:
        """Park an incomplete order for this account; holds its slot if free.

        Draft text is stored inert (escaped), like anything else a user may
        later see rendered back.
        """
        payload = _escape_strings(payload)
        now = self._clock.now()
        slot = payload.get("slot")
        if slot and payload.get("date"):
            state = self._scheduling.slot_state(payload["date"], slot)
            if state is None or state["state"] == "free":
                try:
                    self._scheduling.hold_slot(payload["date"], slot,
                                               holder=f"draft:{actor['id']}")
                except Exception:
                    pass  # a lost hold only means re-picking later
        draft = {"account_id": actor["id"], "payload": payload,
                 "saved_at": now.isoformat()}

        def put(txn: Transaction) -> dict:
            txn.put(f"draft:{actor['id']}", draft)
            return draft
        return self._store.run(put)

    def recover_incomplete(self, actor: dict) -> Optional[dict]:
        """Restore the account's parked order, dropping a slot someone took."""
        draft = self._store.get(f"draft:{actor['id']}")
        if draft is None:
            return None
        saved_at = datetime.fromisoformat(draft["saved_at"])
        if self._clock.now() - saved_at > timedelta(minutes=self._config.draft_idle_minutes):
            self._discard_draft(actor["id"])
            return None
        payload = draft["payload"]
        slot = payload.get("slot")
        if slot and payload.get("date"):
            state = self._scheduling.slot_state(payload["date"], slot)
            holder_ok = state is not None and (
                state["state"] == "free"
                or state["holder"] == f"draft:{actor['id']}")
            if not holder_ok:
                payload = dict(payload)
                payload.pop("slot")
                payload["slot_lost"] = True
        return {"payload": payload, "saved_at": draft["saved_at"]}

    def _discard_draft(self, account_id: int) -> None:
        def drop(txn: Transaction):
            txn.delete(f"draft:{account_id}")
        self._store.run(drop)

    # -- automatic replenishment ------------------------------------------------------

    def process_reorder_events(self) -> list[dict]:
        """Turn pending stock-threshold events into supplier replenishment
        requests (idempotent: each event is consumed exactly once)."""
        processed = []
        for key, event in self._store.select("reorder_event:"):
            if event["state"] != "pending":
                continue

            def consume(txn: Transaction, key=key) -> Optional[dict]:
                live = txn.get(key)
                if live is None or live["state"] != "pending":
                    return None
                live["state"] = "processed"
                txn.put(key, live)
                self._outbox.queue(
                    txn, recipient=live.get("supplier_id") or "purchasing",
                    template="SupplierOrder",
                    payload={"reorder": True, "item_id": live["item_id"],
                             "quantity": live["refill_qty"]})
                request_id = txn.next_seq("reorder_request")
                request = {"id": request_id, "item_id": live["item_id"],
                           "quantity": live["refill_qty"], "event": live["id"]}
                txn.put(f"reorder_request:{request_id}", request)
                return request

            result = self._store.run(consume)
            if result:
                processed.append(result)
        return processed

    # -- helpers -----------------------------------------------------------------------

    def _load_order(self, order_ref: str) -> tuple[str, dict]:
        if ":" in str(order_ref):
            kind, _, raw = str(order_ref).partition(":")
            order = self._store.get(f"order:{kind}:{int(raw)}")
            if order is None:
                raise NotFoundError(f"no order {order_ref}")
            return kind, order
        for kind in ("product", "service"):
            order = self._store.get(f"order:{kind}:{int(order_ref)}")
            if order is not None:
                return kind, order
        raise NotFoundError(f"no order {order_ref}")

    def _check_owner(self, actor: dict, kind: str, order: dict) -> None:
        owner = order.get("director_id") if kind == "product" else order.get("customer_id")
        if owner != actor["id"] and actor["role"] not in ("director", "administrator"):
            raise DeniedError("orders belong to the account that placed them")

    def get_order(self, actor: dict, order_ref: str) -> dict:
        kind, order = self._load_order(order_ref)
        self._check_owner(actor, kind, order)
        return order


def _escape_strings(value):
    """Recursively escape markup in every string; structural values
    (slugs, dates, numbers) pass through unchanged."""
    if isinstance(value, str):
        return html.escape(value)
    if isinstance(value, dict):
        return {k: _escape_strings(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_escape_strings(v) for v in value]
    return value
