"""Field sheets: attendance (driving wages) and inventory (driving usage
costs, standing stock, and replenishment events).

Both sheets are gated on the shift's designated on-duty supervisor. Saving a
sheet, computing its derived figures, and updating stock happen in one
transaction; the stock-threshold event fires exactly once per dip below the
reorder level until the item is replenished above it again.
"""

from __future__ import annotations

from datetime import date as date_t
from fractions import Fraction
from typing import Optional

from .clock import Clock
from .config import AppConfig
from .domain.money import round_half_up
from .domain.rules import check_rule, Allow
from .errors import DeniedError, NotFoundError, ValidationError
from .outbox import Failpoints
from .store import AuditLog, Store, Transaction

SHEET_WINDOW_DAYS = 183  # recallable while age <= 182 days


class FieldOpsService:
    def __init__(self, store: Store, clock: Clock, config: AppConfig,
                 audit: AuditLog, failpoints: Failpoints):
        self._store = store
        self._clock = clock
        self._config = config
        self._audit = audit
        self._failpoints = failpoints

    # -- stock ledger -------------------------------------------------------

    def set_stock(self, *, item_id: str, standing: int, capacity: int,
                  unit_cost: int, supplier_id: str = "") -> dict:
        """Seed or replenish an item's standing stock."""
        if capacity <= 0 or standing < 0 or unit_cost < 0:
            raise ValidationError("stock figures must be non-negative (capacity positive)")

        def put(txn: Transaction) -> dict:
            record = txn.get(f"stock:{item_id}") or {}
            armed = standing * 2 > capacity  # re-arm once above the reorder level
            record.update(item_id=item_id, standing=standing, capacity=capacity,
                          unit_cost=unit_cost, supplier_id=supplier_id,
                          reorder_armed=armed)
            txn.put(f"stock:{item_id}", record)
            return record
        return self._store.run(put)

    def stock(self, item_id: str) -> Optional[dict]:
        return self._store.get(f"stock:{item_id}")

    # -- attendance ----------------------------------------------------------

    def populate_attendance(self, actor: dict, shift_id: int,
                            rows: list[dict]) -> dict:
        """Save the shift's attendance sheet and compute wages in one go."""
        shift = self._require_shift(shift_id)
        self._require_on_duty("BR4", actor, shift)
        self._require_shift_over(shift)
        if self._store.get(f"sheet:attendance:{shift_id}") is not None:
            raise ValidationError("attendance sheet already populated for this shift")
        parsed = []
        for row in rows:
            minutes = _minutes_between(row["reporting_time"], row["finishing_time"])
            if minutes < 0:
                raise ValidationError(
                    f"finishing time precedes reporting time for employee "
                    f"{row['employee_id']}")
            if row["employee_id"] not in shift["staff"] \
                    and row["employee_id"] != shift["supervisor_id"]:
                raise ValidationError(
                    f"employee {row['employee_id']} is not on shift {shift_id}")
            parsed.append({**row, "minutes": minutes})
        now = self._clock.now()

        def commit(txn: Transaction) -> dict:
            self._failpoints.hit("attendance.save_sheet")
            sheet = {"shift_id": shift_id, "kind": "attendance", "date": shift["date"],
                     "rows": parsed, "status": "confirmed",
                     "created_at": now.isoformat()}
            txn.put(f"sheet:attendance:{shift_id}", sheet)
            self._failpoints.hit("attendance.wages")
            wages = []
            for row in parsed:
                rate = self._wage_rate(txn, row["employee_id"])
                wage = round_half_up(Fraction(row["minutes"] * rate, 60))
                record = {"employee_id": row["employee_id"], "shift_id": shift_id,
                          "date": shift["date"], "minutes": row["minutes"],
                          "rate": rate, "wage": wage}
                txn.put(f"wage:{shift_id}:{row['employee_id']}", record)
                wages.append(record)
            self._failpoints.hit("attendance.payroll")
            self._audit.append(txn, actor=actor["username"], action="sheet.attendance",
                               entity=f"sheet:attendance:{shift_id}",
                               timestamp=now.isoformat(), after=sheet)
            return {"sheet": sheet, "wages": wages}

        return self._store.run(commit)

    def _wage_rate(self, txn: Transaction, employee_id: int) -> int:
        account = txn.get(f"account:{employee_id}")
        role = account["role"] if account else "cleaning_staff"
        rates = self._config.wage_rates
        return rates.get(role, rates.get("cleaning_staff", 900))

    # -- inventory -------------------------------------------------------------

    def preview_inventory(self, lines: list[dict]) -> list[dict]:
        """Computed read-back (used, resulting stock) shown before confirmation."""
        out = []
        for line in lines:
            used = self._validated_usage(line)
            stock = self._store.get(f"stock:{line['item_id']}")
            standing = (stock["standing"] - used) if stock else None
            out.append({**line, "used": used, "standing": standing})
        return out

    def populate_inventory(self, actor: dict, shift_id: int, lines: list[dict],
                           *, reopen: bool = False) -> dict:
        """Save the shift's inventory sheet: usage, per-item cost, stock update,
        and at most one replenishment event per threshold crossing."""
        shift = self._require_shift(shift_id)
        self._require_on_duty("BR6", actor, shift)
        existing = self._store.get(f"sheet:inventory:{shift_id}")
        if existing is not None and not reopen:
            raise ValidationError("inventory sheet already populated for this shift "
                                  "(pass reopen to modify)")
        now = self._clock.now()

        def commit(txn: Transaction) -> dict:
            self._failpoints.hit("inventory.save_sheet")
            sheet_lines = []
            cost_lines = []
            events = []
            for line in lines:
                used = self._validated_usage(line)
                stock = txn.get(f"stock:{line['item_id']}")
                if stock is None:
                    raise NotFoundError(f"no stock ledger for item {line['item_id']!r}")
                if used > stock["standing"]:
                    raise ValidationError(
                        f"cannot use {used} of {line['item_id']}; only "
                        f"{stock['standing']} standing")
                stock["standing"] -= used
                fired = self._maybe_fire_reorder(txn, stock, events)
                txn.put(f"stock:{line['item_id']}", stock)
                sheet_lines.append({"item_id": line["item_id"],
                                    "issued": line["issued"],
                                    "returned": line["returned"],
                                    "used": used,
                                    "standing": stock["standing"],
                                    "reorder_fired": fired})
                cost_lines.append({"item_id": line["item_id"], "used": used,
                                   "unit_cost": stock["unit_cost"],
                                   "cost": used * stock["unit_cost"]})
            sheet = {"shift_id": shift_id, "kind": "inventory", "date": shift["date"],
                     "lines": sheet_lines, "status": "confirmed",
                     "created_at": now.isoformat()}
            txn.put(f"sheet:inventory:{shift_id}", sheet)
            self._failpoints.hit("inventory.cost")
            txn.put(f"usage:{shift_id}", {"shift_id": shift_id, "date": shift["date"],
                                          "lines": cost_lines})
            self._failpoints.hit("inventory.stock")
            self._audit.append(txn, actor=actor["username"], action="sheet.inventory",
                               entity=f"sheet:inventory:{shift_id}",
                               timestamp=now.isoformat(), after=sheet)
            return {"sheet": sheet, "usage_cost": cost_lines, "reorder_events": events}

        return self._store.run(commit)

    def _validated_usage(self, line: dict) -> int:
        issued, returned = line.get("issued", 0), line.get("returned", 0)
        if issued < 0 or returned < 0:
            raise ValidationError("issued and returned amounts cannot be negative")
        if returned > issued:
            raise ValidationError(
                f"returned ({returned}) exceeds issued ({issued}) for "
                f"{line.get('item_id')}")
        return issued - returned

    def _maybe_fire_reorder(self, txn: Transaction, stock: dict,
                            events: list[dict]) -> bool:
        outcome = check_rule("BR3", {"stock": stock["standing"],
                                     "capacity": stock["capacity"]})
        if isinstance(outcome, Allow):
            stock["reorder_armed"] = True
            return False
        if not stock.get("reorder_armed", True):
            return False  # already fired for this dip
        stock["reorder_armed"] = False
        event_id = txn.next_seq("reorder_event")
        refill = stock["capacity"] - stock["standing"]
        event = {"id": event_id, "item_id": stock["item_id"],
                 "supplier_id": stock.get("supplier_id", ""),
                 "refill_qty": refill, "state": "pending"}
        txn.put(f"reorder_event:{event_id}", event)
        events.append(event)
        return True

    # -- recall ---------------------------------------------------------------

    def recall_sheet(self, actor: dict, shift_id: int, kind: str) -> dict:
        """Fetch a past sheet (six-month window); only the shift's on-duty
        supervisor (or the director) may read it."""
        if kind not in ("attendance", "inventory"):
            raise ValidationError(f"unknown sheet kind {kind!r}")
        shift = self._require_shift(shift_id)
        if actor["role"] != "director":
            rule = "BR4" if kind == "attendance" else "BR6"
            self._require_on_duty(rule, actor, shift)
        sheet = self._store.get(f"sheet:{kind}:{shift_id}")
        if sheet is None:
            raise NotFoundError(f"no {kind} sheet for shift {shift_id}")
        age = (self._clock.today() - date_t.fromisoformat(sheet["date"])).days
        if sheet.get("_hidden") or age >= SHEET_WINDOW_DAYS:
            raise NotFoundError("sheet is outside the six-month window")
        return sheet

    # -- shared guards -----------------------------------------------------------

    def _require_shift(self, shift_id: int) -> dict:
        shift = self._store.get(f"shift:{shift_id}")
        if shift is None:
            raise NotFoundError(f"no shift {shift_id}")
        return shift

    def _require_on_duty(self, rule_id: str, actor: dict, shift: dict) -> None:
        outcome = check_rule(rule_id, {"actor_id": actor["id"],
                                       "on_duty_supervisor_id": shift["supervisor_id"]})
        if not isinstance(outcome, Allow):
            raise DeniedError(outcome.reason, rule_id=rule_id)

    def _require_shift_over(self, shift: dict) -> None:
        end_minutes = _as_minutes(shift["end"])
        now = self._clock.now()
        shift_date = date_t.fromisoformat(shift["date"])
        if now.date() < shift_date or (
                now.date() == shift_date
                and now.hour * 60 + now.minute < end_minutes):
            raise ValidationError("the shift has not finished yet")

    # -- queries ---------------------------------------------------------------------

    def wages_for_shift(self, shift_id: int) -> list[dict]:
        snap = self._store.snapshot()
        return [snap.get(k) for k in snap.keys(f"wage:{shift_id}:")]


def _as_minutes(hhmm: str) -> int:
    hh, mm = map(int, hhmm.split(":"))
    return hh * 60 + mm


def _minutes_between(start: str, end: str) -> int:
    return _as_minutes(end) - _as_minutes(start)
