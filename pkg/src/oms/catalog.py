"""Dated menus, promotions, and supplier-inventory availability.

Two catalogs share one structure: cleaning *products* (supplier items the
director orders) and *services* (what customers book). Menus are per date;
the current date's view hides items with no stock and refreshes availability
against the supplier's own system through a pluggable client, which is
simulated in tests.
"""

from __future__ import annotations

from datetime import date as date_t
from typing import Any, Optional, Protocol

from .clock import Clock
from .config import AppConfig
from .domain.money import Money
from .errors import DeniedError, NotFoundError, ValidationError
from .outbox import Failpoints
from .store import Store, Transaction

AUDIENCES = ("products", "services")


class SupplierInventoryClient(Protocol):
    """Client side of the supplier-systems interface."""

    def available_units(self, supplier_id: str, item_id: str) -> Optional[int]: ...

    def transmit_order(self, supplier_id: str, items: list[tuple[str, int]]) -> None: ...


class SimulatedSupplierEndpoint:
    """Stand-in supplier system: per-supplier stock levels, plus explicit
    "item no longer available" notifications."""

    def __init__(self):
        self._stock: dict[tuple[str, str], int] = {}
        self.transmissions: list[dict[str, Any]] = []

    def set_stock(self, supplier_id: str, item_id: str, units: int) -> None:
        self._stock[(supplier_id, item_id)] = units

    def mark_unavailable(self, supplier_id: str, item_id: str) -> None:
        self._stock[(supplier_id, item_id)] = 0

    def available_units(self, supplier_id: str, item_id: str) -> Optional[int]:
        return self._stock.get((supplier_id, item_id))

    def transmit_order(self, supplier_id: str, items: list[tuple[str, int]]) -> None:
        self.transmissions.append({"supplier_id": supplier_id, "items": list(items)})
        for item_id, qty in items:
            key = (supplier_id, item_id)
            if key in self._stock:
                self._stock[key] = max(0, self._stock[key] - qty)


class CatalogService:
    def __init__(self, store: Store, clock: Clock, config: AppConfig,
                 supplier_client: SupplierInventoryClient, failpoints: Failpoints):
        self._store = store
        self._clock = clock
        self._config = config
        self._supplier = supplier_client
        self._failpoints = failpoints

    # -- generic catalog -----------------------------------------------------

    def upsert_item(self, *, audience: str, item_id: str, name: str, unit_price: int,
                    supplier_id: str = "", hours_factor_pct: int = 100) -> dict:
        """Register an item in the generic catalog (seed/admin path)."""
        _check_audience(audience)
        _reject_markup(name, "item name")
        if unit_price < 0:
            raise ValidationError("unit price cannot be negative")
        record = {
            "item_id": item_id, "name": name, "unit_price": unit_price,
            "supplier_id": supplier_id, "audience": audience,
            "hours_factor_pct": hours_factor_pct, "on_promotion": False,
        }

        def put(txn: Transaction):
            txn.put(f"item:{audience}:{item_id}", record)
        self._store.run(put)
        return record

    def items(self, audience: str, supplier_id: Optional[str] = None) -> list[dict]:
        _check_audience(audience)
        snap = self._store.snapshot()
        out = [v for v in snap.values(f"item:{audience}:")]
        if supplier_id is not None:
            out = [v for v in out if v["supplier_id"] == supplier_id]
        return out

    # -- menus -----------------------------------------------------------------

    def create_menu(self, actor: dict, *, audience: str, date: str,
                    entries: list[dict]) -> dict:
        _check_audience(audience)
        self._check_menu_editor(actor, audience)
        menu = {"date": date, "audience": audience,
                "entries": [self._validated_entry(e) for e in entries]}

        def put(txn: Transaction):
            if txn.get(f"menu:{audience}:{date}") is not None:
                raise ValidationError(f"a menu already exists for {date}")
            txn.put(f"menu:{audience}:{date}", menu)
        self._store.run(put)
        return menu

    def modify_menu(self, actor: dict, *, date: str, changes: list[dict],
                    audience: str = "products") -> dict:
        """Apply add/update/remove changes to the menu for a future-or-today date."""
        _check_audience(audience)
        self._check_menu_editor(actor, audience)
        if date_t.fromisoformat(date) < self._clock.today():
            raise DeniedError("the menu for a past date cannot be modified",
                              details={"date": date})

        def apply(txn: Transaction) -> dict:
            menu = txn.get(f"menu:{audience}:{date}")
            if menu is None:
                raise NotFoundError(f"no menu exists for {date}",
                                    details={"offer": "create-menu", "date": date})
            entries = {e["item_id"]: e for e in menu["entries"]}
            for change in changes:
                op = change.get("op")
                if op == "remove":
                    entries.pop(change["item_id"], None)
                elif op in ("add", "update"):
                    entry = self._validated_entry(change["entry"])
                    entries[entry["item_id"]] = entry
                else:
                    raise ValidationError(f"unknown menu change op {op!r}")
            menu["entries"] = list(entries.values())
            txn.put(f"menu:{audience}:{date}", menu)
            return menu

        return self._store.run(apply)

    def _validated_entry(self, entry: dict) -> dict:
        for field in ("item_id", "name", "unit_price"):
            if field not in entry:
                raise ValidationError(f"menu entry missing {field!r}")
        _reject_markup(entry["name"], "item name")
        if entry["unit_price"] < 0 or entry.get("available_units", 0) < 0:
            raise ValidationError("menu entry amounts cannot be negative")
        return {
            "item_id": entry["item_id"],
            "name": entry["name"],
            "unit_price": entry["unit_price"],
            "supplier_id": entry.get("supplier_id", ""),
            "available_units": entry.get("available_units", 0),
            "hours_factor_pct": entry.get("hours_factor_pct", 100),
        }

    def menu_for_date(self, date: str, *, viewer_kind: str = "anonymous",
                      audience: str = "products") -> dict:
        """Menu view for a date; no login needed.

        Today's view lists only items with at least one unit available and
        re-checks supplier systems, dropping items the supplier reports gone.
        Future dates show the full planned menu, zero-stock included.
        """
        _check_audience(audience)
        menu = self._store.get(f"menu:{audience}:{date}")
        if menu is None:
            return {"date": date, "audience": audience, "entries": [],
                    "notice": f"no menu exists for {date}"}
        today = self._clock.today()
        is_current = date_t.fromisoformat(date) == today
        entries = []
        for entry in menu["entries"]:
            entry = dict(entry)
            if is_current and audience == "products":
                live = self._supplier.available_units(entry["supplier_id"], entry["item_id"])
                if live is not None and live < entry["available_units"]:
                    entry["available_units"] = live
                    self._write_back_units(audience, date, entry["item_id"], live)
            if is_current and entry["available_units"] < 1:
                continue
            entry["display_price"] = self.effective_price(
                entry["item_id"], audience, today,
                menu_price=entry["unit_price"]).pence
            promo = self._active_promo_prices(entry["item_id"], today)
            if promo:
                entry["promo"] = promo
            entries.append(entry)
        return {"date": date, "audience": audience, "entries": entries}

    def _write_back_units(self, audience: str, date: str, item_id: str, units: int) -> None:
        def apply(txn: Transaction):
            menu = txn.get(f"menu:{audience}:{date}")
            if menu is None:
                return
            for entry in menu["entries"]:
                if entry["item_id"] == item_id:
                    entry["available_units"] = units
            txn.put(f"menu:{audience}:{date}", menu)
        self._store.run(apply)

    def entry_for(self, date: str, audience: str, item_id: str) -> Optional[dict]:
        menu = self._store.get(f"menu:{audience}:{date}")
        if menu is None:
            return None
        for entry in menu["entries"]:
            if entry["item_id"] == item_id:
                return dict(entry)
        return None

    def adjust_stock(self, txn: Transaction, *, date: str, audience: str,
                     item_id: str, delta: int) -> None:
        """Stock adjustment inside a caller transaction (order commit path)."""
        menu = txn.get(f"menu:{audience}:{date}")
        if menu is None:
            raise NotFoundError(f"no menu exists for {date}")
        for entry in menu["entries"]:
            if entry["item_id"] == item_id:
                after = entry["available_units"] + delta
                if after < 0:
                    raise ValidationError(f"stock for {item_id} cannot go negative")
                entry["available_units"] = after
                txn.put(f"menu:{audience}:{date}", menu)
                return
        raise NotFoundError(f"item {item_id} not on the {date} menu")

    # -- promotions -------------------------------------------------------------

    def define_promotion(self, actor: dict, *, name: str, start: str, end: str,
                         item_prices: list[dict], confirm: bool = True) -> dict:
        """Create a promotion after preview confirmation.

        Every item must already be in the supplier's generic catalog; the
        generic entries get flagged, and listings show old and promo prices
        while the window is open.
        """
        if actor["role"] != "supplier":
            raise DeniedError("only suppliers define promotions", rule_id="BR18")
        _reject_markup(name, "promotion name")
        if not item_prices:
            raise ValidationError("a promotion needs at least one item")
        if not confirm:
            raise ValidationError("promotion requires preview confirmation")
        start_d, end_d = date_t.fromisoformat(start), date_t.fromisoformat(end)
        if start_d > end_d:
            raise ValidationError("promotion start date is after its end date")
        if start_d < self._clock.today():
            raise DeniedError("promotion dates in the past cannot be used",
                              details={"start": start})
        supplier_id = actor["username"]
        items = []
        for spec in item_prices:
            item = self._store.get(f"item:products:{spec['item_id']}")
            if item is None or item["supplier_id"] != supplier_id:
                raise ValidationError(
                    f"item {spec['item_id']!r} is not in this supplier's generic menu")
            promo_price = spec["promo_price"]
            if promo_price < 0:
                raise ValidationError("promotion price cannot be negative")
            items.append({"item_id": spec["item_id"], "old_price": item["unit_price"],
                          "promo_price": promo_price})

        def create(txn: Transaction) -> dict:
            promo_id = txn.next_seq("promotion")
            promo = {"id": promo_id, "supplier_id": supplier_id, "name": name,
                     "start": start, "end": end, "items": items}
            txn.put(f"promotion:{promo_id}", promo)
            for entry in items:
                item = txn.get(f"item:products:{entry['item_id']}")
                item["on_promotion"] = True
                txn.put(f"item:products:{entry['item_id']}", item)
            return promo

        return self._store.run(create)

    def edit_promotion(self, actor: dict, promo_id: int, *, item_prices: list[dict],
                       confirm: bool = True) -> dict:
        promo = self._store.get(f"promotion:{promo_id}")
        if promo is None:
            raise NotFoundError("no promotion exists",
                                details={"offer": "create-promotion"})
        if actor["role"] != "supplier" or promo["supplier_id"] != actor["username"]:
            raise DeniedError("promotions are edited by their own supplier")
        if not confirm:
            raise ValidationError("promotion requires preview confirmation")
        by_id = {i["item_id"]: i for i in promo["items"]}
        for spec in item_prices:
            if spec["item_id"] not in by_id:
                raise ValidationError(f"item {spec['item_id']!r} is not in this promotion")
            if spec["promo_price"] < 0:
                raise ValidationError("promotion price cannot be negative")
            by_id[spec["item_id"]]["promo_price"] = spec["promo_price"]

        def update(txn: Transaction) -> dict:
            txn.put(f"promotion:{promo_id}", promo)
            return promo
        return self._store.run(update)

    def promotions(self, supplier_id: Optional[str] = None) -> list[dict]:
        snap = self._store.snapshot()
        out = list(snap.values("promotion:"))
        if supplier_id is not None:
            out = [p for p in out if p["supplier_id"] == supplier_id]
        return out

    def _active_promo_prices(self, item_id: str, today: date_t) -> Optional[dict]:
        for _, promo in self._store.select("promotion:"):
            if not (date_t.fromisoformat(promo["start"]) <= today
                    <= date_t.fromisoformat(promo["end"])):
                continue
            for item in promo["items"]:
                if item["item_id"] == item_id:
                    return {"old_price": item["old_price"],
                            "promo_price": item["promo_price"]}
        return None

    def effective_price(self, item_id: str, audience: str, today: date_t,
                        menu_price: Optional[int] = None) -> Money:
        """Promotion price while today is inside the window, else the listed price."""
        if audience == "products":
            promo = self._active_promo_prices(item_id, today)
            if promo is not None:
                return Money(promo["promo_price"])
        if menu_price is not None:
            return Money(menu_price)
        item = self._store.get(f"item:{audience}:{item_id}")
        if item is None:
            raise NotFoundError(f"unknown item {item_id!r}")
        return Money(item["unit_price"])

    def _check_menu_editor(self, actor: dict, audience: str) -> None:
        if audience == "products" and actor["role"] != "supplier":
            raise DeniedError("product menus are maintained by suppliers")
        if audience == "services" and actor["role"] not in ("director", "administrator"):
            raise DeniedError("service menus are maintained by the company",
                              rule_id="BR18")


def _check_audience(audience: str) -> None:
    if audience not in AUDIENCES:
        raise ValidationError(f"unknown catalog audience {audience!r}")


_MARKUP = set("<>&\"'")


def _reject_markup(text: str, what: str) -> None:
    """Names flow into CSV/print exports; reserved markup characters are
    rejected outright rather than escaped."""
    if any(ch in _MARKUP for ch in text):
        raise ValidationError(f"{what} may not contain markup characters",
                              details={"field": what})
