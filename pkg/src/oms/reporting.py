"""Reports: monthly cash flow, weekly productivity, daily inventory summary,
and parameterized ad hoc queries over the same ledgers.

Everything is derived from transactions recorded in the system — nothing
else exists as far as reports are concerned. Runs are stamped with the
current date, kept for six months per user, and exportable as CSV, a
paginated print rendering, or an email attachment.
"""

from __future__ import annotations

import csv
import io
from datetime import date as date_t, timedelta
from fractions import Fraction
from typing import Any, Optional

from .clock import Clock
from .config import AppConfig
from .errors import DeniedError, NotFoundError, ValidationError
from .outbox import Outbox
from .ratings import RatingService
from .store import AuditLog, Store, Transaction

CATEGORIES = ("cash_flow", "productivity", "inventory_summary", "adhoc")
HISTORY_DAYS = 183
PRINT_PAGE_ROWS = 40

ADMIN_ADHOC_LEDGERS = {"audit"}


class ReportingService:
    def __init__(self, store: Store, clock: Clock, config: AppConfig,
                 ratings: RatingService, outbox: Outbox, audit: AuditLog):
        self._store = store
        self._clock = clock
        self._config = config
        self._ratings = ratings
        self._outbox = outbox
        self._audit = audit

    # -- category runners --------------------------------------------------------

    def cash_flow(self, actor: dict, month: str) -> dict:
        """Running-month cash flow: service income in, product orders plus
        wages plus inventory usage out."""
        self._check_access(actor, "cash_flow")
        year, mon = _parse_month(month)
        today = self._clock.today()
        if (year, mon) > (today.year, today.month):
            raise ValidationError("cash flow runs for past or current months only")
        snap = self._store.snapshot()
        inflows = sum(o["breakdown"]["total"] for o in snap.values("order:service:")
                      if o["status"] != "cancelled" and _in_month(o["created_at"], year, mon))
        product_out = sum(o["breakdown"]["total"] for o in snap.values("order:product:")
                          if o["status"] != "cancelled" and _in_month(o["created_at"], year, mon))
        wages_out = sum(w["wage"] for w in snap.values("wage:")
                        if _in_month(w["date"], year, mon))
        usage_out = sum(line["cost"] for u in snap.values("usage:")
                        if _in_month(u["date"], year, mon) for line in u["lines"])
        outflows = product_out + wages_out + usage_out
        body = {
            "columns": ["measure", "pence"],
            "rows": [["inflows", inflows],
                     ["product_orders", product_out],
                     ["wages", wages_out],
                     ["inventory_usage", usage_out],
                     ["outflows", outflows],
                     ["net", inflows - outflows]],
        }
        return self._save(actor, "cash_flow", {"month": month}, body)

    def productivity_report(self, actor: dict, week: str) -> dict:
        """Per-employee week: attended hours, jobs worked, compound rating,
        and rating earned per attended hour, in ranking order."""
        self._check_access(actor, "productivity")
        start, end = _week_bounds(week)
        period = {"start": start.isoformat(), "end": end.isoformat()}
        snap = self._store.snapshot()
        minutes: dict[int, int] = {}
        for sheet in snap.values("sheet:attendance:"):
            if start <= date_t.fromisoformat(sheet["date"]) <= end:
                for row in sheet["rows"]:
                    minutes[row["employee_id"]] = (minutes.get(row["employee_id"], 0)
                                                   + row["minutes"])
        jobs: dict[int, int] = {}
        for order in snap.values("order:service:"):
            if order["status"] != "completed":
                continue
            if not (start <= date_t.fromisoformat(order["date"]) <= end):
                continue
            assignment = snap.get(f"assignment:{order.get('assignment_id')}")
            for employee_id in (assignment or {}).get("staff", []):
                jobs[employee_id] = jobs.get(employee_id, 0) + 1
        ranking = self._ratings.rank_employees(period)
        rows = []
        for entry in ranking:
            employee_id = entry["employee_id"]
            mins = minutes.get(employee_id, 0)
            rating = entry["value"]
            per_hour: Optional[float] = None
            if rating is not None and mins > 0:
                per_hour = float(Fraction(rating).limit_denominator(10**9)
                                 / Fraction(mins, 60))
            rows.append([employee_id, _hours(mins), jobs.get(employee_id, 0),
                         rating, per_hour])
        body = {"columns": ["employee_id", "hours", "jobs", "compound_rating",
                            "rating_per_hour"], "rows": rows}
        return self._save(actor, "productivity", {"week": week}, body)

    def inventory_summary(self, actor: dict, day: str) -> dict:
        """Per-item day summary: opening, issued, used, standing, reorder flag."""
        self._check_access(actor, "inventory_summary")
        snap = self._store.snapshot()
        issued: dict[str, int] = {}
        used: dict[str, int] = {}
        for sheet in snap.values("sheet:inventory:"):
            if sheet["date"] != day:
                continue
            for line in sheet["lines"]:
                issued[line["item_id"]] = issued.get(line["item_id"], 0) + line["issued"]
                used[line["item_id"]] = used.get(line["item_id"], 0) + line["used"]
        rows = []
        for stock in snap.values("stock:"):
            item = stock["item_id"]
            standing = stock["standing"]
            day_used = used.get(item, 0)
            rows.append([item, standing + day_used, issued.get(item, 0), day_used,
                         standing, standing * 2 <= stock["capacity"]])
        body = {"columns": ["item_id", "opening", "issued", "used", "standing",
                            "below_threshold"], "rows": sorted(rows)}
        return self._save(actor, "inventory_summary", {"day": day}, body)

    def adhoc(self, actor: dict, descriptor: dict) -> dict:
        """Filtered rows straight off an existing ledger; no novel data."""
        ledger = descriptor.get("ledger")
        queries = {
            "orders": ("order:", ["id", "kind", "status", "created_at", "total"]),
            "wages": ("wage:", ["employee_id", "shift_id", "date", "wage"]),
            "usage": ("usage:", ["shift_id", "date", "lines"]),
            "ratings": ("rating:", ["id", "kind", "score", "state", "date"]),
            "audit": ("audit:", ["seq", "actor", "action", "entity", "timestamp"]),
        }
        if ledger not in queries:
            raise ValidationError(f"unknown ad hoc ledger {ledger!r}")
        self._check_access(actor, "adhoc", ledger=ledger)
        prefix, columns = queries[ledger]
        filters = descriptor.get("filters", {})
        snap = self._store.snapshot()
        rows = []
        for record in snap.values(prefix):
            if not isinstance(record, dict) or record.get("_hidden"):
                continue
            flat = dict(record)
            if "breakdown" in flat:
                flat["total"] = flat["breakdown"]["total"]
            if all(flat.get(k) == v for k, v in filters.items()):
                rows.append([_cell(flat.get(c)) for c in columns])
        body = {"columns": columns, "rows": rows}
        return self._save(actor, "adhoc", descriptor, body)

    # -- persistence and access -------------------------------------------------

    def _save(self, actor: dict, category: str, params: dict, body: dict) -> dict:
        generated_at = self._clock.now().isoformat()

        def put(txn: Transaction) -> dict:
            report_id = txn.next_seq("report")
            report = {"id": report_id, "category": category, "params": params,
                      "generated_at": generated_at, "date": generated_at[:10],
                      "body": body, "provenance": {"category": category, **params},
                      "run_by": actor["id"]}
            txn.put(f"report:{report_id}", report)
            self._audit.append(txn, actor=actor["username"], action="report.run",
                               entity=f"report:{report_id}", timestamp=generated_at)
            return report
        return self._store.run(put)

    def _check_access(self, actor: dict, category: str, *, ledger: str = "") -> None:
        if actor["role"] == "director":
            return
        if actor["role"] == "administrator" and category == "adhoc" \
                and ledger in ADMIN_ADHOC_LEDGERS:
            return
        raise DeniedError("summary reports are the director's (system ledgers: "
                          "administrator)", rule_id="BR18")

    def report_history(self, actor: dict) -> list[dict]:
        """This user's runs inside the six-month window, newest first."""
        snap = self._store.snapshot()
        cutoff = self._clock.today() - timedelta(days=HISTORY_DAYS - 1)
        out = [r for r in snap.values("report:")
               if r["run_by"] == actor["id"] and not r.get("_hidden")
               and date_t.fromisoformat(r["date"]) >= cutoff]
        return sorted(out, key=lambda r: -r["id"])

    def get_report(self, actor: dict, report_id: int) -> dict:
        report = self._store.get(f"report:{report_id}")
        if report is None or report.get("_hidden"):
            raise NotFoundError(f"no report {report_id}")
        if report["run_by"] != actor["id"] and actor["role"] != "director":
            raise DeniedError("reports are visible to the user who ran them")
        return report

    # -- export --------------------------------------------------------------------

    def export(self, actor: dict, report_id: int, *, format: str,
               email_to: Optional[str] = None) -> dict:
        """Render a report as UTF-8 CSV or a paginated print document, or
        queue it as an email attachment."""
        report = self.get_report(actor, report_id)
        if format == "csv":
            return {"format": "csv", "content": _to_csv(report)}
        if format == "print":
            return {"format": "print", "content": _to_print(report)}
        if format == "email":
            recipient = email_to or actor.get("email") or actor["username"]

            def queue(txn: Transaction) -> dict:
                msg_id = self._outbox.queue(
                    txn, recipient=recipient, template="ReportExport",
                    payload={"report_id": report_id,
                             "category": report["category"],
                             "attachment_csv": _to_csv(report)})
                return {"format": "email", "queued_message": msg_id}
            return self._store.run(queue)
        raise ValidationError(f"unknown export format {format!r}")


def _to_csv(report: dict) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(report["body"]["columns"])
    for row in report["body"]["rows"]:
        writer.writerow(row)
    return buffer.getvalue()


def _to_print(report: dict) -> str:
    columns = report["body"]["columns"]
    rows = report["body"]["rows"]
    pages = []
    header = (f"{report['category']}  #{report['id']}  "
              f"generated {report['generated_at'][:19]}")
    for page_no, start in enumerate(range(0, max(len(rows), 1), PRINT_PAGE_ROWS), 1):
        lines = [header, "-" * len(header), " | ".join(str(c) for c in columns)]
        for row in rows[start:start + PRINT_PAGE_ROWS]:
            lines.append(" | ".join("" if v is None else str(v) for v in row))
        lines.append(f"page {page_no}")
        pages.append("\n".join(lines))
    return "\f".join(pages)


def _cell(value: Any) -> Any:
    if isinstance(value, (dict, list)):
        import json
        return json.dumps(value, sort_keys=True)
    return value


def _parse_month(month: str) -> tuple[int, int]:
    try:
        year, mon = month.split("-")
        return int(year), int(mon)
    except ValueError:
        raise ValidationError(f"month must look like 2026-01, got {month!r}")


def _in_month(stamp: str, year: int, mon: int) -> bool:
    d = date_t.fromisoformat(stamp[:10])
    return (d.year, d.month) == (year, mon)


def _week_bounds(week: str) -> tuple[date_t, date_t]:
    try:
        year, wk = week.split("-W")
        start = date_t.fromisocalendar(int(year), int(wk), 1)
    except ValueError:
        raise ValidationError(f"week must look like 2026-W02, got {week!r}")
    return start, start + timedelta(days=6)


def _hours(minutes: int) -> float:
    return minutes / 60
