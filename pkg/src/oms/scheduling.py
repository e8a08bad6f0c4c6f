"""Job scheduling, labor capacity, and delivery-time slots.

Labor is tracked in whole minutes per shift. Placement is greedy: the
earliest shift (then lowest id) with enough free capacity wins, so identical
inputs always produce identical assignments. Contracted jobs take priority:
when a contracted job would not fit, the smallest sufficient set of
*unconfirmed* one-off holds is bumped (confirmed work is never preempted) and
the bumped jobs are offered alternatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date as date_t, timedelta
from fractions import Fraction
from typing import Any, Optional

from .clock import Clock
from .config import AppConfig
from .errors import CapacityError, ConflictError, ValidationError
from .store import Store, Transaction


@dataclass(frozen=True)
class PremisesSpec:
    square_feet: int
    rooms: int
    floors: int
    surface_kind: str
    area_kind: str

    def __post_init__(self):
        if self.square_feet <= 0:
            raise ValidationError("premises must have a positive floor area")
        if self.rooms < 1 or self.floors < 1:
            raise ValidationError("premises must have at least one room and one floor")

    @classmethod
    def from_dict(cls, raw: dict) -> "PremisesSpec":
        try:
            return cls(square_feet=raw["square_feet"], rooms=raw["rooms"],
                       floors=raw["floors"], surface_kind=raw["surface_kind"],
                       area_kind=raw["area_kind"])
        except KeyError as exc:
            raise ValidationError(f"premises description missing {exc.args[0]!r}")


def ceil_to_quarter_hours(hours: Fraction) -> Fraction:
    return Fraction(math.ceil(hours * 4), 4)


def floor_factor(floors: int) -> Fraction:
    """Each floor above the first adds 10% for hauling and stairs."""
    return 1 + Fraction(floors - 1, 10)


class SchedulingService:
    def __init__(self, store: Store, clock: Clock, config: AppConfig):
        self._store = store
        self._clock = clock
        self._config = config

    # -- labor estimation ------------------------------------------------------

    def estimate_minutes(self, premises: PremisesSpec) -> int:
        """Deterministic labor estimate for one pass over the premises.

        Floor area over the configured cleaning rate, rounded up to the
        quarter hour, scaled by the multi-storey factor, in whole minutes.
        """
        key = f"{premises.surface_kind}|{premises.area_kind}"
        rate = self._config.labor_rates.get(key)
        if rate is None:
            raise ValidationError(
                f"no labor rate for surface/area {key!r}",
                details={"surface_kind": premises.surface_kind,
                         "area_kind": premises.area_kind})
        hours = ceil_to_quarter_hours(Fraction(premises.square_feet, rate))
        minutes = hours * 60 * floor_factor(premises.floors)
        return math.ceil(minutes)

    # -- shifts ---------------------------------------------------------------

    def create_shift(self, *, date: str, start: str, end: str,
                     staff: list[int], supervisor_id: int) -> dict:
        """Register a shift; capacity is staff-count x shift length."""
        duration = _minutes_between(start, end)
        if duration <= 0:
            raise ValidationError("shift must end after it starts")
        if not staff:
            raise ValidationError("shift needs at least one assigned staff member")

        def create(txn: Transaction) -> dict:
            shift_id = txn.next_seq("shift")
            shift = {
                "id": shift_id, "date": date, "start": start, "end": end,
                "staff": list(staff), "supervisor_id": supervisor_id,
                "capacity_minutes": duration * len(staff),
            }
            txn.put(f"shift:{shift_id}", shift)
            txn.put(f"shift_used:{shift_id}", {"minutes": 0})
            return shift
        return self._store.run(create)

    def shifts_for_date(self, date: str) -> list[dict]:
        shifts = [v for _, v in self._store.select("shift:") if v["date"] == date]
        return sorted(shifts, key=lambda s: (s["start"], s["id"]))

    def shift(self, shift_id: int) -> Optional[dict]:
        return self._store.get(f"shift:{shift_id}")

    def rotor_for(self, employee_id: int) -> list[dict]:
        """The employee's own shift timetable."""
        shifts = [v for _, v in self._store.select("shift:")
                  if employee_id in v["staff"] or v["supervisor_id"] == employee_id]
        return sorted(shifts, key=lambda s: (s["date"], s["start"], s["id"]))

    # -- capacity ----------------------------------------------------------------

    def used_minutes(self, shift_id: int) -> int:
        return self._store.get(f"shift_used:{shift_id}", {"minutes": 0})["minutes"]

    def _free_now(self, shift: dict) -> int:
        return shift["capacity_minutes"] - self.used_minutes(shift["id"])

    def capacity_check(self, date: str, needed_minutes: int) -> dict:
        """Compare needed labor to the date's total free capacity.

        Advisory read; the commit path re-verifies inside its transaction.
        """
        if needed_minutes < 0:
            raise ValidationError("labor demand cannot be negative")
        free = sum(self._free_now(s) for s in self.shifts_for_date(date))
        if needed_minutes <= free:
            return {"feasible": True, "free_minutes": free, "deficit_minutes": 0}
        return {"feasible": False, "free_minutes": free,
                "deficit_minutes": needed_minutes - free}

    # -- job placement -------------------------------------------------------------

    def plan_assignment(self, txn: Transaction, *, job_id: Any, date: str,
                        minutes: int, contracted: bool) -> dict:
        """Place a job on the earliest feasible shift inside ``txn``.

        Contracted jobs may bump unconfirmed one-off holds; the bumped holds
        are marked and returned so callers can offer alternatives. Raises
        CapacityError (with nearby alternatives) when nothing fits.
        """
        shifts = sorted((txn.get(k) for k in txn.keys("shift:")),
                        key=lambda s: (s["start"], s["id"]))
        shifts = [s for s in shifts if s["date"] == date]
        for shift in shifts:
            free = self._txn_free_minutes(txn, shift)
            if free >= minutes:
                return self._write_assignment(txn, job_id, shift, minutes, contracted, [])
        if contracted:
            for shift in shifts:
                free = self._txn_free_minutes(txn, shift)
                bumpable = sorted(
                    (a for a in self._txn_assignments(txn, shift["id"])
                     if a["state"] == "held" and not a["contracted"]),
                    key=lambda a: -a["minutes"])
                taken: list[dict] = []
                for hold in bumpable:
                    if free >= minutes:
                        break
                    taken.append(hold)
                    free += hold["minutes"]
                if free >= minutes:
                    for hold in taken:
                        hold["state"] = "bumped"
                        hold["bump_reason"] = "contracted job took priority"
                        txn.put(f"assignment:{hold['id']}", hold)
                        self._adjust_used(txn, shift["id"], -hold["minutes"])
                    return self._write_assignment(txn, job_id, shift, minutes,
                                                  contracted, [h["id"] for h in taken])
        raise CapacityError(
            "no shift on the requested date can take this job",
            details={"date": date, "needed_minutes": minutes,
                     "alternatives": self.alternative_dates(date, minutes)})

    def _write_assignment(self, txn: Transaction, job_id: Any, shift: dict,
                          minutes: int, contracted: bool, bumped: list[int]) -> dict:
        assignment_id = txn.next_seq("assignment")
        record = {
            "id": assignment_id, "job_id": job_id, "shift_id": shift["id"],
            "staff": list(shift["staff"]), "minutes": minutes,
            "contracted": contracted, "state": "held", "bumped_holds": bumped,
        }
        txn.put(f"assignment:{assignment_id}", record)
        self._adjust_used(txn, shift["id"], minutes)
        return record

    def _adjust_used(self, txn: Transaction, shift_id: int, delta: int) -> None:
        used = txn.get(f"shift_used:{shift_id}", {"minutes": 0})
        used["minutes"] += delta
        txn.put(f"shift_used:{shift_id}", used)

    def _txn_assignments(self, txn: Transaction, shift_id: int) -> list[dict]:
        return [txn.get(k) for k in txn.keys("assignment:")
                if txn.get(k)["shift_id"] == shift_id]

    def _txn_free_minutes(self, txn: Transaction, shift: dict) -> int:
        used = txn.get(f"shift_used:{shift['id']}", {"minutes": 0})
        return shift["capacity_minutes"] - used["minutes"]

    def schedule_job(self, *, job_id: Any, date: str, minutes: int,
                     contracted: bool) -> dict:
        """Standalone placement (hold state); order flows embed plan_assignment
        in their own commit transaction instead."""
        def plan(txn: Transaction) -> dict:
            return self.plan_assignment(txn, job_id=job_id, date=date,
                                        minutes=minutes, contracted=contracted)
        return self._store.run(plan)

    def confirm_assignment(self, txn: Transaction, assignment_id: int) -> dict:
        record = txn.get(f"assignment:{assignment_id}")
        if record is None or record["state"] not in ("held", "confirmed"):
            raise ConflictError("assignment is no longer available")
        record["state"] = "confirmed"
        txn.put(f"assignment:{assignment_id}", record)
        return record

    def release_assignment(self, txn: Transaction, assignment_id: int) -> None:
        record = txn.get(f"assignment:{assignment_id}")
        if record is not None:
            if record["state"] in ("held", "confirmed"):
                self._adjust_used(txn, record["shift_id"], -record["minutes"])
            record["state"] = "released"
            txn.put(f"assignment:{assignment_id}", record)

    def alternative_dates(self, date: str, minutes: int, *, days: int = 7) -> list[str]:
        """Nearest dates that could take the job, scanning outward."""
        base = date_t.fromisoformat(date)
        options = []
        for offset in range(1, days + 1):
            for candidate in (base + timedelta(days=offset),):
                iso = candidate.isoformat()
                if self.capacity_check(iso, minutes)["feasible"]:
                    options.append(iso)
            if len(options) >= 3:
                break
        return options

    # -- delivery slots --------------------------------------------------------------

    def ensure_slots(self, date: str) -> None:
        def create(txn: Transaction):
            for time in self._config.slot_times:
                key = f"slot:{date}:{time}"
                if txn.get(key) is None:
                    txn.put(key, {"date": date, "time": time, "state": "free",
                                  "holder": None})
        self._store.run(create)

    def available_delivery_times(self, date: str) -> list[str]:
        """Free slots only; held and confirmed slots are not offered."""
        self.ensure_slots(date)
        return sorted(v["time"] for _, v in self._store.select(f"slot:{date}:")
                      if v["state"] == "free")

    def hold_slot(self, date: str, time: str, holder: str) -> None:
        self.ensure_slots(date)

        def hold(txn: Transaction):
            slot = txn.get(f"slot:{date}:{time}")
            if slot is None:
                raise ValidationError(f"no delivery slot {time} on {date}")
            if slot["state"] != "free":
                raise ConflictError(f"slot {time} on {date} is not free")
            slot["state"] = "held"
            slot["holder"] = holder
            txn.put(f"slot:{date}:{time}", slot)
        self._store.run(hold)

    def confirm_slot(self, txn: Transaction, *, date: str, time: str,
                     order_ref: str, prior_holder: Optional[str] = None) -> None:
        """Confirm a slot inside an order transaction.

        Holds are advisory: a confirmer may take a free slot or one it holds
        itself; a slot confirmed by anyone else is gone for good.
        """
        slot = txn.get(f"slot:{date}:{time}")
        if slot is None:
            raise ValidationError(f"no delivery slot {time} on {date}")
        if slot["state"] == "confirmed":
            raise ConflictError(f"slot {time} on {date} is already booked")
        if slot["state"] == "held" and prior_holder is not None \
                and slot["holder"] != prior_holder:
            raise ConflictError(f"slot {time} on {date} is held by another order")
        slot["state"] = "confirmed"
        slot["holder"] = order_ref
        txn.put(f"slot:{date}:{time}", slot)

    def release_slot(self, txn: Transaction, *, date: str, time: str) -> None:
        slot = txn.get(f"slot:{date}:{time}")
        if slot is not None:
            slot["state"] = "free"
            slot["holder"] = None
            txn.put(f"slot:{date}:{time}", slot)

    def slot_state(self, date: str, time: str) -> Optional[dict]:
        return self._store.get(f"slot:{date}:{time}")


def _minutes_between(start: str, end: str) -> int:
    sh, sm = map(int, start.split(":"))
    eh, em = map(int, end.split(":"))
    return (eh * 60 + em) - (sh * 60 + sm)
