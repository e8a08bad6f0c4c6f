"""Job ratings, supervisor ratings, compound scores, rankings, and appeals.

Ratings are append-only on a 1..5 integer scale. A compound employee score
is the weighted mean of the customer component (job ratings attributed to
every crew member on the job) and the supervisor component; weights are
normalized, and a missing component hands its weight to the one present.
Appealed ratings drop out of the score until the director upholds or revises
them. Staff can see exactly their own ratings, never a peer's.
"""

from __future__ import annotations

import html
from datetime import date as date_t
from fractions import Fraction
from typing import Any, Iterable, Optional

from .clock import Clock
from .config import AppConfig
from .domain.rules import check_rule, Allow
from .errors import DeniedError, NotFoundError, ValidationError
from .store import AuditLog, Store, Transaction

SCALE_MIN, SCALE_MAX = 1, 5


def compound_value(customer_scores: Iterable[Fraction | int],
                   supervisor_scores: Iterable[Fraction | int],
                   weights: tuple[float, float]) -> Optional[Fraction]:
    """Weighted convex combination of the two component means.

    Weights are normalized (so any positive scaling of them is equivalent);
    a missing component renormalizes onto the present one; both missing is
    undefined (None).
    """
    cust = [Fraction(s) for s in customer_scores]
    sup = [Fraction(s) for s in supervisor_scores]
    w_c, w_s = (Fraction(w).limit_denominator(10**9) for w in weights)
    if w_c < 0 or w_s < 0 or w_c + w_s == 0:
        raise ValidationError("weights must be non-negative and not both zero")
    parts = []
    if cust:
        parts.append((w_c, sum(cust) / len(cust)))
    if sup:
        parts.append((w_s, sum(sup) / len(sup)))
    if not parts:
        return None
    total_w = sum(w for w, _ in parts)
    if total_w == 0:
        return None
    return sum(w * mean for w, mean in parts) / total_w


def rank_from_scores(per_employee: dict[int, tuple[list, list]],
                     weights: tuple[float, float]) -> list[dict]:
    """Order employees by compound score, best first; undefined scores rank
    last; ties break on ascending employee id."""
    rows = []
    for employee_id, (cust, sup) in per_employee.items():
        value = compound_value(cust, sup, weights)
        rows.append({"employee_id": employee_id, "value": value})
    rows.sort(key=lambda r: (r["value"] is None,
                             -r["value"] if r["value"] is not None else 0,
                             r["employee_id"]))
    return rows


class RatingService:
    def __init__(self, store: Store, clock: Clock, config: AppConfig,
                 audit: AuditLog):
        self._store = store
        self._clock = clock
        self._config = config
        self._audit = audit

    # -- customer job ratings ------------------------------------------------

    def unrated_jobs(self, customer: dict) -> list[dict]:
        """Checklist of this customer's completed, not-yet-rated jobs."""
        rated = {v["job_id"] for _, v in self._store.select("rated_job:")}
        out = []
        for _, order in self._store.select("order:service:"):
            if (order["customer_id"] == customer["id"]
                    and order["status"] == "completed"
                    and order["id"] not in rated):
                out.append({"job_id": order["id"], "date": order["date"],
                            "services": [l["name"] for l in order["services"]]})
        return sorted(out, key=lambda j: j["job_id"])

    def rate_job(self, customer: dict, job_id: int,
                 itemized: list[dict]) -> dict:
        """Store a customer's itemized rating for one completed job of theirs."""
        job = self._store.get(f"order:service:{job_id}")
        if job is None:
            raise NotFoundError(f"no job {job_id}")
        outcome = check_rule("BR20", {"job": {"customer_id": job["customer_id"],
                                              "status": job["status"]},
                                      "rater_id": customer["id"]})
        if not isinstance(outcome, Allow):
            raise DeniedError(outcome.reason, rule_id="BR20")
        if not itemized:
            raise ValidationError("the feedback form needs at least one score")
        for item in itemized:
            _check_scale(item["score"])
        total = _round_to_scale(Fraction(sum(i["score"] for i in itemized), len(itemized)))
        now = self._clock.now()

        def commit(txn: Transaction) -> dict:
            if txn.get(f"rated_job:{job_id}") is not None:
                raise ValidationError("this job has already been rated")
            rating_id = txn.next_seq("rating")
            staff = self._job_staff(txn, job)
            record = {
                "id": rating_id, "kind": "customer_job", "job_id": job_id,
                "staff": staff, "rater_id": customer["id"], "score": total,
                "itemized": [{"criterion": html.escape(str(i["criterion"])),
                              "score": i["score"]} for i in itemized],
                "state": "active", "revised_score": None,
                "date": job["date"], "created_at": now.isoformat(),
            }
            txn.put(f"rating:{rating_id}", record)
            txn.put(f"rated_job:{job_id}", {"job_id": job_id, "rating_id": rating_id})
            self._audit.append(txn, actor=customer["username"], action="rating.job",
                               entity=f"rating:{rating_id}",
                               timestamp=now.isoformat(), after=record)
            return record

        return self._store.run(commit)

    def _job_staff(self, txn: Transaction, job: dict) -> list[int]:
        assignment_id = job.get("assignment_id")
        if assignment_id:
            assignment = txn.get(f"assignment:{assignment_id}")
            if assignment:
                return list(assignment["staff"])
        return []

    def save_rating_draft(self, customer: dict, job_id: int, form: dict) -> dict:
        """Park a half-finished feedback form for later completion."""
        draft = {"job_id": job_id, "form": form,
                 "saved_at": self._clock.now().isoformat()}

        def put(txn: Transaction) -> dict:
            txn.put(f"rating_draft:{customer['id']}:{job_id}", draft)
            return draft
        return self._store.run(put)

    def load_rating_draft(self, customer: dict, job_id: int) -> Optional[dict]:
        return self._store.get(f"rating_draft:{customer['id']}:{job_id}")

    # -- supervisor shift ratings ----------------------------------------------

    def rate_employee(self, supervisor: dict, *, employee_id: int, shift_id: int,
                      score: int) -> dict:
        _check_scale(score)
        shift = self._store.get(f"shift:{shift_id}")
        if shift is None:
            raise NotFoundError(f"no shift {shift_id}")
        if shift["supervisor_id"] != supervisor["id"]:
            raise DeniedError("only the shift's on-duty supervisor rates its staff",
                              rule_id="BR4")
        if employee_id not in shift["staff"]:
            raise DeniedError(f"employee {employee_id} was not on shift {shift_id}")
        now = self._clock.now()

        def commit(txn: Transaction) -> dict:
            rating_id = txn.next_seq("rating")
            record = {
                "id": rating_id, "kind": "supervisor_shift",
                "employee_id": employee_id, "shift_id": shift_id,
                "rater_id": supervisor["id"], "score": score, "itemized": [],
                "state": "active", "revised_score": None,
                "date": shift["date"], "created_at": now.isoformat(),
            }
            txn.put(f"rating:{rating_id}", record)
            self._audit.append(txn, actor=supervisor["username"],
                               action="rating.employee",
                               entity=f"rating:{rating_id}",
                               timestamp=now.isoformat(), after=record)
            return record

        return self._store.run(commit)

    # -- compound score and ranking ------------------------------------------------

    def compound_rating(self, employee_id: int, period: dict,
                        weights: Optional[tuple[float, float]] = None) -> Optional[dict]:
        weights = weights or self._config.rating_weights
        cust, sup = self._component_scores(employee_id, period)
        value = compound_value(cust, sup, weights)
        if value is None:
            return None
        return {"employee_id": employee_id, "period": period,
                "customer_mean": _mean_or_none(cust),
                "supervisor_mean": _mean_or_none(sup),
                "weights": list(weights), "value": float(value)}

    def _component_scores(self, employee_id: int,
                          period: dict) -> tuple[list[int], list[int]]:
        cust, sup = [], []
        for _, rating in self._store.select("rating:"):
            score = _effective_score(rating)
            if score is None or not _in_period(rating["date"], period):
                continue
            if rating["kind"] == "customer_job" and employee_id in rating.get("staff", []):
                cust.append(score)
            elif rating["kind"] == "supervisor_shift" \
                    and rating.get("employee_id") == employee_id:
                sup.append(score)
        return cust, sup

    def rank_employees(self, period: dict,
                       weights: Optional[tuple[float, float]] = None) -> list[dict]:
        """All cleaning staff ordered by compound score (productivity ranking)."""
        weights = weights or self._config.rating_weights
        per_employee: dict[int, tuple[list, list]] = {}
        for _, account in self._store.select("account:"):
            if account["role"] == "cleaning_staff" and account["state"] != "deleted":
                per_employee[account["id"]] = self._component_scores(account["id"], period)
        rows = rank_from_scores(per_employee, weights)
        for row in rows:
            row["value"] = float(row["value"]) if row["value"] is not None else None
        return rows

    # -- appeals -----------------------------------------------------------------------

    def appeal_rating(self, employee: dict, rating_id: int, reason: str) -> dict:
        """Open an appeal; the rating leaves every score until it is resolved."""
        rating = self._store.get(f"rating:{rating_id}")
        if rating is None:
            raise NotFoundError(f"no rating {rating_id}")
        if employee["role"] not in ("cleaning_staff", "supervisor"):
            raise DeniedError("only affected employees appeal ratings")
        affected = (employee["id"] in rating.get("staff", [])
                    or rating.get("employee_id") == employee["id"])
        if not affected:
            raise DeniedError("only ratings that affect you can be appealed")
        if rating["state"] == "appealed":
            raise DeniedError("this rating already has an open appeal")
        now = self._clock.now()

        def commit(txn: Transaction) -> dict:
            live = txn.get(f"rating:{rating_id}")
            live["state"] = "appealed"
            txn.put(f"rating:{rating_id}", live)
            appeal_id = txn.next_seq("appeal")
            appeal = {"id": appeal_id, "rating_id": rating_id,
                      "employee_id": employee["id"],
                      "reason": html.escape(reason),
                      "resolution": "pending", "new_score": None,
                      "created_at": now.isoformat()}
            txn.put(f"appeal:{appeal_id}", appeal)
            self._audit.append(txn, actor=employee["username"], action="appeal.open",
                               entity=f"appeal:{appeal_id}",
                               timestamp=now.isoformat(), after=appeal)
            return appeal

        return self._store.run(commit)

    def resolve_appeal(self, director: dict, appeal_id: int, *, decision: str,
                       new_score: Optional[int] = None) -> dict:
        """Director upholds the original score or substitutes a revised one."""
        if director["role"] != "director":
            raise DeniedError("appeals are resolved by the director")
        appeal = self._store.get(f"appeal:{appeal_id}")
        if appeal is None:
            raise NotFoundError(f"no appeal {appeal_id}")
        if appeal["resolution"] != "pending":
            raise ValidationError("appeal already resolved")
        if decision not in ("upheld", "revised"):
            raise ValidationError("decision must be 'upheld' or 'revised'")
        if decision == "revised":
            if new_score is None:
                raise ValidationError("a revision needs the new score")
            _check_scale(new_score)
        now = self._clock.now()

        def commit(txn: Transaction) -> dict:
            live_appeal = txn.get(f"appeal:{appeal_id}")
            rating = txn.get(f"rating:{live_appeal['rating_id']}")
            live_appeal["resolution"] = decision
            live_appeal["new_score"] = new_score
            if decision == "revised":
                rating["state"] = "revised"
                rating["revised_score"] = new_score
            else:
                # upholding keeps whatever score was effective before the
                # appeal, including an earlier revision
                rating["state"] = ("revised" if rating.get("revised_score") is not None
                                   else "upheld")
            txn.put(f"appeal:{appeal_id}", live_appeal)
            txn.put(f"rating:{rating['id']}", rating)
            self._audit.append(txn, actor=director["username"], action="appeal.resolve",
                               entity=f"appeal:{appeal_id}",
                               timestamp=now.isoformat(), after=live_appeal)
            return live_appeal

        return self._store.run(commit)

    def appeals(self, actor: dict, resolution: Optional[str] = None) -> list[dict]:
        """Appeal records for resolution work (director/administrator view)."""
        if actor["role"] not in ("director", "administrator"):
            raise DeniedError("the appeal queue is a management view")
        out = [v for _, v in self._store.select("appeal:")
               if resolution is None or v["resolution"] == resolution]
        return sorted(out, key=lambda a: a["id"])

    # -- visibility --------------------------------------------------------------------

    def ratings_for_employee(self, actor: dict, employee_id: int) -> list[dict]:
        """An employee's rating records, policy-guarded.

        Staff read exactly their own; a supervisor may read staff on shifts
        they supervised; director and administrator read anyone's.
        """
        if actor["role"] == "cleaning_staff" and actor["id"] != employee_id:
            raise DeniedError("cleaning staff view only their own ratings",
                              rule_id="SE-4")
        if actor["role"] == "customer":
            raise DeniedError("customers do not view employee ratings")
        if actor["role"] == "supervisor" and actor["id"] != employee_id:
            if not self._supervised(actor["id"], employee_id):
                raise DeniedError("supervisors view ratings of their own shifts' staff")
        out = []
        for _, rating in self._store.select("rating:"):
            if (rating["kind"] == "supervisor_shift"
                    and rating.get("employee_id") == employee_id) \
                    or (rating["kind"] == "customer_job"
                        and employee_id in rating.get("staff", [])):
                out.append(rating)
        return sorted(out, key=lambda r: r["id"])

    def _supervised(self, supervisor_id: int, employee_id: int) -> bool:
        return any(v["supervisor_id"] == supervisor_id and employee_id in v["staff"]
                   for _, v in self._store.select("shift:"))


def _check_scale(score: Any) -> None:
    if not isinstance(score, int) or isinstance(score, bool) \
            or not (SCALE_MIN <= score <= SCALE_MAX):
        raise ValidationError(
            f"scores are integers on the {SCALE_MIN}..{SCALE_MAX} scale, got {score!r}")


def _round_to_scale(value: Fraction) -> int:
    from .domain.money import round_half_up
    return max(SCALE_MIN, min(SCALE_MAX, round_half_up(value)))


def _effective_score(rating: dict) -> Optional[int]:
    """Score a rating contributes: revised value once revised, nothing while
    an appeal is open."""
    if rating["state"] == "appealed":
        return None
    if rating["state"] == "revised":
        return rating["revised_score"]
    return rating["score"]


def _in_period(date_iso: str, period: dict) -> bool:
    d = date_t.fromisoformat(date_iso)
    return (date_t.fromisoformat(period["start"]) <= d
            <= date_t.fromisoformat(period["end"]))


def _mean_or_none(scores: list[int]) -> Optional[float]:
    if not scores:
        return None
    return float(Fraction(sum(scores), len(scores)))
