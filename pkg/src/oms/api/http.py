"""HTTP facade over the application core.

JSON in, JSON out, UTF-8. Sessions ride an ``Authorization: Bearer`` token;
every state-changing route additionally demands the session's anti-forgery
token in ``X-CSRF-Token``. Without a session only menu viewing, customer
account creation, and login itself are reachable. Errors always come back as
``{code, rule_id?, message, details}``.
"""

from typing import Any, Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from ..accounts import EMPLOYEE_ROLES
from ..analytics import (LoopParams, Stakeholder, circuit_count, derive_circuits,
                         aggregate_topology, fit_power_law, select_circuits,
                         simulate_loop, tail_share)
from ..app import Application
from ..errors import (AuthenticationError, ConfigurationError, ConflictError,
                      DeniedError, NotFoundError, OmsError, OrderFlowError,
                      ValidationError)

_STATUS = [
    (AuthenticationError, 401),
    (DeniedError, 403),
    (NotFoundError, 404),
    (ConflictError, 409),
    (OrderFlowError, 422),
    (ValidationError, 422),
    (ConfigurationError, 500),
]

MUTATING = ("POST", "PUT", "PATCH", "DELETE")


def create_app(core: Application) -> FastAPI:
    api = FastAPI(title="oms", version="1.0.0", docs_url=None, redoc_url=None,
                  openapi_url=None)
    api.state.core = core

    @api.middleware("http")
    async def csrf_guard(request: Request, call_next):
        """Reject forged mutations before any body parsing happens.

        Login and customer signup run before a session exists, so they are
        the only mutating paths outside the guard.
        """
        exempt = (request.url.path == "/auth/login"
                  or (request.method == "POST" and request.url.path == "/accounts"))
        if request.method in MUTATING and not exempt:
            auth = request.headers.get("authorization", "")
            token = auth.removeprefix("Bearer ").strip() if auth.startswith("Bearer ") else ""
            session = core.store.get(f"session:{token}") if token else None
            if session is not None and \
                    request.headers.get("x-csrf-token", "") != session["csrf_token"]:
                return JSONResponse(
                    {"code": "denied", "message": "anti-forgery token missing or wrong",
                     "details": {"header": "X-CSRF-Token"}}, status_code=403)
        return await call_next(request)

    @api.exception_handler(OmsError)
    async def _domain_error(request: Request, exc: OmsError):
        for klass, status in _STATUS:
            if isinstance(exc, klass):
                return JSONResponse(exc.to_body(), status_code=status)
        return JSONResponse(exc.to_body(), status_code=500)

    @api.exception_handler(RequestValidationError)
    async def _schema_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            {"code": "validation", "message": "request body failed validation",
             "details": {"errors": [
                 {"loc": [str(p) for p in e["loc"]], "msg": e["msg"]}
                 for e in exc.errors()]}},
            status_code=422)

    def session_of(request: Request) -> tuple[dict, dict]:
        auth = request.headers.get("authorization", "")
        token = auth.removeprefix("Bearer ").strip() if auth.startswith("Bearer ") else None
        session, account = core.accounts.resolve_session(token)
        if request.method in MUTATING:
            supplied = request.headers.get("x-csrf-token", "")
            if supplied != session["csrf_token"]:
                raise DeniedError("anti-forgery token missing or wrong",
                                  details={"header": "X-CSRF-Token"})
        return session, account

    def actor_of(request: Request) -> dict:
        session, account = session_of(request)
        if session.get("restricted"):
            raise DeniedError("password change required before anything else",
                              rule_id="BR9", details={"next": "/auth/password"})
        return account

    # ---- auth -------------------------------------------------------------

    class LoginBody(BaseModel):
        username: str
        password: str

    @api.post("/auth/login")
    def login(body: LoginBody):
        session = core.accounts.authenticate(body.username, body.password)
        account = core.accounts.get_account(session["account_id"])
        return {"token": session["token"], "csrf_token": session["csrf_token"],
                "restricted": session["restricted"], "account": account}

    class PasswordBody(BaseModel):
        old_password: str
        new_password: str

    @api.post("/auth/password")
    def change_password(body: PasswordBody, request: Request):
        session, _ = session_of(request)  # restricted sessions may do this
        account = core.accounts.change_password(session["token"], body.old_password,
                                                body.new_password)
        return {"account": account, "restricted": False}

    @api.post("/auth/logout")
    def logout(request: Request):
        session, _ = session_of(request)
        core.accounts.logout(session["token"])
        return {"ok": True}

    # ---- accounts ------------------------------------------------------------

    class CreateAccountBody(BaseModel):
        kind: str
        # customer
        email: Optional[str] = None
        email_confirm: Optional[str] = None
        payment_details: Optional[str] = None
        # employee
        first_name: Optional[str] = None
        surname: Optional[str] = None
        role: Optional[str] = None
        department: Optional[str] = None
        recruitment_no: Optional[str] = None
        director_authorization: bool = False

    @api.post("/accounts", status_code=201)
    def create_account(body: CreateAccountBody, request: Request):
        if body.kind == "customer":
            return core.accounts.create_customer(
                email=body.email or "", email_confirm=body.email_confirm or "",
                payment_details=body.payment_details)
        if body.kind == "employee":
            actor = actor_of(request)
            return core.accounts.create_employee(
                actor, first_name=body.first_name or "", surname=body.surname or "",
                role=body.role or "", department=body.department or "",
                recruitment_no=body.recruitment_no or "", email=body.email or "",
                director_authorization=body.director_authorization)
        raise ValidationError("kind must be 'customer' or 'employee'")

    @api.get("/accounts/idle")
    def idle_accounts(request: Request):
        actor = actor_of(request)
        if actor["role"] not in ("director", "administrator"):
            raise DeniedError("only the director or administrator views idle accounts",
                              rule_id="BR18")
        return {"accounts": core.accounts.idle_accounts()}

    @api.get("/accounts/{account_id}")
    def get_account(account_id: int, request: Request):
        actor = actor_of(request)
        if actor["id"] != account_id and actor["role"] not in ("director", "administrator"):
            raise DeniedError("accounts are visible to their owner and management",
                              rule_id="BR18")
        return core.accounts.get_account(account_id)

    class ModifyAccountBody(BaseModel):
        new_role: Optional[str] = None
        new_department: Optional[str] = None
        director_authorization: bool = False

    @api.patch("/accounts/{account_id}")
    def modify_account(account_id: int, body: ModifyAccountBody, request: Request):
        actor = actor_of(request)
        return core.accounts.modify_account(
            actor, account_id, new_role=body.new_role,
            new_department=body.new_department,
            director_authorization=body.director_authorization)

    class SuspendBody(BaseModel):
        start: str
        end: str
        director_authorization: bool = False
        confirm: bool = True

    @api.post("/accounts/{account_id}/suspend")
    def suspend_account(account_id: int, body: SuspendBody, request: Request):
        actor = actor_of(request)
        return core.accounts.suspend_account(
            actor, account_id, start=body.start, end=body.end,
            director_authorization=body.director_authorization, confirm=body.confirm)

    class DeleteBody(BaseModel):
        director_authorization: bool = False

    @api.delete("/accounts/{account_id}")
    def delete_account(account_id: int, request: Request,
                       body: Optional[DeleteBody] = None):
        actor = actor_of(request)
        core.accounts.delete_account(
            actor, account_id,
            director_authorization=body.director_authorization if body else False)
        return {"deleted": account_id}

    # ---- catalog ----------------------------------------------------------------

    @api.get("/menu")
    def menu(date: str, audience: str = "products"):
        # open by design: menu viewing requires no login
        return core.catalog.menu_for_date(date, audience=audience)

    class MenuEntryModel(BaseModel):
        item_id: str
        name: str
        unit_price: int
        supplier_id: str = ""
        available_units: int = 0
        hours_factor_pct: int = 100

    class MenuChange(BaseModel):
        op: str
        item_id: Optional[str] = None
        entry: Optional[MenuEntryModel] = None

    class MenuWrite(BaseModel):
        date: str
        audience: str = "products"
        entries: Optional[list[MenuEntryModel]] = None   # for create
        changes: Optional[list[MenuChange]] = None       # for modify

    @api.post("/menu", status_code=201)
    def create_menu(body: MenuWrite, request: Request):
        actor = actor_of(request)
        return core.catalog.create_menu(
            actor, audience=body.audience, date=body.date,
            entries=[e.model_dump() for e in body.entries or []])

    @api.put("/menu")
    def modify_menu(body: MenuWrite, request: Request):
        actor = actor_of(request)
        changes = []
        for change in body.changes or []:
            raw: dict[str, Any] = {"op": change.op}
            if change.item_id is not None:
                raw["item_id"] = change.item_id
            if change.entry is not None:
                raw["entry"] = change.entry.model_dump()
            changes.append(raw)
        return core.catalog.modify_menu(actor, date=body.date, changes=changes,
                                        audience=body.audience)

    class PromoItem(BaseModel):
        item_id: str
        promo_price: int

    class PromotionBody(BaseModel):
        name: str
        start: str
        end: str
        item_prices: list[PromoItem]
        confirm: bool = True

    @api.get("/promotions")
    def promotions(request: Request, supplier: Optional[str] = None):
        actor_of(request)
        return {"promotions": core.catalog.promotions(supplier)}

    @api.post("/promotions", status_code=201)
    def define_promotion(body: PromotionBody, request: Request):
        actor = actor_of(request)
        return core.catalog.define_promotion(
            actor, name=body.name, start=body.start, end=body.end,
            item_prices=[i.model_dump() for i in body.item_prices],
            confirm=body.confirm)

    class PromotionEdit(BaseModel):
        item_prices: list[PromoItem]
        confirm: bool = True

    @api.patch("/promotions/{promo_id}")
    def edit_promotion(promo_id: int, body: PromotionEdit, request: Request):
        actor = actor_of(request)
        return core.catalog.edit_promotion(
            actor, promo_id, item_prices=[i.model_dump() for i in body.item_prices],
            confirm=body.confirm)

    # ---- ordering -------------------------------------------------------------------

    class OrderLineModel(BaseModel):
        item_id: str
        qty: int

    class DeliveryModel(BaseModel):
        mode: str
        slot: Optional[str] = None
        location: Optional[str] = None
        draft_holder: Optional[str] = None

    class ProductOrderBody(BaseModel):
        lines: list[OrderLineModel]
        date: str
        delivery: DeliveryModel
        payment_method: str = "card"

    def _delivery_dict(model: DeliveryModel) -> dict:
        raw = {"mode": model.mode}
        if model.slot is not None:
            raw["slot"] = model.slot
        if model.location is not None:
            raw["location"] = model.location
        if model.draft_holder is not None:
            raw["draft_holder"] = model.draft_holder
        return raw

    @api.post("/orders/products", status_code=201)
    def place_product_order(body: ProductOrderBody, request: Request):
        actor = actor_of(request)
        return core.ordering.place_product_order(
            actor, lines=[l.model_dump() for l in body.lines], date=body.date,
            delivery=_delivery_dict(body.delivery), payment_method=body.payment_method)

    @api.post("/orders/products/quote")
    def quote_product_order(body: ProductOrderBody, request: Request):
        actor_of(request)
        breakdown = core.ordering.quote_product_order(
            lines=[l.model_dump() for l in body.lines], date=body.date,
            delivery=_delivery_dict(body.delivery))
        return {"breakdown": breakdown.to_record()}

    class PremisesModel(BaseModel):
        square_feet: int
        rooms: int
        floors: int
        surface_kind: str
        area_kind: str

    class ServiceOrderBody(BaseModel):
        services: list[str]
        date: str
        time: str = "09:00"
        location: str = ""
        premises: PremisesModel
        payment_method: str = "card"
        contracted: bool = False

    @api.post("/orders/services", status_code=201)
    def place_service_order(body: ServiceOrderBody, request: Request):
        actor = actor_of(request)
        return core.ordering.place_service_order(
            actor, services=body.services, date=body.date, time=body.time,
            location=body.location, premises=body.premises.model_dump(),
            payment_method=body.payment_method, contracted=body.contracted)

    @api.post("/orders/services/quote")
    def quote_service_order(body: ServiceOrderBody, request: Request):
        actor_of(request)
        return core.ordering.quote_service_order(
            services=body.services, date=body.date,
            premises=body.premises.model_dump())

    @api.get("/orders")
    def order_history(request: Request, kind: str = "product"):
        actor = actor_of(request)
        return {"orders": core.ordering.order_history(actor, kind)}

    @api.get("/orders/recover")
    def recover_incomplete(request: Request):
        actor = actor_of(request)
        return {"draft": core.ordering.recover_incomplete(actor)}

    class DraftBody(BaseModel):
        payload: dict

    @api.put("/orders/draft")
    def save_draft(body: DraftBody, request: Request):
        actor = actor_of(request)
        return core.ordering.save_draft(actor, body.payload)

    class AmendBody(BaseModel):
        lines: Optional[list[OrderLineModel]] = None
        services: Optional[list[str]] = None
        delivery: Optional[DeliveryModel] = None

    @api.post("/orders/{order_ref}/amend")
    def amend_order(order_ref: str, body: AmendBody, request: Request):
        actor = actor_of(request)
        action: dict[str, Any] = {"type": "amend"}
        if body.lines is not None:
            action["lines"] = [l.model_dump() for l in body.lines]
        if body.services is not None:
            action["services"] = body.services
        if body.delivery is not None:
            action["delivery"] = _delivery_dict(body.delivery)
        return core.ordering.amend_or_cancel(actor, order_ref, action)

    @api.post("/orders/{order_ref}/cancel")
    def cancel_order(order_ref: str, request: Request):
        actor = actor_of(request)
        return core.ordering.amend_or_cancel(actor, order_ref, {"type": "cancel"})

    class StatusBody(BaseModel):
        status: str

    @api.post("/orders/{order_ref}/status")
    def set_order_status(order_ref: str, body: StatusBody, request: Request):
        actor = actor_of(request)
        return core.ordering.set_status(actor, order_ref, body.status)

    class ReorderBody(BaseModel):
        date: str

    @api.post("/orders/{order_ref}/reorder")
    def reorder_previous(order_ref: str, body: ReorderBody, request: Request):
        actor = actor_of(request)
        return core.ordering.reorder_previous(actor, order_ref, body.date)

    @api.get("/orders/{order_ref}")
    def get_order(order_ref: str, request: Request):
        actor = actor_of(request)
        return core.ordering.get_order(actor, order_ref)

    # ---- scheduling ---------------------------------------------------------------------

    @api.get("/delivery-times")
    def delivery_times(date: str, request: Request):
        actor_of(request)
        return {"date": date, "times": core.scheduling.available_delivery_times(date)}

    class ShiftBody(BaseModel):
        date: str
        start: str
        end: str
        staff: list[int]
        supervisor_id: int

    @api.post("/shifts", status_code=201)
    def create_shift(body: ShiftBody, request: Request):
        actor = actor_of(request)
        if actor["role"] not in ("director", "administrator"):
            raise DeniedError("shifts are planned by management", rule_id="BR18")
        return core.scheduling.create_shift(**body.model_dump())

    @api.get("/shifts")
    def shifts(date: str, request: Request):
        actor = actor_of(request)
        if actor["role"] not in ("director", "administrator", "supervisor"):
            raise DeniedError("shift plans are staff-facing")
        out = []
        for shift in core.scheduling.shifts_for_date(date):
            shift["used_minutes"] = core.scheduling.used_minutes(shift["id"])
            out.append(shift)
        return {"shifts": out}

    @api.get("/rotors")
    def rotor(request: Request):
        actor = actor_of(request)
        if actor["role"] not in EMPLOYEE_ROLES:
            raise DeniedError("rotors exist for employees")
        return {"shifts": core.scheduling.rotor_for(actor["id"])}

    # ---- sheets ------------------------------------------------------------------------

    class AttendanceRow(BaseModel):
        employee_id: int
        reporting_time: str
        finishing_time: str

    class AttendanceBody(BaseModel):
        shift_id: int
        rows: list[AttendanceRow]

    @api.post("/sheets/attendance", status_code=201)
    def populate_attendance(body: AttendanceBody, request: Request):
        actor = actor_of(request)
        return core.fieldops.populate_attendance(
            actor, body.shift_id, [r.model_dump() for r in body.rows])

    class InventoryLine(BaseModel):
        item_id: str
        issued: int
        returned: int

    class InventoryBody(BaseModel):
        shift_id: int
        lines: list[InventoryLine]
        reopen: bool = False

    @api.post("/sheets/inventory", status_code=201)
    def populate_inventory(body: InventoryBody, request: Request):
        actor = actor_of(request)
        return core.fieldops.populate_inventory(
            actor, body.shift_id, [l.model_dump() for l in body.lines],
            reopen=body.reopen)

    class InventoryPreviewBody(BaseModel):
        lines: list[InventoryLine]

    @api.post("/sheets/inventory/preview")
    def preview_inventory(body: InventoryPreviewBody, request: Request):
        actor_of(request)
        return {"lines": core.fieldops.preview_inventory(
            [l.model_dump() for l in body.lines])}

    @api.get("/sheets/{kind}/{shift_id}")
    def recall_sheet(kind: str, shift_id: int, request: Request):
        actor = actor_of(request)
        return core.fieldops.recall_sheet(actor, shift_id, kind)

    # ---- ratings ------------------------------------------------------------------------

    @api.get("/ratings/unrated-jobs")
    def unrated_jobs(request: Request):
        actor = actor_of(request)
        jobs = core.ratings.unrated_jobs(actor)
        out: dict[str, Any] = {"jobs": jobs}
        if not jobs:
            out["notice"] = "there are no completed jobs to be rated"
        return out

    class ItemScore(BaseModel):
        criterion: str
        score: int

    class JobRatingBody(BaseModel):
        job_id: int
        itemized: list[ItemScore]

    @api.post("/ratings/jobs", status_code=201)
    def rate_job(body: JobRatingBody, request: Request):
        actor = actor_of(request)
        return core.ratings.rate_job(actor, body.job_id,
                                     [i.model_dump() for i in body.itemized])

    class RatingDraftBody(BaseModel):
        form: dict

    @api.put("/ratings/drafts/{job_id}")
    def save_rating_draft(job_id: int, body: RatingDraftBody, request: Request):
        actor = actor_of(request)
        return core.ratings.save_rating_draft(actor, job_id, body.form)

    @api.get("/ratings/drafts/{job_id}")
    def load_rating_draft(job_id: int, request: Request):
        actor = actor_of(request)
        return {"draft": core.ratings.load_rating_draft(actor, job_id)}

    class EmployeeRatingBody(BaseModel):
        employee_id: int
        shift_id: int
        score: int

    @api.post("/ratings/employees", status_code=201)
    def rate_employee(body: EmployeeRatingBody, request: Request):
        actor = actor_of(request)
        return core.ratings.rate_employee(actor, employee_id=body.employee_id,
                                          shift_id=body.shift_id, score=body.score)

    @api.get("/ratings/employees/{employee_id}")
    def employee_ratings(employee_id: int, request: Request):
        actor = actor_of(request)
        return {"ratings": core.ratings.ratings_for_employee(actor, employee_id)}

    @api.get("/rankings")
    def rankings(start: str, end: str, request: Request):
        actor = actor_of(request)
        if actor["role"] not in ("director", "administrator", "supervisor"):
            raise DeniedError("rankings are a management view")
        return {"ranking": core.ratings.rank_employees({"start": start, "end": end})}

    @api.get("/appeals")
    def list_appeals(request: Request, resolution: Optional[str] = None):
        actor = actor_of(request)
        return {"appeals": core.ratings.appeals(actor, resolution)}

    class AppealBody(BaseModel):
        rating_id: int
        reason: str

    @api.post("/appeals", status_code=201)
    def appeal_rating(body: AppealBody, request: Request):
        actor = actor_of(request)
        return core.ratings.appeal_rating(actor, body.rating_id, body.reason)

    class ResolveBody(BaseModel):
        decision: str
        new_score: Optional[int] = None

    @api.post("/appeals/{appeal_id}/resolve")
    def resolve_appeal(appeal_id: int, body: ResolveBody, request: Request):
        actor = actor_of(request)
        return core.ratings.resolve_appeal(actor, appeal_id, decision=body.decision,
                                           new_score=body.new_score)

    # ---- reports -------------------------------------------------------------------------

    class ReportBody(BaseModel):
        month: Optional[str] = None
        week: Optional[str] = None
        day: Optional[str] = None
        descriptor: Optional[dict] = None

    @api.post("/reports/{category}", status_code=201)
    def run_report(category: str, body: ReportBody, request: Request):
        actor = actor_of(request)
        if category == "cash_flow":
            return core.reporting.cash_flow(actor, body.month or "")
        if category == "productivity":
            return core.reporting.productivity_report(actor, body.week or "")
        if category == "inventory_summary":
            return core.reporting.inventory_summary(
                actor, body.day or core.clock.today().isoformat())
        if category == "adhoc":
            return core.reporting.adhoc(actor, body.descriptor or {})
        raise ValidationError(f"unknown report category {category!r}")

    @api.get("/reports/history")
    def report_history(request: Request):
        actor = actor_of(request)
        return {"reports": core.reporting.report_history(actor)}

    @api.get("/reports/{report_id}")
    def get_report(report_id: int, request: Request):
        actor = actor_of(request)
        return core.reporting.get_report(actor, report_id)

    class ExportBody(BaseModel):
        format: str
        email_to: Optional[str] = None

    @api.post("/reports/{report_id}/export")
    def export_report(report_id: int, body: ExportBody, request: Request):
        actor = actor_of(request)
        return core.reporting.export(actor, report_id, format=body.format,
                                     email_to=body.email_to)

    # ---- analytics -----------------------------------------------------------------------

    class LoopBody(BaseModel):
        demand: Any = Field(description="constant number or list of values")
        f0: float
        gain: float
        sensitivity: float = 0.0
        review_period: int = 1
        noise_sigma: float = 0.0
        seed: Optional[int] = None
        horizon: Optional[int] = None

    @api.post("/analytics/loop")
    def analytics_loop(body: LoopBody, request: Request):
        _require_analytics(actor_of(request))
        params = LoopParams(gain=body.gain, sensitivity=body.sensitivity,
                            review_period=body.review_period,
                            noise_sigma=body.noise_sigma, seed=body.seed)
        trace = simulate_loop(body.demand, body.f0, params, horizon=body.horizon)
        return trace.to_table()

    class StakeholderModel(BaseModel):
        name: str
        base_states: list[str] = []
        needs: list[str] = []
        outputs: list[str] = []

    class CommunityBody(BaseModel):
        stakeholders: list[StakeholderModel]
        expand_states: bool = False
        hub: Optional[str] = None
        threshold: Optional[float] = None
        utilities: Optional[dict[str, list[float]]] = None  # "a--b" -> [utility, cost]

    @api.post("/analytics/community")
    def analytics_community(body: CommunityBody, request: Request):
        _require_analytics(actor_of(request))
        stakeholders = [Stakeholder.of(s.name, states=s.base_states, needs=s.needs,
                                       outputs=s.outputs) for s in body.stakeholders]
        graph = derive_circuits(stakeholders, expand_states=body.expand_states)
        out: dict[str, Any] = {
            "possible_circuits": circuit_count(len(graph.participants)),
            "graph": graph.to_record(),
        }
        if body.utilities:
            from ..analytics.community import Circuit
            priced = []
            for c in graph.circuits:
                pair = body.utilities.get(f"{c.a}--{c.b}") or body.utilities.get(f"{c.b}--{c.a}")
                priced.append(Circuit(c.a, c.b, c.flows, pair[0], pair[1]) if pair else c)
            graph.circuits = priced
        if body.threshold is not None:
            selection = select_circuits(graph, body.threshold)
            out["selected"] = selection["selected"].to_record()
            out["deferred"] = selection["deferred"]
        if body.hub:
            out["aggregated"] = aggregate_topology(graph, body.hub).to_record()
        return out

    class PowerlawBody(BaseModel):
        samples: Optional[list[list[float]]] = None       # [[value, count], ...]
        ranked_values: Optional[list[float]] = None       # descending
        head_fraction: float = 0.2

    @api.post("/analytics/powerlaw")
    def analytics_powerlaw(body: PowerlawBody, request: Request):
        _require_analytics(actor_of(request))
        out: dict[str, Any] = {}
        if body.samples:
            fit = fit_power_law([(v, c) for v, c in body.samples])
            out["fit"] = {"c": fit.c, "k": fit.k, "r_squared": fit.r_squared,
                          "power_law": fit.power_law, "points_used": fit.points_used}
        if body.ranked_values:
            shares = tail_share(body.ranked_values, body.head_fraction,
                                critical_head=core.config.critical_mass_head_fraction,
                                critical_dominance=core.config.critical_mass_dominance)
            out["shares"] = shares.to_record()
        if not out:
            raise ValidationError("provide samples and/or ranked_values")
        return out

    def _require_analytics(actor: dict) -> None:
        if actor["role"] not in ("director", "administrator"):
            raise DeniedError("analytics are a management tool", rule_id="BR18")

    # ---- share and operations ------------------------------------------------------------

    class ShareBody(BaseModel):
        resource_kind: str
        resource_id: str
        target: str

    @api.post("/share", status_code=201)
    def share(body: ShareBody, request: Request):
        actor = actor_of(request)
        return core.webhooks.share(actor, resource_kind=body.resource_kind,
                                   resource_id=body.resource_id, target=body.target)

    @api.post("/outbox/deliver")
    def deliver_outbox(request: Request):
        actor = actor_of(request)
        if actor["role"] not in ("director", "administrator"):
            raise DeniedError("outbox delivery is an operations action", rule_id="BR18")
        return core.deliver_outbox()

    @api.get("/outbox")
    def outbox_messages(request: Request, state: Optional[str] = None):
        actor = actor_of(request)
        if actor["role"] not in ("director", "administrator"):
            raise DeniedError("the outbox is an operations view", rule_id="BR18")
        return {"messages": core.outbox.messages(state)}

    return api
