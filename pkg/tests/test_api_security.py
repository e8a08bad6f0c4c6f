"""HTTP security posture: the open-route whitelist, anti-forgery on every
mutating route, inert stored text, lockout, and the visibility matrix."""

import pytest
from fastapi.routing import APIRoute
from starlette.testclient import TestClient

from oms.api import create_app
from oms.seed import seed_demo

from conftest import make_app

XSS_CORPUS = [
    "<script>alert(1)</script>",
    "<img src=x onerror=alert(1)>",
    "<svg/onload=alert(1)>",
    "\"'><b>bold</b>",
    "<iframe src='javascript:alert(1)'></iframe>",
]

# the only requests servable without a session
OPEN_ROUTES = {("GET", "/menu"), ("POST", "/accounts"), ("POST", "/auth/login")}


@pytest.fixture
def stack():
    app = make_app()
    world = seed_demo(app)
    client = TestClient(create_app(app), raise_server_exceptions=False)
    return app, world, client


def login(client, username, password="demo-pass-1"):
    response = client.post("/auth/login", json={"username": username,
                                                "password": password})
    assert response.status_code == 200, response.text
    body = response.json()
    return {"Authorization": f"Bearer {body['token']}",
            "X-CSRF-Token": body["csrf_token"]}


def enumerate_routes(api):
    for route in api.routes:
        if isinstance(route, APIRoute):
            for method in route.methods:
                yield method, route.path


class TestOpenRouteWhitelist:
    def test_no_route_serves_anonymous_requests_except_whitelist(self, stack):
        app, world, client = stack
        for method, path in enumerate_routes(client.app):
            url = path.replace("{account_id}", "1").replace("{order_ref}", "1") \
                      .replace("{shift_id}", "1").replace("{kind}", "attendance") \
                      .replace("{promo_id}", "1").replace("{job_id}", "1") \
                      .replace("{employee_id}", "1").replace("{rating_id}", "1") \
                      .replace("{appeal_id}", "1").replace("{report_id}", "1") \
                      .replace("{category}", "cash_flow")
            response = client.request(method, url, params={"date": "2026-01-05",
                                                           "start": "a", "end": "b"},
                                      json={})
            if (method, path) in OPEN_ROUTES:
                assert response.status_code < 500, (method, path, response.text)
            else:
                assert response.status_code in (401, 422), (method, path,
                                                            response.status_code)
                assert not (200 <= response.status_code < 300)

    def test_menu_is_viewable_anonymously(self, stack):
        app, world, client = stack
        response = client.get("/menu", params={"date": world["dates"][0]})
        assert response.status_code == 200
        assert response.json()["entries"]

    def test_customer_account_creation_is_open(self, stack):
        app, world, client = stack
        response = client.post("/accounts", json={
            "kind": "customer", "email": "fresh@x.net", "email_confirm": "fresh@x.net"})
        assert response.status_code == 201

    def test_unauthenticated_error_shape(self, stack):
        app, world, client = stack
        response = client.get("/orders")
        assert response.status_code == 401
        body = response.json()
        assert body["code"] == "unauthenticated"
        assert set(body) >= {"code", "message", "details"}


class TestAntiForgery:
    def test_every_mutating_route_requires_csrf_token(self, stack):
        app, world, client = stack
        headers = login(client, "dprince")
        no_csrf = {"Authorization": headers["Authorization"]}
        exempt = {("POST", "/accounts"), ("POST", "/auth/login")}
        for method, path in enumerate_routes(client.app):
            if method not in ("POST", "PUT", "PATCH", "DELETE"):
                continue
            if (method, path) in exempt:
                continue
            url = path.replace("{account_id}", "9").replace("{order_ref}", "1") \
                      .replace("{shift_id}", "1").replace("{kind}", "attendance") \
                      .replace("{promo_id}", "1").replace("{job_id}", "1") \
                      .replace("{employee_id}", "1").replace("{rating_id}", "1") \
                      .replace("{appeal_id}", "1").replace("{report_id}", "1") \
                      .replace("{category}", "cash_flow")
            response = client.request(method, url, headers=no_csrf, json={})
            assert response.status_code == 403, (method, path, response.status_code)
            assert "anti-forgery" in response.json()["message"]

    def test_wrong_csrf_token_rejected(self, stack):
        app, world, client = stack
        headers = login(client, "dprince")
        headers["X-CSRF-Token"] = "0" * 32
        response = client.post("/reports/cash_flow", headers=headers,
                               json={"month": "2026-01"})
        assert response.status_code == 403

    def test_reads_do_not_need_csrf(self, stack):
        app, world, client = stack
        headers = login(client, "dprince")
        response = client.get("/orders",
                              headers={"Authorization": headers["Authorization"]})
        assert response.status_code == 200


class TestStoredContentIsInert:
    @pytest.mark.parametrize("payload", XSS_CORPUS)
    def test_appeal_reason_roundtrips_encoded(self, stack, payload):
        app, world, client = stack
        supervisor, staff = world["supervisor"], world["staff"]
        shift = app.scheduling.shifts_for_date(world["dates"][0])[0]
        rating = app.ratings.rate_employee(supervisor, employee_id=staff[0]["id"],
                                           shift_id=shift["id"], score=2)
        headers = login(client, staff[0]["username"])
        response = client.post("/appeals", headers=headers,
                               json={"rating_id": rating["id"], "reason": payload})
        assert response.status_code == 201
        stored = response.json()["reason"]
        assert "<" not in stored and ">" not in stored

    @pytest.mark.parametrize("payload", XSS_CORPUS)
    def test_draft_payload_roundtrips_encoded(self, stack, payload):
        app, world, client = stack
        headers = login(client, "pat@example.net")
        put = client.put("/orders/draft", headers=headers,
                         json={"payload": {"kind": "service", "location": payload,
                                           "notes": [payload]}})
        assert put.status_code == 200
        back = client.get("/orders/recover", headers=headers).json()["draft"]
        text = str(back)
        assert "<script" not in text and "onerror" not in text or "&lt;" in text
        assert "<" not in back["payload"]["location"]

    def test_service_location_encoded_end_to_end(self, stack):
        app, world, client = stack
        headers = login(client, "pat@example.net")
        response = client.post("/orders/services", headers=headers, json={
            "services": ["regular-clean"], "date": world["dates"][2],
            "time": "10:00", "location": XSS_CORPUS[0],
            "premises": {"square_feet": 500, "rooms": 2, "floors": 1,
                         "surface_kind": "carpet", "area_kind": "room"},
            "payment_method": "card"})
        assert response.status_code == 201
        assert "<script>" not in response.json()["location"]

    def test_structured_names_reject_markup_outright(self, stack):
        app, world, client = stack
        headers = login(client, "brightsupply")
        response = client.put("/menu", headers=headers, json={
            "date": world["dates"][1], "audience": "products",
            "changes": [{"op": "add", "entry": {
                "item_id": "evil", "name": "<entity>", "unit_price": 1}}]})
        assert response.status_code == 422
        assert "markup" in response.json()["message"]


class TestLockoutOverHttp:
    def test_three_strikes_locks_the_account(self, stack):
        app, world, client = stack
        for _ in range(3):
            response = client.post("/auth/login", json={"username": "lhart",
                                                        "password": "nope"})
            assert response.status_code == 401
        locked = client.post("/auth/login", json={"username": "lhart",
                                                  "password": "demo-pass-1"})
        assert locked.status_code == 401
        assert "locked" in locked.json()["message"]

    def test_two_strikes_then_success_is_fine(self, stack):
        app, world, client = stack
        for _ in range(2):
            client.post("/auth/login", json={"username": "sokafor",
                                             "password": "nope"})
        response = client.post("/auth/login", json={"username": "sokafor",
                                                    "password": "demo-pass-1"})
        assert response.status_code == 200


class TestVisibilityMatrix:
    def test_staff_see_exactly_their_own_ratings(self, stack):
        app, world, client = stack
        supervisor, staff = world["supervisor"], world["staff"]
        shift = app.scheduling.shifts_for_date(world["dates"][0])[0]
        for member in staff[:2]:
            app.ratings.rate_employee(supervisor, employee_id=member["id"],
                                      shift_id=shift["id"], score=3)
        a_headers = login(client, staff[0]["username"])
        own = client.get(f"/ratings/employees/{staff[0]['id']}", headers=a_headers)
        assert own.status_code == 200 and len(own.json()["ratings"]) == 1
        peer = client.get(f"/ratings/employees/{staff[1]['id']}", headers=a_headers)
        assert peer.status_code == 403
        assert peer.json()["rule_id"] == "SE-4"

    def test_staff_rotor_is_own_timetable(self, stack):
        app, world, client = stack
        headers = login(client, world["staff"][0]["username"])
        response = client.get("/rotors", headers=headers)
        assert response.status_code == 200
        for shift in response.json()["shifts"]:
            assert world["staff"][0]["id"] in shift["staff"]

    def test_customer_cannot_run_reports_or_sheets(self, stack):
        app, world, client = stack
        headers = login(client, "pat@example.net")
        assert client.post("/reports/cash_flow", headers=headers,
                           json={"month": "2026-01"}).status_code == 403
        assert client.get("/sheets/attendance/1", headers=headers).status_code == 403


class TestNoCredentialLeaks:
    def test_responses_never_contain_credential_material(self, stack):
        app, world, client = stack
        headers = login(client, "dprince")
        probes = [
            client.get("/accounts/1", headers=headers),
            client.get("/accounts/idle", headers=headers),
            client.get("/orders", headers=headers),
            client.get("/rotors", headers=headers),
            client.post("/auth/login", json={"username": "dprince",
                                             "password": "demo-pass-1"}),
        ]
        for response in probes:
            text = response.text
            for needle in ("password_hash", "password_salt", "pbkdf2",
                           "password_iterations"):
                assert needle not in text

    def test_session_restricted_until_provisional_password_changed(self, stack):
        app, world, client = stack
        director_headers = login(client, "dprince")
        created = client.post("/accounts", headers=director_headers, json={
            "kind": "employee", "first_name": "New", "surname": "Hire",
            "role": "cleaning_staff", "department": "ops",
            "recruitment_no": "31337"})
        assert created.status_code == 201
        fresh = login(client, "nhire", "31337")
        blocked = client.get("/rotors", headers=fresh)
        assert blocked.status_code == 403
        assert blocked.json()["details"]["next"] == "/auth/password"
        changed = client.post("/auth/password", headers=fresh, json={
            "old_password": "31337", "new_password": "better-one-9"})
        assert changed.status_code == 200
        assert client.get("/rotors", headers=fresh).status_code == 200
