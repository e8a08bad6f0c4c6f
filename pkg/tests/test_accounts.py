"""Account lifecycle, authentication, lockout, suspension, and rollback."""

from datetime import timedelta

import pytest

from oms.errors import (AuthenticationError, DeniedError, InjectedFault,
                        ValidationError)

from conftest import make_app


class TestCreation:
    def test_employee_username_from_initial_and_surname(self, app, world, director):
        account = app.accounts.create_employee(
            director, first_name="Jane", surname="Doe", role="cleaning_staff",
            department="operations", recruitment_no="00123")
        assert account["username"] == "jdoe"
        assert account["state"] == "pending_activation"

    def test_username_collision_gets_integer_suffix(self, app, world, director):
        first = app.accounts.create_employee(
            director, first_name="Jane", surname="Doe", role="cleaning_staff",
            department="ops", recruitment_no="00123")
        second = app.accounts.create_employee(
            director, first_name="John", surname="Doe", role="cleaning_staff",
            department="ops", recruitment_no="00124")
        third = app.accounts.create_employee(
            director, first_name="Jean", surname="Doe", role="cleaning_staff",
            department="ops", recruitment_no="00125")
        assert [first["username"], second["username"], third["username"]] == \
            ["jdoe", "jdoe2", "jdoe3"]

    def test_provisional_password_is_recruitment_number(self, app, world, director):
        app.accounts.create_employee(
            director, first_name="Jane", surname="Doe", role="cleaning_staff",
            department="ops", recruitment_no="00123")
        session = app.accounts.authenticate("jdoe", "00123")
        assert session["restricted"] is True  # provisional: change it first

    def test_new_employee_waits_in_idle_pane_until_first_login(self, app, world, director):
        app.accounts.create_employee(
            director, first_name="Idle", surname="Person", role="cleaning_staff",
            department="ops", recruitment_no="00200")
        assert any(a["username"] == "iperson" for a in app.accounts.idle_accounts())
        app.accounts.authenticate("iperson", "00200")
        assert not any(a["username"] == "iperson" for a in app.accounts.idle_accounts())

    def test_customer_email_mismatch_reprompts(self, app, world):
        with pytest.raises(ValidationError) as err:
            app.accounts.create_customer(email="a@x", email_confirm="b@x")
        assert "do not match" in err.value.message
        assert err.value.details.get("retry") is True

    def test_customer_activation_mail_queued(self, app, world):
        app.accounts.create_customer(email="new@example.net",
                                     email_confirm="new@example.net")
        activations = [m for m in app.outbox.messages("queued")
                       if m["template"] == "Activation"]
        assert activations and activations[0]["recipient"] == "new@example.net"
        password = activations[0]["payload"]["activation_password"]
        session = app.accounts.authenticate("new@example.net", password)
        assert session["restricted"] is True
        account = app.accounts.get_account(session["account_id"])
        assert account["state"] == "active"

    def test_unauthorized_creator_denied(self, app, world, supervisor):
        with pytest.raises(DeniedError) as err:
            app.accounts.create_employee(
                supervisor, first_name="X", surname="Y", role="cleaning_staff",
                department="ops", recruitment_no="1")
        assert err.value.rule_id == "BR18"

    def test_markup_rejected_in_names(self, app, world, director):
        with pytest.raises(ValidationError):
            app.accounts.create_employee(
                director, first_name="<script>", surname="Doe",
                role="cleaning_staff", department="ops", recruitment_no="9")


class TestAuthentication:
    def test_happy_path_issues_session(self, app, world):
        session = app.accounts.authenticate("dprince", "demo-pass-1")
        assert len(session["token"]) == 32  # 128 bits hex
        assert len(session["csrf_token"]) == 32
        assert session["restricted"] is False

    def test_two_failures_then_success_resets_counter(self, app, world, director):
        for _ in range(2):
            with pytest.raises(AuthenticationError):
                app.accounts.authenticate("dprince", "wrong")
        app.accounts.authenticate("dprince", "demo-pass-1")
        assert app.accounts.get_account(director["id"])["failed_attempts"] == 0

    def test_third_consecutive_failure_locks_and_audits(self, app, world, director):
        for _ in range(3):
            with pytest.raises(AuthenticationError):
                app.accounts.authenticate("dprince", "wrong")
        account = app.accounts.get_account(director["id"])
        assert account["locked"] is True
        assert account["failed_attempts"] == 3
        with pytest.raises(AuthenticationError):
            app.accounts.authenticate("dprince", "demo-pass-1")
        actions = [e["action"] for e in app.audit.entries()]
        assert "auth.locked" in actions and "auth.failed" in actions

    def test_stale_password_restricts_session(self, app, world, clock):
        clock.advance(timedelta(days=22))
        session = app.accounts.authenticate("dprince", "demo-pass-1")
        assert session["restricted"] is True
        app.accounts.change_password(session["token"], "demo-pass-1", "fresh-pass-2")
        session2 = app.accounts.authenticate("dprince", "fresh-pass-2")
        assert session2["restricted"] is False

    def test_password_age_exactly_at_limit_is_fine(self, app, world, clock):
        clock.advance(timedelta(days=21))
        assert app.accounts.authenticate("dprince", "demo-pass-1")["restricted"] is False

    def test_deleted_account_not_found(self, app, world, director, customer):
        app.accounts.delete_account(director, customer["id"])
        with pytest.raises(AuthenticationError) as err:
            app.accounts.authenticate(customer["username"], "demo-pass-1")
        assert "not found" in err.value.message

    def test_session_idle_expiry(self, app, world, clock):
        session = app.accounts.authenticate("dprince", "demo-pass-1")
        clock.advance(timedelta(minutes=31))
        with pytest.raises(AuthenticationError):
            app.accounts.resolve_session(session["token"])


class TestSuspension:
    def test_suspended_window_denies_then_reopens(self, app, world, director,
                                                  customer, clock):
        start = clock.today().isoformat()
        end = (clock.today() + timedelta(days=7)).isoformat()
        app.accounts.suspend_account(director, customer["id"], start=start, end=end)
        with pytest.raises(DeniedError) as err:
            app.accounts.authenticate(customer["username"], "demo-pass-1")
        assert err.value.rule_id == "BR2"
        clock.advance(timedelta(days=7))  # still the last suspended day
        with pytest.raises(DeniedError):
            app.accounts.authenticate(customer["username"], "demo-pass-1")
        clock.advance(timedelta(days=1))  # end + 1: window is right-closed
        assert app.accounts.authenticate(customer["username"], "demo-pass-1")

    def test_suspension_revokes_live_sessions(self, app, world, director, customer):
        session = app.accounts.authenticate(customer["username"], "demo-pass-1")
        app.accounts.suspend_account(director, customer["id"],
                                     start="2026-01-05", end="2026-01-12")
        with pytest.raises(AuthenticationError):
            app.accounts.resolve_session(session["token"])

    def test_end_before_start_rejected(self, app, world, director, customer):
        with pytest.raises(ValidationError):
            app.accounts.suspend_account(director, customer["id"],
                                         start="2026-01-10", end="2026-01-05")

    def test_suspend_requires_confirmation(self, app, world, director, customer):
        with pytest.raises(ValidationError):
            app.accounts.suspend_account(director, customer["id"],
                                         start="2026-01-05", end="2026-01-06",
                                         confirm=False)


class TestModification:
    def test_director_promotes_staff(self, app, world, director, staff):
        updated = app.accounts.modify_account(director, staff[0]["id"],
                                              new_role="supervisor")
        assert updated["role"] == "supervisor"

    def test_admin_without_authorization_denied(self, app, world, staff):
        admin = world["administrator"]
        with pytest.raises(DeniedError) as err:
            app.accounts.modify_account(admin, staff[0]["id"], new_role="supervisor")
        assert err.value.rule_id == "BR19"
        updated = app.accounts.modify_account(admin, staff[0]["id"],
                                              new_role="supervisor",
                                              director_authorization=True)
        assert updated["role"] == "supervisor"

    def test_supervisor_cannot_modify(self, app, world, supervisor, staff):
        with pytest.raises(DeniedError) as err:
            app.accounts.modify_account(supervisor, staff[0]["id"], new_role="director")
        assert err.value.rule_id == "BR18"

    def test_customer_may_close_own_account_only(self, app, world, customer, staff):
        with pytest.raises(DeniedError):
            app.accounts.delete_account(customer, staff[0]["id"])
        app.accounts.delete_account(customer, customer["id"])
        with pytest.raises(AuthenticationError):
            app.accounts.authenticate(customer["username"], "demo-pass-1")

    def test_username_freed_after_delete(self, app, world, director):
        target = app.accounts.create_employee(
            director, first_name="Jane", surname="Doe", role="cleaning_staff",
            department="ops", recruitment_no="1")
        app.accounts.delete_account(director, target["id"])
        fresh = app.accounts.create_employee(
            director, first_name="Jill", surname="Doe", role="cleaning_staff",
            department="ops", recruitment_no="2")
        assert fresh["username"] == "jdoe"


FAILPOINTS = [
    "account_create.store", "account_create.confirm",
    "account_modify.save", "account_modify.confirm",
    "account_suspend.save", "account_suspend.revoke_sessions",
    "account_suspend.confirm",
    "account_delete.save", "account_delete.revoke_sessions",
    "account_delete.confirm",
]


class TestAtomicity:
    @pytest.mark.parametrize("failpoint", FAILPOINTS)
    def test_every_step_failure_rolls_back_completely(self, failpoint):
        app = make_app()
        from oms.seed import seed_demo
        world = seed_demo(app)
        director, customer = world["director"], world["customer"]
        before = app.store.digest()
        app.failpoints.arm(failpoint)
        with pytest.raises(InjectedFault):
            if failpoint.startswith("account_create"):
                app.accounts.create_employee(
                    director, first_name="Jane", surname="Doe",
                    role="cleaning_staff", department="ops", recruitment_no="1")
            elif failpoint.startswith("account_modify"):
                app.accounts.modify_account(director, customer["id"],
                                            new_department="vip")
            elif failpoint.startswith("account_suspend"):
                app.accounts.suspend_account(director, customer["id"],
                                             start="2026-01-05", end="2026-01-06")
            else:
                app.accounts.delete_account(director, customer["id"])
        app.failpoints.clear()
        assert app.store.digest() == before


class TestCredentialHygiene:
    def test_public_views_never_carry_secrets(self, app, world, director):
        for view in (app.accounts.get_account(director["id"]),
                     *app.accounts.idle_accounts()):
            assert "password_hash" not in view
            assert "password_salt" not in view
            assert "payment_details" not in view

    def test_payment_details_stored_redacted(self, app, world):
        app.accounts.create_customer(email="p@x.net", email_confirm="p@x.net",
                                     payment_details="4111111111111111")
        raw = app.store.get("account:%d" % app.store.get("username:p@x.net")["account_id"])
        assert raw["payment_details"] == {"fingerprint": raw["payment_details"]["fingerprint"],
                                          "last4": "1111"}
        assert "4111111111111111" not in str(raw)
