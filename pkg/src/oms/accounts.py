"""Account lifecycle and authentication.

Covers employee and customer account creation, activation, role changes,
suspension windows, deletion, the three-strike login lockout, the 21-day
password-age gate, and opaque 128-bit session tokens with per-session
anti-forgery tokens. All credential checks happen here and nowhere else.
"""

from __future__ import annotations

import hashlib
import html
import secrets
from datetime import date, datetime, timedelta
from typing import Optional

from .clock import Clock
from .config import AppConfig
from .domain.rules import check_rule, Allow, Deny
from .errors import (AuthenticationError, DeniedError, NotFoundError, ValidationError)
from .outbox import Failpoints, Outbox
from .store import AuditLog, Store, Transaction

ROLES = ("director", "administrator", "supervisor", "cleaning_staff", "customer", "supplier")
EMPLOYEE_ROLES = ("director", "administrator", "supervisor", "cleaning_staff")
STATES = ("pending_activation", "active", "suspended", "deleted")


def _hash_password(password: str, salt: str, iterations: int) -> str:
    digest = hashlib.pbkdf2_hmac("sha256", password.encode("utf-8"),
                                 bytes.fromhex(salt), iterations)
    return digest.hex()


class AccountService:
    def __init__(self, store: Store, clock: Clock, config: AppConfig,
                 outbox: Outbox, audit: AuditLog, failpoints: Failpoints):
        self._store = store
        self._clock = clock
        self._config = config
        self._outbox = outbox
        self._audit = audit
        self._failpoints = failpoints

    # -- creation ----------------------------------------------------------

    def create_employee(self, actor: dict, *, first_name: str, surname: str,
                        role: str, department: str, recruitment_no: str,
                        email: str = "", director_authorization: bool = False) -> dict:
        """Director/administrator provisions an employee account.

        Username is the first letter of the first name joined to the surname,
        lowercased; collisions get the smallest free integer suffix. The
        provisional password is the recruitment number and must be changed at
        first login. New accounts wait in the idle pane until activated.
        """
        self._require_account_management(actor, director_authorization)
        if role not in EMPLOYEE_ROLES:
            raise ValidationError(f"unknown employee role {role!r}")
        if not first_name or not surname or not recruitment_no:
            raise ValidationError("first name, surname and recruitment number are required")
        for value, what in ((first_name, "first name"), (surname, "surname")):
            if any(ch in "<>&\"'" for ch in value):
                raise ValidationError(f"{what} may not contain markup characters")
        department = html.escape(department)

        def create(txn: Transaction) -> dict:
            username = self._free_username(txn, (first_name[0] + surname).lower().replace(" ", ""))
            account = self._new_account(
                txn, username=username, role=role, email=email,
                names={"first_name": first_name, "surname": surname},
                department=department, recruitment_no=recruitment_no,
                password=recruitment_no,
            )
            self._failpoints.hit("account_create.store")
            txn.put(f"account:{account['id']}", account)
            txn.put(f"username:{username}", {"account_id": account["id"]})
            self._failpoints.hit("account_create.confirm")
            self._audit.append(txn, actor=actor["username"], action="account.create",
                               entity=f"account:{account['id']}",
                               timestamp=self._clock.now().isoformat(), after=account)
            return account

        return _public(self._store.run(create))

    def create_customer(self, *, email: str, email_confirm: str,
                        payment_details: Optional[str] = None) -> dict:
        """Customer self-service signup: stored pending activation, and an
        activation password is queued to the given address."""
        if not email:
            raise ValidationError("email is required")
        if email != email_confirm:
            raise ValidationError("the emails do not match", details={"retry": True})

        activation_password = secrets.token_urlsafe(9)

        def create(txn: Transaction) -> dict:
            if txn.get(f"username:{email}") is not None:
                raise ValidationError("an account already exists for this email")
            account = self._new_account(
                txn, username=email, role="customer", email=email,
                names={}, department="", recruitment_no="",
                password=activation_password,
                payment_details=_redact_payment(payment_details),
            )
            self._failpoints.hit("account_create.store")
            txn.put(f"account:{account['id']}", account)
            txn.put(f"username:{email}", {"account_id": account["id"]})
            self._outbox.queue(txn, recipient=email, template="Activation",
                               payload={"activation_password": activation_password})
            self._failpoints.hit("account_create.confirm")
            self._audit.append(txn, actor=email, action="account.create",
                               entity=f"account:{account['id']}",
                               timestamp=self._clock.now().isoformat(), after=account)
            return account

        return _public(self._store.run(create))

    def _new_account(self, txn: Transaction, *, username: str, role: str, email: str,
                     names: dict, department: str, recruitment_no: str, password: str,
                     payment_details: Optional[str] = None) -> dict:
        account_id = txn.next_seq("account")
        salt = secrets.token_hex(16)
        iterations = self._config.pbkdf2_iterations
        return {
            "id": account_id,
            "username": username,
            "role": role,
            "state": "pending_activation",
            "suspension": None,
            "email": email,
            "names": names,
            "department": department,
            "recruitment_no": recruitment_no,
            "payment_details": payment_details,
            "password_salt": salt,
            "password_iterations": iterations,
            "password_hash": _hash_password(password, salt, iterations),
            "password_set_at": self._clock.now().isoformat(),
            "must_change_password": True,
            "failed_attempts": 0,
            "locked": False,
            "created_at": self._clock.now().isoformat(),
        }

    def _free_username(self, txn: Transaction, base: str) -> str:
        if txn.get(f"username:{base}") is None:
            return base
        suffix = 2
        while txn.get(f"username:{base}{suffix}") is not None:
            suffix += 1
        return f"{base}{suffix}"

    # -- authentication ------------------------------------------------------

    def authenticate(self, username: str, password: str) -> dict:
        """Verify credentials and issue a session.

        Exactly three consecutive failures lock the account (each one is
        audited); success resets the counter. A stale password (older than
        the policy window) or a provisional password yields a session
        restricted to password changes.
        """
        now = self._clock.now()
        record = self._account_by_username(username)
        if record is None or record["state"] == "deleted":
            raise AuthenticationError("account not found")
        self._expire_suspension(record)
        if record["state"] == "suspended":
            raise DeniedError("account is suspended", rule_id="BR2")
        if record["locked"]:
            raise AuthenticationError("account locked after repeated failures")

        supplied = _hash_password(password, record["password_salt"],
                                  record["password_iterations"])
        if not secrets.compare_digest(supplied, record["password_hash"]):
            self._count_failure(record, now)
            raise AuthenticationError("invalid credentials")

        def succeed(txn: Transaction) -> dict:
            account = txn.get(f"account:{record['id']}")
            account["failed_attempts"] = 0
            if account["state"] == "pending_activation":
                account["state"] = "active"
            txn.put(f"account:{account['id']}", account)
            token = secrets.token_hex(16)   # 128-bit opaque session token
            session = {
                "token": token,
                "csrf_token": secrets.token_hex(16),
                "account_id": account["id"],
                "created_at": now.isoformat(),
                "last_used": now.isoformat(),
                "restricted": self._needs_password_change(account, now),
            }
            txn.put(f"session:{token}", session)
            return session

        return self._store.run(succeed)

    def _count_failure(self, record: dict, now: datetime) -> None:
        def bump(txn: Transaction):
            account = txn.get(f"account:{record['id']}")
            account["failed_attempts"] = min(account["failed_attempts"] + 1,
                                             self._config.max_login_attempts)
            action = "auth.failed"
            if account["failed_attempts"] >= self._config.max_login_attempts:
                account["locked"] = True
                action = "auth.locked"
            txn.put(f"account:{account['id']}", account)
            self._audit.append(txn, actor=account["username"], action=action,
                               entity=f"account:{account['id']}",
                               timestamp=now.isoformat())
        self._store.run(bump)

    def _needs_password_change(self, account: dict, now: datetime) -> bool:
        if account["must_change_password"]:
            return True
        set_at = datetime.fromisoformat(account["password_set_at"])
        return (now - set_at) > timedelta(days=self._config.password_max_age_days)

    def resolve_session(self, token: Optional[str]) -> tuple[dict, dict]:
        """Map a bearer token to (session, account) or fail with 401 semantics."""
        if not token:
            raise AuthenticationError("login required")
        session = self._store.get(f"session:{token}")
        if session is None:
            raise AuthenticationError("unknown or expired session")
        now = self._clock.now()
        idle = now - datetime.fromisoformat(session["last_used"])
        if idle > timedelta(minutes=self._config.session_idle_minutes):
            self._drop_session(token)
            raise AuthenticationError("session expired")
        account = self._store.get(f"account:{session['account_id']}")
        if account is None or account["state"] == "deleted":
            raise AuthenticationError("account no longer valid")
        self._expire_suspension(account)
        if account["state"] == "suspended":
            raise DeniedError("account is suspended", rule_id="BR2")
        if account["locked"]:
            raise AuthenticationError("account locked")

        # coarse idle tracking: rewriting last_used on every request would
        # put a write on the hot path for no extra precision
        if idle > timedelta(seconds=30):
            def touch(txn: Transaction):
                live = txn.get(f"session:{token}")
                if live is not None:
                    live["last_used"] = now.isoformat()
                    txn.put(f"session:{token}", live)
            self._store.run(touch)
        return session, account

    def logout(self, token: str) -> None:
        self._drop_session(token)

    def _drop_session(self, token: str) -> None:
        def drop(txn: Transaction):
            txn.delete(f"session:{token}")
        self._store.run(drop)

    def change_password(self, token: str, old_password: str, new_password: str) -> dict:
        session = self._store.get(f"session:{token}")
        if session is None:
            raise AuthenticationError("login required")
        account = self._store.get(f"account:{session['account_id']}")
        supplied = _hash_password(old_password, account["password_salt"],
                                  account["password_iterations"])
        if not secrets.compare_digest(supplied, account["password_hash"]):
            raise AuthenticationError("current password is wrong")
        if not new_password or new_password == old_password:
            raise ValidationError("new password must differ from the old one")

        def apply(txn: Transaction):
            live = txn.get(f"account:{account['id']}")
            salt = secrets.token_hex(16)
            live["password_salt"] = salt
            live["password_hash"] = _hash_password(new_password, salt,
                                                   live["password_iterations"])
            live["password_set_at"] = self._clock.now().isoformat()
            live["must_change_password"] = False
            txn.put(f"account:{live['id']}", live)
            sess = txn.get(f"session:{token}")
            sess["restricted"] = False
            txn.put(f"session:{token}", sess)
            self._audit.append(txn, actor=live["username"], action="account.password_change",
                               entity=f"account:{live['id']}",
                               timestamp=self._clock.now().isoformat())
            return live
        return _public(self._store.run(apply))

    # -- lifecycle -----------------------------------------------------------

    def modify_account(self, actor: dict, target_id: int, *, new_role: Optional[str] = None,
                       new_department: Optional[str] = None,
                       director_authorization: bool = False) -> dict:
        self._require_account_management(actor, director_authorization)
        if new_role is not None and new_role not in ROLES:
            raise ValidationError(f"unknown role {new_role!r}")

        def apply(txn: Transaction) -> dict:
            account = txn.get(f"account:{target_id}")
            if account is None or account["state"] == "deleted":
                raise NotFoundError(f"no account {target_id}")
            before = dict(account)
            self._failpoints.hit("account_modify.save")
            if new_role is not None:
                account["role"] = new_role
            if new_department is not None:
                account["department"] = html.escape(new_department)
            txn.put(f"account:{target_id}", account)
            self._failpoints.hit("account_modify.confirm")
            self._audit.append(txn, actor=actor["username"], action="account.modify",
                               entity=f"account:{target_id}",
                               timestamp=self._clock.now().isoformat(),
                               before=before, after=account)
            return account

        return _public(self._store.run(apply))

    def suspend_account(self, actor: dict, target_id: int, *, start: str, end: str,
                        director_authorization: bool = False, confirm: bool = True) -> dict:
        """Suspend for [start, end]; permissions return the day after end."""
        self._require_account_management(actor, director_authorization)
        if not confirm:
            raise ValidationError("suspension requires explicit confirmation")
        start_d, end_d = date.fromisoformat(start), date.fromisoformat(end)
        if end_d < start_d:
            raise ValidationError("suspension end date precedes start date")

        def apply(txn: Transaction) -> dict:
            account = txn.get(f"account:{target_id}")
            if account is None or account["state"] == "deleted":
                raise NotFoundError(f"no account {target_id}")
            before = dict(account)
            self._failpoints.hit("account_suspend.save")
            account["state"] = "suspended"
            account["suspension"] = {"start": start, "end": end}
            txn.put(f"account:{target_id}", account)
            self._failpoints.hit("account_suspend.revoke_sessions")
            self._revoke_sessions(txn, target_id)
            self._failpoints.hit("account_suspend.confirm")
            self._audit.append(txn, actor=actor["username"], action="account.suspend",
                               entity=f"account:{target_id}",
                               timestamp=self._clock.now().isoformat(),
                               before=before, after=account)
            return account

        return _public(self._store.run(apply))

    def delete_account(self, actor: dict, target_id: int, *,
                       director_authorization: bool = False) -> None:
        """Delete an account (irreversible for login; audit trail retained).

        Customers may close their own account; anything else is a
        director/administrator action.
        """
        target = self._store.get(f"account:{target_id}")
        if target is None or target["state"] == "deleted":
            raise NotFoundError(f"no account {target_id}")
        self_service = actor["id"] == target_id and actor["role"] == "customer"
        if not self_service:
            self._require_account_management(actor, director_authorization)

        def apply(txn: Transaction) -> None:
            account = txn.get(f"account:{target_id}")
            before = dict(account)
            self._failpoints.hit("account_delete.save")
            account["state"] = "deleted"
            txn.put(f"account:{target_id}", account)
            txn.delete(f"username:{account['username']}")
            self._failpoints.hit("account_delete.revoke_sessions")
            self._revoke_sessions(txn, target_id)
            self._failpoints.hit("account_delete.confirm")
            self._audit.append(txn, actor=actor["username"], action="account.delete",
                               entity=f"account:{target_id}",
                               timestamp=self._clock.now().isoformat(), before=before)

        self._store.run(apply)

    def _revoke_sessions(self, txn: Transaction, account_id: int) -> None:
        for key in txn.keys("session:"):
            session = txn.get(key)
            if session and session["account_id"] == account_id:
                txn.delete(key)

    def _expire_suspension(self, account: dict) -> None:
        if account["state"] != "suspended" or not account["suspension"]:
            return
        if self._clock.today() > date.fromisoformat(account["suspension"]["end"]):
            def reactivate(txn: Transaction):
                live = txn.get(f"account:{account['id']}")
                if live and live["state"] == "suspended":
                    live["state"] = "active"
                    live["suspension"] = None
                    txn.put(f"account:{live['id']}", live)
            self._store.run(reactivate)
            account["state"] = "active"
            account["suspension"] = None

    def _require_account_management(self, actor: dict, director_authorization: bool) -> None:
        outcome = check_rule("BR18", {"actor_role": actor["role"]})
        if isinstance(outcome, Deny):
            raise DeniedError(outcome.reason, rule_id="BR18")
        outcome = check_rule("BR19", {"actor_role": actor["role"],
                                      "director_authorization": director_authorization})
        if not isinstance(outcome, Allow):
            raise DeniedError(getattr(outcome, "reason", "not authorized"), rule_id="BR19")

    # -- queries ---------------------------------------------------------------

    def get_account(self, account_id: int) -> dict:
        record = self._store.get(f"account:{account_id}")
        if record is None:
            raise NotFoundError(f"no account {account_id}")
        return _public(record)

    def idle_accounts(self) -> list[dict]:
        """Employee accounts awaiting first activation (the idle pane)."""
        snap = self._store.snapshot()
        out = []
        for record in snap.values("account:"):
            if record["state"] == "pending_activation" and record["role"] in EMPLOYEE_ROLES:
                out.append(_public(record))
        return out

    def _account_by_username(self, username: str) -> Optional[dict]:
        index = self._store.get(f"username:{username}")
        if index is None:
            return None
        return self._store.get(f"account:{index['account_id']}")


_SECRET_FIELDS = ("password_hash", "password_salt", "password_iterations", "payment_details")


def _public(account: dict) -> dict:
    """Account view with credential material stripped; never leaves the module
    with secrets attached."""
    return {k: v for k, v in account.items() if k not in _SECRET_FIELDS}


def _redact_payment(details: Optional[str]) -> Optional[dict]:
    """Payment instruments are never stored in the clear: keep a fingerprint
    and the display tail only (settlement itself is simulated)."""
    if details is None:
        return None
    digest = hashlib.sha256(details.encode("utf-8")).hexdigest()[:16]
    return {"fingerprint": digest, "last4": details[-4:]}
