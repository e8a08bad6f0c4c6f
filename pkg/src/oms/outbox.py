"""Transactional message outbox.

Notification emails and webhook posts are queued inside the same transaction
as the domain change they announce, then drained through a pluggable
transport. Delivery is at-least-once with an idempotency key: a message is
sent only from the Queued state, a transport failure re-queues it with a
bumped retry count until the cap, and repeated drains never resend.
"""

from __future__ import annotations

import threading
from typing import Any, Optional, Protocol

from .store import Store, Transaction

TEMPLATES = (
    "OrderConfirm", "OrderProblem", "SupplierOrder", "Receipt",
    "Activation", "ReportExport", "ShareEvent",
)


class Transport(Protocol):
    def send(self, message: dict[str, Any]) -> None: ...


class CapturingTransport:
    """In-memory transport for tests and the demo; optionally fails on demand."""

    def __init__(self):
        self.sent: list[dict[str, Any]] = []
        self.fail_next: int = 0

    def send(self, message: dict[str, Any]) -> None:
        if self.fail_next > 0:
            self.fail_next -= 1
            raise ConnectionError("simulated transport outage")
        self.sent.append(message)


class Outbox:
    def __init__(self, store: Store, *, max_retries: int = 5):
        self._store = store
        self._max_retries = max_retries
        self._drain_lock = threading.Lock()  # drain is single-flight

    def queue(self, txn: Transaction, *, recipient: str, template: str,
              payload: dict[str, Any]) -> int:
        if template not in TEMPLATES:
            raise ValueError(f"unknown outbox template {template!r}")
        msg_id = txn.next_seq("outbox")
        txn.put(f"outbox:{msg_id:012d}", {
            "id": msg_id,
            "idempotency_key": f"msg-{msg_id}",
            "recipient": recipient,
            "template": template,
            "payload": payload,
            "state": "queued",
            "retries": 0,
        })
        return msg_id

    def deliver(self, transport: Transport) -> dict[str, int]:
        """Drain queued messages. Returns counts of sent/failed/dead.

        A crash between send and state update re-sends on the next drain;
        receivers dedupe on the idempotency key.
        """
        with self._drain_lock:
            result = {"sent": 0, "failed": 0, "dead": 0}
            snap = self._store.snapshot()
            for key in snap.keys("outbox:"):
                message = snap.get(key)
                if message["state"] != "queued":
                    continue
                try:
                    transport.send(message)
                except Exception as exc:  # transport errors keep the message
                    result["failed"] += 1
                    self._record_failure(key, str(exc), result)
                else:
                    result["sent"] += 1
                    self._finish(key, "sent")
            return result

    def _finish(self, key: str, state: str) -> None:
        def update(txn: Transaction):
            message = txn.get(key)
            message["state"] = state
            txn.put(key, message)
        self._store.run(update)

    def _record_failure(self, key: str, reason: str, result: dict[str, int]) -> None:
        def update(txn: Transaction):
            message = txn.get(key)
            message["retries"] += 1
            message["last_error"] = reason
            if message["retries"] >= self._max_retries:
                message["state"] = "dead"
                result["dead"] += 1
            else:
                message["state"] = "queued"  # eligible for the next drain
            txn.put(key, message)
        self._store.run(update)

    def messages(self, state: Optional[str] = None) -> list[dict[str, Any]]:
        snap = self._store.snapshot()
        out = [snap.get(k) for k in snap.keys("outbox:")]
        if state is not None:
            out = [m for m in out if m["state"] == state]
        return out


class Failpoints:
    """Named fault-injection points; tests arm them to prove rollback."""

    def __init__(self):
        self._armed: set[str] = set()

    def arm(self, name: str) -> None:
        self._armed.add(name)

    def clear(self) -> None:
        self._armed.clear()

    def hit(self, name: str) -> None:
        if name in self._armed:
            from .errors import InjectedFault
            raise InjectedFault(name)
