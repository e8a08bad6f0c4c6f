"""Share events: posting a product, service, or rating to a configured
external webhook target.

Targets are named in configuration; the payload is HMAC-signed with the
target's shared secret (derived from its URL here, pluggable in deployment)
and delivered through the outbox so a downed endpoint retries with the same
at-least-once guarantees as email."""

from __future__ import annotations

import hashlib
import hmac
import json
from typing import Any

from .clock import Clock
from .config import AppConfig
from .errors import DeniedError, NotFoundError, ValidationError
from .outbox import Outbox
from .store import AuditLog, Store, Transaction

SHAREABLE = ("product", "service", "rating")


class WebhookDispatcher:
    def __init__(self, store: Store, clock: Clock, config: AppConfig,
                 outbox: Outbox, audit: AuditLog):
        self._store = store
        self._clock = clock
        self._config = config
        self._outbox = outbox
        self._audit = audit

    def share(self, actor: dict, *, resource_kind: str, resource_id: str,
              target: str) -> dict:
        """Record a share and queue the signed post to the target webhook."""
        if resource_kind not in SHAREABLE:
            raise DeniedError(f"{resource_kind!r} is not a shareable resource kind")
        url = self._config.webhook_targets.get(target)
        if url is None:
            raise ValidationError(f"unknown share target {target!r}",
                                  details={"targets": sorted(self._config.webhook_targets)})
        resource = self._resolve(resource_kind, resource_id)
        now = self._clock.now()
        body = {"kind": resource_kind, "resource": resource,
                "shared_by": actor["username"], "posted_at": now.isoformat()}
        signature = hmac.new(hashlib.sha256(url.encode()).digest(),
                             json.dumps(body, sort_keys=True).encode(),
                             hashlib.sha256).hexdigest()

        def commit(txn: Transaction) -> dict:
            event_id = txn.next_seq("share_event")
            event = {"id": event_id, "user_id": actor["id"],
                     "resource_kind": resource_kind, "resource_id": resource_id,
                     "target": target, "posted_at": now.isoformat()}
            txn.put(f"share_event:{event_id}", event)
            self._outbox.queue(txn, recipient=url, template="ShareEvent",
                               payload={"body": body, "signature": signature})
            self._audit.append(txn, actor=actor["username"], action="share",
                               entity=f"share_event:{event_id}",
                               timestamp=now.isoformat(), after=event)
            return event

        return self._store.run(commit)

    def _resolve(self, kind: str, resource_id: str) -> dict[str, Any]:
        if kind == "product":
            item = self._store.get(f"item:products:{resource_id}")
            if item is None:
                raise NotFoundError(f"no product {resource_id!r}")
            return {"item_id": item["item_id"], "name": item["name"],
                    "unit_price": item["unit_price"]}
        if kind == "service":
            item = self._store.get(f"item:services:{resource_id}")
            if item is None:
                raise NotFoundError(f"no service {resource_id!r}")
            return {"item_id": item["item_id"], "name": item["name"],
                    "unit_price": item["unit_price"]}
        rating = self._store.get(f"rating:{int(resource_id)}")
        if rating is None:
            raise NotFoundError(f"no rating {resource_id}")
        return {"id": rating["id"], "score": rating["score"], "kind": rating["kind"]}

    def events(self) -> list[dict]:
        snap = self._store.snapshot()
        return [snap.get(k) for k in snap.keys("share_event:")]
