"""Outbox delivery semantics and share webhooks."""

import pytest

from oms.errors import DeniedError, NotFoundError, ValidationError
from oms.outbox import CapturingTransport, Outbox
from oms.store import Store

from conftest import make_app


def queue_two(store, outbox):
    def fn(txn):
        outbox.queue(txn, recipient="a@x", template="Receipt", payload={"n": 1})
        outbox.queue(txn, recipient="b@x", template="Receipt", payload={"n": 2})
    store.run(fn)


class TestOutbox:
    def test_drain_sends_queued_and_updates_state(self):
        store, outbox, transport = Store(), Outbox(Store()), CapturingTransport()
        outbox = Outbox(store)
        queue_two(store, outbox)
        result = outbox.deliver(transport)
        assert result == {"sent": 2, "failed": 0, "dead": 0}
        assert len(transport.sent) == 2
        assert all(m["state"] == "sent" for m in outbox.messages())

    def test_duplicate_drain_never_resends(self):
        store = Store()
        outbox = Outbox(store)
        transport = CapturingTransport()
        queue_two(store, outbox)
        outbox.deliver(transport)
        again = outbox.deliver(transport)
        assert again == {"sent": 0, "failed": 0, "dead": 0}
        assert len(transport.sent) == 2
        keys = [m["idempotency_key"] for m in transport.sent]
        assert len(set(keys)) == len(keys)

    def test_transport_failure_keeps_message_with_retry_count(self):
        store = Store()
        outbox = Outbox(store)
        transport = CapturingTransport()
        transport.fail_next = 1
        queue_two(store, outbox)
        result = outbox.deliver(transport)
        assert result["failed"] == 1 and result["sent"] == 1
        retained = outbox.messages("queued")
        assert len(retained) == 1 and retained[0]["retries"] == 1
        result = outbox.deliver(transport)
        assert result["sent"] == 1
        assert not outbox.messages("queued")

    def test_retry_cap_marks_dead(self):
        store = Store()
        outbox = Outbox(store, max_retries=2)
        transport = CapturingTransport()
        store.run(lambda txn: outbox.queue(txn, recipient="x", template="Receipt",
                                           payload={}))
        transport.fail_next = 5
        outbox.deliver(transport)
        outbox.deliver(transport)
        assert outbox.messages("dead")
        assert outbox.deliver(transport) == {"sent": 0, "failed": 0, "dead": 0}

    def test_unknown_template_rejected(self):
        store = Store()
        outbox = Outbox(store)
        with pytest.raises(ValueError):
            store.run(lambda txn: outbox.queue(txn, recipient="x",
                                               template="Nonsense", payload={}))


class TestShareWebhooks:
    def setup_method(self):
        self.app = make_app(webhook_targets={"A": "https://hooks.example/a"})
        from oms.seed import seed_demo
        self.world = seed_demo(self.app)

    def test_share_service_records_event_and_queues_post(self):
        customer = self.world["customer"]
        event = self.app.webhooks.share(customer, resource_kind="service",
                                        resource_id="deep-clean", target="A")
        assert event["target"] == "A"
        queued = self.app.outbox.messages("queued")
        hooks = [m for m in queued if m["template"] == "ShareEvent"]
        assert len(hooks) == 1
        assert hooks[0]["payload"]["signature"]
        assert hooks[0]["payload"]["body"]["resource"]["item_id"] == "deep-clean"
        assert self.app.deliver_outbox()["sent"] >= 1

    def test_unknown_target_rejected(self):
        with pytest.raises(ValidationError):
            self.app.webhooks.share(self.world["customer"], resource_kind="service",
                                    resource_id="deep-clean", target="nope")

    def test_non_shareable_kind_denied(self):
        with pytest.raises(DeniedError):
            self.app.webhooks.share(self.world["customer"], resource_kind="report",
                                    resource_id="1", target="A")

    def test_missing_resource(self):
        with pytest.raises(NotFoundError):
            self.app.webhooks.share(self.world["customer"], resource_kind="product",
                                    resource_id="no-such", target="A")

    def test_webhook_outage_retries_with_backoff_cap(self):
        customer = self.world["customer"]
        self.app.webhooks.share(customer, resource_kind="product",
                                resource_id="mop-heads", target="A")
        self.app.transport.fail_next = 1
        first = self.app.deliver_outbox()
        assert first["failed"] >= 1
        second = self.app.deliver_outbox()
        assert second["sent"] >= 1
