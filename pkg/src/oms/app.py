"""Application wiring: one store, one clock, one config, and every service
built on top of them. The HTTP layer, CLI, demos, and tests all drive this
object."""

from __future__ import annotations

from typing import Optional

from .accounts import AccountService
from .catalog import CatalogService, SimulatedSupplierEndpoint, SupplierInventoryClient
from .clock import Clock, SystemClock
from .config import AppConfig
from .fieldops import FieldOpsService
from .ordering import OrderingService, SimulatedPaymentGateway
from .outbox import CapturingTransport, Failpoints, Outbox, Transport
from .ratings import RatingService
from .reporting import ReportingService
from .scheduling import SchedulingService
from .store import AuditLog, Store, retention_sweep
from .webhooks import WebhookDispatcher


class Application:
    def __init__(self, config: Optional[AppConfig] = None, *,
                 clock: Optional[Clock] = None,
                 store: Optional[Store] = None,
                 supplier_client: Optional[SupplierInventoryClient] = None,
                 transport: Optional[Transport] = None,
                 gateway: Optional[SimulatedPaymentGateway] = None):
        self.config = config or AppConfig()
        self.clock = clock or SystemClock()
        self.store = store or Store(self.config.data_path)
        self.audit = AuditLog(self.store)
        self.failpoints = Failpoints()
        self.outbox = Outbox(self.store, max_retries=self.config.outbox_max_retries)
        self.transport = transport or CapturingTransport()
        self.supplier_endpoint = supplier_client or SimulatedSupplierEndpoint()
        self.gateway = gateway or SimulatedPaymentGateway()

        self.accounts = AccountService(self.store, self.clock, self.config,
                                       self.outbox, self.audit, self.failpoints)
        self.catalog = CatalogService(self.store, self.clock, self.config,
                                      self.supplier_endpoint, self.failpoints)
        self.scheduling = SchedulingService(self.store, self.clock, self.config)
        self.ordering = OrderingService(self.store, self.clock, self.config,
                                        self.catalog, self.scheduling, self.outbox,
                                        self.audit, self.failpoints,
                                        self.supplier_endpoint, self.gateway)
        self.fieldops = FieldOpsService(self.store, self.clock, self.config,
                                        self.audit, self.failpoints)
        self.ratings = RatingService(self.store, self.clock, self.config, self.audit)
        self.reporting = ReportingService(self.store, self.clock, self.config,
                                          self.ratings, self.outbox, self.audit)
        self.webhooks = WebhookDispatcher(self.store, self.clock, self.config,
                                          self.outbox, self.audit)

    def deliver_outbox(self) -> dict:
        return self.outbox.deliver(self.transport)

    def sweep_retention(self) -> dict:
        return retention_sweep(self.store, today_iso=self.clock.today().isoformat())

    def close(self) -> None:
        self.store.close()
