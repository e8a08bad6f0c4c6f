"""Application configuration.

Loaded from a JSON file, overridable field-by-field with ``OMS_``-prefixed
environment variables (``OMS_PORT=9000``, ``OMS_TAX_RATE_BP=1750``, ...).
Ships with usable defaults: labor-rate table, wage rates, slot calendar,
order cutoffs, and security knobs.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields
from typing import Any, Mapping, Optional

from .errors import ConfigurationError

# sqft cleaned per person-hour, keyed "surface|area"
DEFAULT_LABOR_RATES = {
    "carpet|room": 400, "carpet|hall": 500, "carpet|office": 450,
    "hardwood|room": 500, "hardwood|hall": 600, "hardwood|office": 550,
    "tile|room": 450, "tile|kitchen": 300, "tile|bathroom": 250,
    "tile|hall": 550, "stone|outdoor": 350, "stone|hall": 500,
    "hardwood|kitchen": 320, "carpet|kitchen": 280, "tile|office": 500,
}

DEFAULT_WAGE_RATES = {  # pence per hour by role
    "cleaning_staff": 900,
    "supervisor": 1200,
}

DEFAULT_SLOT_TIMES = ["09:00", "11:00", "13:00", "15:00", "17:00"]


@dataclass
class AppConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    data_path: Optional[str] = None          # None = in-memory store
    tax_rate_bp: int = 2000                  # 20% sales tax
    margin_rate_bp: int = 2500               # 25% profit margin
    order_cutoff: str = "17:00"              # default supplier cutoff, local to order date
    supplier_cutoffs: dict[str, str] = field(default_factory=dict)
    labor_rates: dict[str, int] = field(default_factory=lambda: dict(DEFAULT_LABOR_RATES))
    wage_rates: dict[str, int] = field(default_factory=lambda: dict(DEFAULT_WAGE_RATES))
    slot_times: list[str] = field(default_factory=lambda: list(DEFAULT_SLOT_TIMES))
    webhook_targets: dict[str, str] = field(default_factory=dict)
    session_idle_minutes: int = 30
    password_max_age_days: int = 21
    draft_idle_minutes: int = 240
    max_login_attempts: int = 3
    pbkdf2_iterations: int = 100_000
    outbox_max_retries: int = 5
    critical_mass_head_fraction: float = 0.03
    critical_mass_dominance: float = 0.5
    rating_weights: tuple[float, float] = (0.5, 0.5)   # (customer, supervisor)

    def cutoff_for(self, supplier_id: str) -> str:
        return self.supplier_cutoffs.get(supplier_id, self.order_cutoff)


def load_config(path: Optional[str] = None, *, env: Optional[Mapping[str, str]] = None) -> AppConfig:
    """Build config from defaults, then file values, then env overrides."""
    values: dict[str, Any] = {}
    if path:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                values = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot read config file {path}: {exc}")
        unknown = set(values) - {f.name for f in fields(AppConfig)}
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")

    env = env if env is not None else os.environ
    for f in fields(AppConfig):
        raw = env.get(f"OMS_{f.name.upper()}")
        if raw is None:
            continue
        if f.type in ("int", int):
            values[f.name] = int(raw)
        elif f.name in ("labor_rates", "wage_rates", "webhook_targets",
                        "supplier_cutoffs", "slot_times", "rating_weights"):
            values[f.name] = json.loads(raw)
        elif f.type in ("float", float):
            values[f.name] = float(raw)
        else:
            values[f.name] = raw

    if "rating_weights" in values:
        values["rating_weights"] = tuple(values["rating_weights"])
    return AppConfig(**values)
