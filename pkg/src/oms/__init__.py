"""Online management system for a small cleaning-services firm.

Role-based ordering, scheduling, field sheets, ratings, and reporting on a
transactional store, plus an analytics toolkit for the management feedback
loop, community circuits, and long-tail participation structure.
"""

from .app import Application
from .config import AppConfig, load_config

__version__ = "1.0.0"

__all__ = ["Application", "AppConfig", "load_config", "__version__"]
