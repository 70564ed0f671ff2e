# Utils Package
from .config_loader import load_run_config, read_document
from .log import configure_logging
from .storage import RunStorage, read_snapshots

__all__ = ["load_run_config", "read_document", "configure_logging", "RunStorage", "read_snapshots"]
