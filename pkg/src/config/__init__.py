# Run defaults, overridable through BURGERS_TILES_* environment variables
from .settings import Settings, settings

__all__ = ["Settings", "settings"]
