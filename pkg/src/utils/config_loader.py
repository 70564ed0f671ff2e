"""
Config Loader

Reads a run configuration document (JSON, or YAML by extension) into a
validated ``RunConfig``.
"""

import json
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml
from pydantic import ValidationError

from ..core.errors import ConfigError
from ..models.domain import RunConfig


def read_document(path: Union[str, Path]) -> Dict[str, Any]:
    """
    Parse a configuration file into a dictionary.

    Args:
        path: .json, .yaml or .yml file

    Returns:
        dict: Raw document

    Raises:
        ConfigError: If the file is missing, has an unsupported extension or does not parse
    """
    path = Path(path)
    ext = path.suffix.lower().lstrip(".")
    try:
        text = path.read_text(encoding="utf-8")
        if ext == "json":
            doc = json.loads(text)
        elif ext in ("yaml", "yml"):
            doc = yaml.safe_load(text)
        else:
            raise ConfigError(f"Unsupported config format: .{ext}. Use JSON or YAML.")
    except ConfigError:
        raise
    except (OSError, json.JSONDecodeError, yaml.YAMLError) as e:
        raise ConfigError(f"Error reading config {path}: {e}") from e

    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError(f"Config {path} must be a mapping, got {type(doc).__name__}")
    return doc


def load_run_config(
    path: Union[str, Path], overrides: Optional[Dict[str, Any]] = None
) -> RunConfig:
    """Read ``path`` and apply non-None ``overrides`` (CLI flags win over the file)."""
    doc = read_document(path)
    doc.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        return RunConfig.model_validate(doc)
    except ValidationError as e:
        raise ConfigError(f"Invalid run config {path}: {e}") from e
