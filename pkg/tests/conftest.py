"""Shared fixtures."""

import json

import pytest

from src.models.domain import TileSpec
from src.utils.log import configure_logging


@pytest.fixture(autouse=True)
def quiet_logs():
    configure_logging("WARNING")


@pytest.fixture
def tile() -> TileSpec:
    return TileSpec(slab_k=0, cell_j=0, nt=65, nx=65)


@pytest.fixture
def small_tile() -> TileSpec:
    return TileSpec(slab_k=0, cell_j=0, nt=17, nx=17)


@pytest.fixture
def write_config(tmp_path):
    """Write a run configuration and return its path."""
    def _write(doc: dict, name: str = "run.json"):
        path = tmp_path / name
        path.write_text(json.dumps(doc), encoding="utf-8")
        return path

    return _write
