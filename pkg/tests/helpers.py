"""Builders shared by the test modules."""

import numpy as np

from src.core.grid import TraceFn
from src.core.initial_data import bump, sample_bottom
from src.core.operators import OperatorParams
from src.models.domain import InitialData, TileSpec


def bump_data(*pairs) -> InitialData:
    return InitialData(bumps=[bump(j, a) for j, a in pairs])


def bump_params(tile: TileSpec, amplitude: float, epsilon: float = 0.05) -> OperatorParams:
    g = sample_bottom(bump_data((tile.cell_j, amplitude)), tile)
    return OperatorParams.for_tile(tile, g, epsilon=epsilon)


def trace_params(tile: TileSpec, g_values, epsilon: float = 0.05) -> OperatorParams:
    g = TraceFn(values=np.asarray(g_values, dtype=float), origin=tile.cell_j)
    return OperatorParams.for_tile(tile, g, epsilon=epsilon)
