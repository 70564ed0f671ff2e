"""
Grid Core

Nodal fields on a single unit tile and the four linear kernels every other module
is built from: cumulative trapezoid integration along x and along t, and
second-order finite differences in x and in t (centered inside, one-sided
3-point stencils on the edges). ``c1_norm`` is the discrete surrogate of the
max{|u|, |u_t|, |u_x|} norm used throughout the construction.

The array-level helpers (``cum_x``, ``cum_t``, ``d_x``, ``d_t``) are what the
Picard loop calls; the ``GridFn`` wrappers add shape checks and immutability.
"""

from typing import Callable

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator
from scipy.integrate import cumulative_trapezoid, trapezoid

from ..models.domain import TileSpec


def _readonly(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


class GridFn(BaseModel):
    """Values of a scalar field at the (nt, nx) nodes of one tile."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    tile: TileSpec
    values: np.ndarray

    @field_validator("values", mode="before")
    @classmethod
    def readonly_float_array(cls, v) -> np.ndarray:
        return _readonly(v)

    @model_validator(mode="after")
    def shape_and_finiteness(self) -> "GridFn":
        if self.values.shape != self.tile.shape:
            raise ValueError(f"values shape {self.values.shape} != tile shape {self.tile.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("grid function has non-finite values")
        return self

    @classmethod
    def zeros(cls, tile: TileSpec) -> "GridFn":
        return cls(tile=tile, values=np.zeros(tile.shape))

    @classmethod
    def from_function(
        cls, tile: TileSpec, fn: Callable[[np.ndarray, np.ndarray], np.ndarray]
    ) -> "GridFn":
        """Sample ``fn(t, x)`` on the tile's nodes (broadcast arrays, t along rows)."""
        t, x = np.meshgrid(tile.t_nodes, tile.x_nodes, indexing="ij")
        return cls(tile=tile, values=np.broadcast_to(fn(t, x), tile.shape))

    def with_values(self, values: np.ndarray) -> "GridFn":
        return GridFn(tile=self.tile, values=values)

    @property
    def top_row(self) -> np.ndarray:
        return self.values[-1]


class TraceFn(BaseModel):
    """
    A sampled function of one variable along a tile edge.

    Bottom data g(x) uses ``origin = j``; a lateral trace b(t) uses ``origin = k``.
    Nodes are ``origin + linspace(0, 1, n)``.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    values: np.ndarray
    origin: float = 0.0

    @field_validator("values", mode="before")
    @classmethod
    def readonly_vector(cls, v) -> np.ndarray:
        arr = _readonly(v)
        if arr.ndim != 1:
            raise ValueError("trace values must be one-dimensional")
        if not np.all(np.isfinite(arr)):
            raise ValueError("trace has non-finite values")
        return arr

    @classmethod
    def zeros(cls, n: int, origin: float = 0.0) -> "TraceFn":
        return cls(values=np.zeros(n), origin=origin)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def nodes(self) -> np.ndarray:
        return self.origin + np.linspace(0.0, 1.0, self.n)


# ---------------------------------------------------------------------------
# Array kernels
# ---------------------------------------------------------------------------

def cum_x(values: np.ndarray, hx: float) -> np.ndarray:
    return cumulative_trapezoid(values, dx=hx, axis=-1, initial=0.0)


def cum_t(values: np.ndarray, ht: float) -> np.ndarray:
    return cumulative_trapezoid(values, dx=ht, axis=0, initial=0.0)


def d_x(values: np.ndarray, hx: float) -> np.ndarray:
    return np.gradient(values, hx, axis=-1, edge_order=2)


def d_t(values: np.ndarray, ht: float) -> np.ndarray:
    return np.gradient(values, ht, axis=0, edge_order=2)


def integrate_x(values: np.ndarray, hx: float) -> np.ndarray:
    """Trapezoid integral over the whole cell, one number per time row."""
    return trapezoid(values, dx=hx, axis=-1)


# ---------------------------------------------------------------------------
# GridFn operations
# ---------------------------------------------------------------------------

def cum_int_x(f: GridFn) -> GridFn:
    """Integral from the tile's left edge to each x node; zero on the left column."""
    return f.with_values(cum_x(f.values, f.tile.hx))


def cum_int_t(f: GridFn) -> GridFn:
    """Integral from the tile's bottom edge to each t node; zero on the bottom row."""
    return f.with_values(cum_t(f.values, f.tile.ht))


def diff_x(f: GridFn) -> GridFn:
    return f.with_values(d_x(f.values, f.tile.hx))


def diff_t(f: GridFn) -> GridFn:
    return f.with_values(d_t(f.values, f.tile.ht))


def c1_values(values: np.ndarray, ht: float, hx: float) -> float:
    return float(
        max(
            np.max(np.abs(values)),
            np.max(np.abs(d_t(values, ht))),
            np.max(np.abs(d_x(values, hx))),
        )
    )


def c1_norm(f: GridFn) -> float:
    """max over nodes of |f|, |d_t f| and |d_x f|."""
    return c1_values(f.values, f.tile.ht, f.tile.hx)

