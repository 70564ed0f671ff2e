"""
Fault hierarchy.

Mathematical check failures are never raised; they are report entries. The
exceptions below signal that a computation could not be carried out.
"""

from typing import Optional


class BurgersTilesError(Exception):
    """Base class for every fault raised by the package."""


class ConfigError(BurgersTilesError):
    """Run configuration could not be read or is inconsistent."""


class GridShapeError(BurgersTilesError, ValueError):
    """Grid functions or traces with mismatched resolutions were combined."""


class InterfaceDataError(BurgersTilesError, ValueError):
    """Bottom data does not vanish at a cell endpoint."""

    def __init__(self, message: str, cell_j: Optional[int] = None):
        super().__init__(message)
        self.cell_j = cell_j


class NonConvergenceError(BurgersTilesError):
    """Picard iteration did not settle below the update tolerance."""

    def __init__(
        self,
        message: str,
        *,
        iterations: int = 0,
        last_update: float = float("nan"),
        slab_k: Optional[int] = None,
        cell_j: Optional[int] = None,
    ):
        super().__init__(message)
        self.iterations = iterations
        self.last_update = last_update
        self.slab_k = slab_k
        self.cell_j = cell_j

    def tagged(self, slab_k: int, cell_j: int) -> "NonConvergenceError":
        """Attach the tile location without losing the subclass."""
        self.slab_k = slab_k
        self.cell_j = cell_j
        return self


class ShockAheadError(NonConvergenceError):
    """The slab reaches the first characteristic crossing; no classical solution there."""

    def __init__(self, message: str, *, t_shock: float, slab_k: Optional[int] = None):
        super().__init__(message, slab_k=slab_k)
        self.t_shock = t_shock


class ResidualTooLargeError(BurgersTilesError):
    """Iteration converged but the integral residual signals under-resolution."""

    def __init__(self, message: str, residual_sup: float, solution=None):
        super().__init__(message)
        self.residual_sup = residual_sup
        self.solution = solution
        self.slab_k: Optional[int] = None
        self.cell_j: Optional[int] = None

    def tagged(self, slab_k: int, cell_j: int) -> "ResidualTooLargeError":
        self.slab_k = slab_k
        self.cell_j = cell_j
        return self


class PastShockError(BurgersTilesError, ValueError):
    """Exact solution requested at or beyond the shock time."""

    def __init__(self, message: str, t_shock: float):
        super().__init__(message)
        self.t_shock = t_shock
