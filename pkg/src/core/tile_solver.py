"""
Tile Solver

Solves F(u) = 0 on one tile by Picard iteration on its x-differentiated form

    u(t, x) = g(x) - int_k^t u(s, x) u_x(s, x) ds

which is a Volterra equation in t. The undifferentiated residual F is kept as
an acceptance check; both residuals are reported with every solution.
"""

from typing import List, Optional

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field

from ..models.domain import SolverConfig, TileVerification
from .errors import NonConvergenceError, ResidualTooLargeError
from .grid import GridFn, cum_t, d_t, d_x, integrate_x
from .operators import OperatorParams, residual_values


class TileSolution(BaseModel):
    """Converged grid function on one tile and how it was reached."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    u: GridFn
    iterations: int
    final_update: float
    residual_sup: float = Field(description="sup |F(u)| with the b used during the solve")
    volterra_residual_sup: float
    pde_residual_sup: float = Field(description="sup |d_t u + u d_x u|")
    updates: List[float] = Field(default_factory=list, description="sup-norm update per iteration")

    @property
    def tile(self):
        return self.u.tile


def _picard_step(u: np.ndarray, g: np.ndarray, ht: float, hx: float) -> np.ndarray:
    return g[np.newaxis, :] - cum_t(u * d_x(u, hx), ht)


def volterra_residual(u: np.ndarray, g: np.ndarray, ht: float, hx: float) -> np.ndarray:
    return u - _picard_step(u, g, ht, hx)


def pde_residual(u: np.ndarray, ht: float, hx: float) -> np.ndarray:
    return d_t(u, ht) + u * d_x(u, hx)


def solve_tile(p: OperatorParams, cfg: Optional[SolverConfig] = None) -> TileSolution:
    """
    Picard iteration from u0(t, x) = g(x).

    Args:
        p: Tile, bottom data g and left edge trace b
        cfg: Stop and acceptance thresholds (defaults from settings)

    Returns:
        TileSolution: converged iterate with residual diagnostics

    Raises:
        NonConvergenceError: max_iter reached, or the update diverged
        ResidualTooLargeError: converged but a residual exceeds its tolerance
    """
    cfg = cfg or SolverConfig()
    p.check_resolution()
    tile = p.tile
    g = p.g.values
    ht, hx = tile.ht, tile.hx

    u = np.broadcast_to(g, tile.shape).copy()
    updates: List[float] = []
    for n in range(1, cfg.max_iter + 1):
        nxt = _picard_step(u, g, ht, hx)
        update = float(np.max(np.abs(nxt - u)))
        if not np.isfinite(update) or update > cfg.blowup:
            raise NonConvergenceError(
                f"Picard iteration diverged at step {n} (update {update:.3e})",
                iterations=n,
                last_update=update,
                slab_k=tile.slab_k,
                cell_j=tile.cell_j,
            )
        u = nxt
        updates.append(update)
        logger.debug(f"tile ({tile.slab_k}, {tile.cell_j}) iter {n}: update {update:.3e}")
        if update < cfg.tol:
            break
    else:
        raise NonConvergenceError(
            f"no convergence in {cfg.max_iter} iterations (last update {updates[-1]:.3e})",
            iterations=cfg.max_iter,
            last_update=updates[-1],
            slab_k=tile.slab_k,
            cell_j=tile.cell_j,
        )

    sol = TileSolution(
        u=GridFn(tile=tile, values=u),
        iterations=len(updates),
        final_update=updates[-1],
        residual_sup=float(np.max(np.abs(residual_values(u, g, p.b.values, ht, hx)))),
        volterra_residual_sup=float(np.max(np.abs(volterra_residual(u, g, ht, hx)))),
        pde_residual_sup=float(np.max(np.abs(pde_residual(u, ht, hx)))),
        updates=updates,
    )
    if sol.residual_sup > cfg.residual_tol:
        raise ResidualTooLargeError(
            f"sup|F(u)| = {sol.residual_sup:.3e} exceeds {cfg.residual_tol:.1e}; refine the grid",
            residual_sup=sol.residual_sup,
            solution=sol,
        )
    if sol.volterra_residual_sup > cfg.volterra_tol:
        raise ResidualTooLargeError(
            f"Volterra residual {sol.volterra_residual_sup:.3e} exceeds {cfg.volterra_tol:.1e}",
            residual_sup=sol.volterra_residual_sup,
            solution=sol,
        )
    logger.debug(
        f"tile ({tile.slab_k}, {tile.cell_j}) solved in {sol.iterations} iterations, "
        f"|F| = {sol.residual_sup:.2e}"
    )
    return sol


def verify_solution(sol: TileSolution, p: OperatorParams) -> TileVerification:
    """Recompute every residual and trace from scratch."""
    p.check_resolution(sol.u)
    u = sol.u.values
    g = p.g.values
    ht, hx = p.tile.ht, p.tile.hx
    return TileVerification(
        residual_sup=float(np.max(np.abs(residual_values(u, g, p.b.values, ht, hx)))),
        volterra_residual_sup=float(np.max(np.abs(volterra_residual(u, g, ht, hx)))),
        pde_residual_sup=float(np.max(np.abs(pde_residual(u, ht, hx)))),
        bottom_mismatch=float(np.max(np.abs(u[0] - g))),
        left_trace_sup=float(np.max(np.abs(u[:, 0]))),
        right_trace_sup=float(np.max(np.abs(u[:, -1]))),
    )


def cell_mass_history(sol: TileSolution) -> np.ndarray:
    """int over the cell of u(t, .) at every t node."""
    return integrate_x(sol.u.values, sol.tile.hx)


def cell_energy_history(sol: TileSolution) -> np.ndarray:
    """int over the cell of u(t, .)^2 at every t node."""
    return integrate_x(sol.u.values**2, sol.tile.hx)
