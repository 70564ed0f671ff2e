"""
Assembler

Sweeps tiles across the cells of a slab, glues them, checks the interfaces and
the per-cell decay envelope, and advances slab by slab in time.

Bottom data vanishing together with its slope at every cell endpoint makes each
tile independent: edge columns of every tile stay exactly zero, so the
left-neighbour trace b is zero during the solve. Once all tiles of a slab exist,
each tile's residual is recomputed with the real neighbour trace (the "glued"
residual).
"""

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field

from ..config.settings import settings
from ..models.domain import (
    CellEnvelope,
    EnvelopeReport,
    InitialData,
    InterfaceMetrics,
    InterfaceReport,
    SlabFailure,
    SlabReport,
    SolverConfig,
    TileSpec,
    TileSummary,
)
from .characteristics import shock_time
from .errors import (
    BurgersTilesError,
    InterfaceDataError,
    NonConvergenceError,
    ResidualTooLargeError,
    ShockAheadError,
)
from .grid import TraceFn, d_t, d_x
from .initial_data import sample_bottom
from .operators import OperatorParams, residual_values
from .tile_solver import TileSolution, solve_tile

Cells = Tuple[int, int]


class SlabSolution(BaseModel):
    """All tiles of one time slab [k, k+1], keyed by cell index."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    slab_k: int
    cells: Cells
    tiles: Dict[int, TileSolution]
    glued_residuals: Dict[int, float] = Field(default_factory=dict)
    interfaces: Optional[InterfaceReport] = None
    envelope: Optional[EnvelopeReport] = None

    @property
    def cell_range(self) -> List[int]:
        return list(range(self.cells[0], self.cells[1] + 1))

    def top_traces(self) -> Dict[int, TraceFn]:
        """t = k+1 rows, ready to be the next slab's bottom data."""
        return {j: TraceFn(values=self.tiles[j].u.top_row, origin=j) for j in self.cell_range}

    def report(self) -> SlabReport:
        return SlabReport(
            slab_k=self.slab_k,
            tiles=[
                TileSummary(
                    cell=j,
                    iterations=sol.iterations,
                    final_update=sol.final_update,
                    residual_sup=sol.residual_sup,
                    glued_residual_sup=self.glued_residuals.get(j, sol.residual_sup),
                    volterra_residual_sup=sol.volterra_residual_sup,
                    pde_residual_sup=sol.pde_residual_sup,
                )
                for j, sol in sorted(self.tiles.items())
            ],
            interfaces=self.interfaces or check_interfaces(self),
            envelope=self.envelope or check_envelope(self),
        )


class GlobalSolution(BaseModel):
    """Consecutive slabs from t = 0, possibly cut short by a failure."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    slabs: List[SlabSolution] = Field(default_factory=list)
    failure: Optional[SlabFailure] = None
    t_shock: float = math.inf

    @property
    def completed(self) -> bool:
        return self.failure is None


def sweep_order(cells: Cells) -> List[int]:
    """0, 1, -1, 2, -2, ... restricted to the window."""
    return sorted(range(cells[0], cells[1] + 1), key=lambda j: (abs(j), j < 0))


def envelope_bound(slab_k: int, cell_j: int) -> float:
    """2^-(|j|+1) on the first slab, weakened by a square root per further slab."""
    return 2.0 ** (-(abs(cell_j) + 1) / 2**slab_k)


def _check_data_traces(data: Dict[int, TraceFn], tol: float) -> None:
    for j, g in sorted(data.items()):
        edge = max(abs(g.values[0]), abs(g.values[-1]))
        if edge > tol:
            raise InterfaceDataError(
                f"bottom data on cell {j} is {edge:.3e} at a cell endpoint (tolerance {tol:.0e})",
                cell_j=j,
            )


def _solve_one(
    k: int, j: int, g: TraceFn, nt: int, epsilon: float, cfg: SolverConfig
) -> TileSolution:
    tile = TileSpec(slab_k=k, cell_j=j, nt=nt, nx=g.n)
    try:
        return solve_tile(OperatorParams.for_tile(tile, g, epsilon=epsilon), cfg)
    except (NonConvergenceError, ResidualTooLargeError) as e:
        raise e.tagged(k, j)


def solve_slab(
    k: int,
    data: Dict[int, TraceFn],
    cells: Cells,
    cfg: Optional[SolverConfig] = None,
    *,
    nt: Optional[int] = None,
    epsilon: Optional[float] = None,
    workers: Optional[int] = None,
    order: Optional[Sequence[int]] = None,
) -> SlabSolution:
    """
    Solve every cell of slab k and glue the tiles.

    Args:
        k: Slab index
        data: Bottom trace per cell; cells without an entry get zero data
        cells: Inclusive window [J-, J+]
        cfg: Solver thresholds
        nt: Time nodes per tile (x resolution follows the data)
        epsilon: eps carried by the operator parameters
        workers: Threads solving cells concurrently
        order: Cell visiting order (center-outward by default)

    Raises:
        InterfaceDataError: data does not vanish at a cell endpoint
        NonConvergenceError, ResidualTooLargeError: tagged with (k, j)
    """
    cfg = cfg or SolverConfig()
    nt = nt or settings.grid.nt
    epsilon = settings.operator.epsilon if epsilon is None else epsilon
    workers = workers or settings.solver.workers
    nx = next(iter(data.values())).n if data else settings.grid.nx
    cell_range = list(range(cells[0], cells[1] + 1))
    order = list(order) if order is not None else sweep_order(cells)
    if sorted(order) != cell_range:
        raise ValueError(f"order {order} is not a permutation of cells {cell_range}")

    data = {j: data.get(j, TraceFn.zeros(nx, origin=j)) for j in cell_range}
    _check_data_traces(data, settings.checks.data_trace_tol)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {j: pool.submit(_solve_one, k, j, data[j], nt, epsilon, cfg) for j in order}
            tiles = {j: futures[j].result() for j in order}
    else:
        tiles = {j: _solve_one(k, j, data[j], nt, epsilon, cfg) for j in order}
    tiles = {j: tiles[j] for j in cell_range}

    glued = {}
    for j in cell_range:
        sol = tiles[j]
        b = tiles[j - 1].u.values[:, -1] if j - 1 in tiles else np.zeros(nt)
        F = residual_values(sol.u.values, data[j].values, b, sol.tile.ht, sol.tile.hx)
        glued[j] = float(np.max(np.abs(F)))

    slab = SlabSolution(slab_k=k, cells=cells, tiles=tiles, glued_residuals=glued)
    slab = slab.model_copy(
        update={"interfaces": check_interfaces(slab), "envelope": check_envelope(slab)}
    )
    logger.info(
        f"slab {k}: {len(tiles)} tiles, max iterations "
        f"{max(t.iterations for t in tiles.values())}, max |F| {max(glued.values()):.2e}"
    )
    return slab


def check_interfaces(s: SlabSolution) -> InterfaceReport:
    """Value, slope and u_t traces on every interior edge x = j of the slab."""
    interfaces = []
    for j in s.cell_range[1:]:
        left, right = s.tiles[j - 1].u, s.tiles[j].u
        ut_left = d_t(left.values, left.tile.ht)[:, -1]
        ut_right = d_t(right.values, right.tile.ht)[:, 0]
        interfaces.append(
            InterfaceMetrics(
                x=j,
                value_left=float(np.max(np.abs(left.values[:, -1]))),
                value_right=float(np.max(np.abs(right.values[:, 0]))),
                slope_left=float(np.max(np.abs(d_x(left.values, left.tile.hx)[:, -1]))),
                slope_right=float(np.max(np.abs(d_x(right.values, right.tile.hx)[:, 0]))),
                ut_mismatch=float(np.max(np.abs(ut_left - ut_right))),
            )
        )
    return InterfaceReport(
        interfaces=interfaces,
        max_value=max((max(m.value_left, m.value_right) for m in interfaces), default=0.0),
        max_slope=max((max(m.slope_left, m.slope_right) for m in interfaces), default=0.0),
        max_ut_mismatch=max((m.ut_mismatch for m in interfaces), default=0.0),
    )


def check_envelope(s: SlabSolution, tolerance: Optional[float] = None) -> EnvelopeReport:
    """Per-cell margins bound - sup of |u|, |u_t|, |u_x|."""
    tolerance = settings.checks.envelope_tol if tolerance is None else tolerance
    cells = []
    for j in s.cell_range:
        u = s.tiles[j].u
        bound = envelope_bound(s.slab_k, j)
        sup_u = float(np.max(np.abs(u.values)))
        sup_ut = float(np.max(np.abs(d_t(u.values, u.tile.ht))))
        sup_ux = float(np.max(np.abs(d_x(u.values, u.tile.hx))))
        cells.append(
            CellEnvelope(
                cell=j,
                bound=bound,
                sup_u=sup_u,
                sup_ut=sup_ut,
                sup_ux=sup_ux,
                margin_u=bound - sup_u,
                margin_ut=bound - sup_ut,
                margin_ux=bound - sup_ux,
                extrapolated=s.slab_k >= 2,
            )
        )
    report = EnvelopeReport(slab_k=s.slab_k, cells=cells, tolerance=tolerance)
    if not report.passed:
        worst = min(cells, key=lambda c: min(c.margin_u, c.margin_ut, c.margin_ux))
        logger.warning(f"slab {s.slab_k}: envelope violated, worst cell {worst.cell}")
    return report


def _failure(k: int, error: BurgersTilesError, t_shock: float) -> SlabFailure:
    if isinstance(error, ShockAheadError):
        kind = "shock_ahead"
    elif isinstance(error, NonConvergenceError):
        kind = "non_convergence"
    elif isinstance(error, ResidualTooLargeError):
        kind = "residual"
    else:
        kind = "interface_data"
    return SlabFailure(
        slab_k=k,
        cell_j=getattr(error, "cell_j", None),
        kind=kind,
        message=str(error),
        t_shock=t_shock if math.isfinite(t_shock) else None,
    )


def advance(
    phi: InitialData,
    slabs: int,
    cells: Cells,
    cfg: Optional[SolverConfig] = None,
    *,
    nx: Optional[int] = None,
    nt: Optional[int] = None,
    epsilon: Optional[float] = None,
    workers: Optional[int] = None,
) -> GlobalSolution:
    """
    Solve slabs 0 .. slabs-1; slab k+1 starts from slab k's top row.

    Stops at the first failing slab and returns the completed slabs with a
    ``SlabFailure`` describing the fault. A slab whose end reaches the shock
    time is refused before any tile is solved.
    """
    if slabs < 1:
        raise ValueError("slabs must be >= 1")
    nx = nx or settings.grid.nx
    nt = nt or settings.grid.nt
    t_shock = shock_time(phi)
    data = {
        j: sample_bottom(phi, TileSpec(slab_k=0, cell_j=j, nt=nt, nx=nx))
        for j in range(cells[0], cells[1] + 1)
    }

    done: List[SlabSolution] = []
    for k in range(slabs):
        try:
            if k + 1 >= t_shock:
                raise ShockAheadError(
                    f"slab [{k}, {k + 1}] reaches the shock time T* = {t_shock:.6f}",
                    t_shock=t_shock,
                    slab_k=k,
                )
            slab = solve_slab(k, data, cells, cfg, nt=nt, epsilon=epsilon, workers=workers)
        except BurgersTilesError as e:
            logger.error(f"slab {k} failed: {e}")
            return GlobalSolution(slabs=done, failure=_failure(k, e, t_shock), t_shock=t_shock)
        done.append(slab)
        data = slab.top_traces()
    return GlobalSolution(slabs=done, t_shock=t_shock)
