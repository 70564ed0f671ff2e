"""
Characteristics Oracle

Exact pre-shock solutions of u_t + u u_x = 0. Along x = x0 + t phi(x0) the
solution keeps the value phi(x0); for t below the first crossing time the map
x0 -> x0 + t phi(x0) is strictly increasing, so the foot point is found by
bisection. Cell data vanishes at cell endpoints, which therefore never move:
the cell containing x is always a valid bracket.
"""

import math
from typing import Callable, Optional, Tuple

import numpy as np
from loguru import logger
from scipy.integrate import trapezoid

from ..models.domain import InitialData, OracleConfig, OracleReport
from .errors import PastShockError
from .initial_data import evaluate, min_slope

Profile = Callable[[np.ndarray], np.ndarray]


def shock_time(phi: InitialData) -> float:
    """-1 / min phi', or infinity when phi is nowhere decreasing."""
    lowest = min_slope(phi)
    if lowest >= 0.0:
        return math.inf
    return -1.0 / lowest


def eval_profile(
    profile: Profile,
    t,
    x,
    lo,
    hi,
    cfg: Optional[OracleConfig] = None,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Solve x0 + t * profile(x0) = x for x0 in [lo, hi] by vectorized bisection.

    ``t``, ``x``, ``lo``, ``hi`` broadcast against each other. The caller
    guarantees that the bracket holds the root and that t is below the
    crossing time of ``profile``.

    Returns:
        (profile(x0), x0, residual x0 + t profile(x0) - x)
    """
    cfg = cfg or OracleConfig()
    t, x, lo, hi = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (t, x, lo, hi)))
    lo, hi = lo.copy(), hi.copy()

    def foot(x0):
        return x0 + t * profile(x0) - x

    for _ in range(cfg.max_bisections):
        mid = 0.5 * (lo + hi)
        below = foot(mid) < 0.0
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.all(hi - lo <= 2.0 * np.spacing(np.maximum(np.abs(lo), np.abs(hi)))):
            break
    g_lo, g_hi = np.abs(foot(lo)), np.abs(foot(hi))
    x0 = np.where(g_lo <= g_hi, lo, hi)
    residual = foot(x0)
    worst = float(np.max(np.abs(residual))) if residual.size else 0.0
    if worst > cfg.root_tol:
        logger.warning(f"characteristic foot residual {worst:.2e} above {cfg.root_tol:.0e}")
    return profile(x0), x0, residual


def eval_exact(phi: InitialData, t, x, cfg: Optional[OracleConfig] = None) -> np.ndarray:
    """
    u(t, x) for 0 <= t < T*, from the implicit relation u = phi(x - t u).

    Raises:
        PastShockError: some requested t is at or beyond the shock time
    """
    t_shock = shock_time(phi)
    t_arr = np.asarray(t, dtype=float)
    if t_arr.size and float(np.max(t_arr)) >= t_shock:
        raise PastShockError(
            f"t = {float(np.max(t_arr)):.6f} is not below the shock time T* = {t_shock:.6f}",
            t_shock=t_shock,
        )
    x_arr = np.asarray(x, dtype=float)
    cell = np.floor(x_arr)
    values, _, _ = eval_profile(lambda y: evaluate(phi, y), t_arr, x_arr, cell, cell + 1.0, cfg)
    return values


def _tile_errors(slab, phi: InitialData, cfg: OracleConfig):
    for j in slab.cell_range:
        sol = slab.tiles[j]
        tile = sol.tile
        t, x = np.meshgrid(tile.t_nodes, tile.x_nodes, indexing="ij")
        err = sol.u.values - eval_exact(phi, t, x, cfg)
        yield tile, err


def compare(
    numeric, phi: InitialData, cfg: Optional[OracleConfig] = None, bound: Optional[float] = None
) -> OracleReport:
    """
    Sup and L^2 error of a SlabSolution or GlobalSolution against the exact solution.

    The L^2 error integrates over every solved tile with the trapezoid rule in both
    directions.
    """
    cfg = cfg or OracleConfig()
    slabs = numeric.slabs if hasattr(numeric, "slabs") else [numeric]
    t_shock = shock_time(phi)
    sup_err, sq = 0.0, 0.0
    for slab in slabs:
        if slab.slab_k + 1 >= t_shock:
            raise PastShockError(
                f"slab [{slab.slab_k}, {slab.slab_k + 1}] reaches T* = {t_shock:.6f}",
                t_shock=t_shock,
            )
        for tile, err in _tile_errors(slab, phi, cfg):
            sup_err = max(sup_err, float(np.max(np.abs(err))))
            sq += float(trapezoid(trapezoid(err**2, dx=tile.hx, axis=1), dx=tile.ht))
    report = OracleReport(
        sup_err=sup_err,
        l2_err=math.sqrt(sq),
        t_shock=t_shock if math.isfinite(t_shock) else None,
        bound=bound,
    )
    logger.info(f"oracle: sup error {report.sup_err:.3e}, L2 error {report.l2_err:.3e}")
    return report


def refinement_ratio(
    coarse,
    fine,
    phi: InitialData,
    cfg: Optional[OracleConfig] = None,
    bound: Optional[float] = None,
) -> Tuple[OracleReport, OracleReport]:
    """
    Oracle reports at two resolutions, the coarse one carrying the error ratio.

    For a second-order scheme and h halved the ratio approaches 4.
    """
    c = compare(coarse, phi, cfg, bound)
    f = compare(fine, phi, cfg)
    ratio = c.sup_err / f.sup_err if f.sup_err > 0.0 else None
    logger.info(f"refinement ratio {ratio}")
    return c.model_copy(update={"ratio": ratio}), f
