"""
Initial Data

Generation and validation of initial profiles phi that are admissible for the
tile construction:

- phi restricted to each cell [j, j+1] is C^1 with phi and phi' vanishing at both
  cell endpoints,
- sup |phi| < 1 and sup |phi'| < 1,
- ||phi||_{L^2} <= 1,
- |phi|, |phi'| <= 2^-(|j|+1) on cell j (the decay envelope).

The generator is the bump family a_j * psi(x - j) with psi(s) = 16 s^2 (1-s)^2.
Raw per-cell samples are accepted too; they are how counterexamples for single
clauses are built.
"""

import math
from typing import Dict, Iterable, Optional, Tuple

import numpy as np
from loguru import logger
from scipy.integrate import trapezoid

from ..config.settings import settings
from ..models.domain import (
    Bump,
    CellCheck,
    ClauseResult,
    InitialData,
    TileSpec,
    ValidationReport,
)
from .grid import TraceFn

# sup over [0, 1] of |psi'|, attained at s = (1 -/+ 1/sqrt(3)) / 2
PSI_SLOPE_MAX = 16.0 / (3.0 * math.sqrt(3.0))

# relative slack on envelope clauses, so amplitudes chosen exactly at the bound pass
_ENVELOPE_RTOL = 1e-12

CLAUSES = (
    "endpoint_value",
    "endpoint_derivative",
    "sup_phi",
    "sup_dphi",
    "l2",
    "envelope_phi",
    "envelope_dphi",
)


def reference_profile(s: np.ndarray) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    return 16.0 * s**2 * (1.0 - s) ** 2


def reference_slope(s: np.ndarray) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    return 32.0 * s * (1.0 - s) * (1.0 - 2.0 * s)


def bump(cell_j: int, amplitude: float) -> Bump:
    """One contribution a_j * psi(x - j); peak value ``amplitude`` at x = j + 1/2."""
    return Bump(cell=cell_j, amplitude=amplitude)


def envelope_bound(cell_j: int) -> float:
    return 2.0 ** -(abs(cell_j) + 1)


def max_envelope_amplitude(cell_j: int) -> float:
    """Largest bump amplitude on cell j whose slope still respects the envelope."""
    return envelope_bound(cell_j) / PSI_SLOPE_MAX


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def _sample_nodes(n: int) -> np.ndarray:
    return np.linspace(0.0, 1.0, n)


def cell_values(phi: InitialData, cell_j: int, s: np.ndarray) -> np.ndarray:
    """phi(j + s) for local coordinates s in [0, 1]."""
    s = np.asarray(s, dtype=float)
    b = phi.bump_on(cell_j)
    if b is not None:
        return b.amplitude * reference_profile(s)
    raw = phi.sample_on(cell_j)
    if raw is not None:
        values = np.asarray(raw.values, dtype=float)
        return np.interp(s, _sample_nodes(values.size), values)
    return np.zeros_like(s)


def cell_slopes(phi: InitialData, cell_j: int, s: np.ndarray) -> np.ndarray:
    """phi'(j + s); raw samples are differentiated with second-order stencils."""
    s = np.asarray(s, dtype=float)
    b = phi.bump_on(cell_j)
    if b is not None:
        return b.amplitude * reference_slope(s)
    raw = phi.sample_on(cell_j)
    if raw is not None:
        values = np.asarray(raw.values, dtype=float)
        h = 1.0 / (values.size - 1)
        slopes = np.gradient(values, h, edge_order=2)
        return np.interp(s, _sample_nodes(values.size), slopes)
    return np.zeros_like(s)


def _by_cell(phi: InitialData, x: np.ndarray, per_cell) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    cells = np.floor(x).astype(int)
    out = np.zeros_like(x)
    for j in np.unique(cells):
        mask = cells == j
        out[mask] = per_cell(phi, int(j), x[mask] - j)
    return out


def evaluate(phi: InitialData, x: np.ndarray) -> np.ndarray:
    """phi at arbitrary points of the real line."""
    return _by_cell(phi, x, cell_values)


def slope(phi: InitialData, x: np.ndarray) -> np.ndarray:
    return _by_cell(phi, x, cell_slopes)


def cell_sups(phi: InitialData, cell_j: int, nx: Optional[int] = None) -> Tuple[float, float]:
    """(sup |phi|, sup |phi'|) on one cell; closed form for bumps."""
    b = phi.bump_on(cell_j)
    if b is not None:
        return b.amplitude, b.amplitude * PSI_SLOPE_MAX
    s = _sample_nodes(nx or settings.grid.nx)
    raw = phi.sample_on(cell_j)
    if raw is not None:
        s = _sample_nodes(max(len(raw.values), s.size))
    return (
        float(np.max(np.abs(cell_values(phi, cell_j, s)))),
        float(np.max(np.abs(cell_slopes(phi, cell_j, s)))),
    )


def min_slope(phi: InitialData, nx: Optional[int] = None) -> float:
    """min phi' over the real line (0 for zero data)."""
    lowest = 0.0
    for j in phi.active_cells:
        b = phi.bump_on(j)
        if b is not None:
            lowest = min(lowest, -b.amplitude * PSI_SLOPE_MAX)
        else:
            n = max(len(phi.sample_on(j).values), nx or settings.grid.nx)
            lowest = min(lowest, float(np.min(cell_slopes(phi, j, _sample_nodes(n)))))
    return lowest


def l2_norm(phi: InitialData, nx: Optional[int] = None) -> float:
    """Trapezoid approximation of ||phi||_{L^2} over the union of active cells."""
    s = _sample_nodes(nx or settings.grid.nx)
    h = s[1] - s[0]
    total = sum(trapezoid(cell_values(phi, j, s) ** 2, dx=h) for j in phi.active_cells)
    return math.sqrt(total)


def sample_bottom(phi: InitialData, tile: TileSpec) -> TraceFn:
    """phi at the tile's x nodes, as bottom data g."""
    s = _sample_nodes(tile.nx)
    return TraceFn(values=cell_values(phi, tile.cell_j, s), origin=tile.cell_j)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def _window(phi: InitialData, cells: Optional[Tuple[int, int]]) -> Tuple[int, int]:
    if cells is not None:
        return int(cells[0]), int(cells[1])
    active = phi.active_cells
    return (active[0], active[-1]) if active else (0, 0)


def _worst(checks: Iterable[CellCheck], key) -> Tuple[float, Optional[int]]:
    worst, where = 0.0, None
    for c in checks:
        value = key(c)
        if value is not None and value > worst:
            worst, where = value, c.cell
    return worst, where


def validate(
    phi: InitialData,
    cells: Optional[Tuple[int, int]] = None,
    nx: Optional[int] = None,
    endpoint_tol: Optional[float] = None,
) -> ValidationReport:
    """
    Check every admissibility clause and report measured values.

    Args:
        phi: Initial data
        cells: Inclusive window [J-, J+] on which the envelope clause is checked.
            Defaults to the span of the active cells.
        nx: Sampling resolution for raw samples and the L^2 quadrature
        endpoint_tol: Allowed |phi|, |phi'| at cell endpoints

    Returns:
        ValidationReport: one ClauseResult per entry of ``CLAUSES``

    Endpoint, sup and L^2 clauses look at all data; the envelope clause only at
    cells inside the window. Failures are report entries, never exceptions.
    """
    tol = settings.checks.endpoint_tol if endpoint_tol is None else endpoint_tol
    lo, hi = _window(phi, cells)
    window_cells = set(range(lo, hi + 1))
    outside = [j for j in phi.active_cells if j not in window_cells]
    if outside:
        logger.warning(f"data on cells {outside} lies outside the envelope window [{lo}, {hi}]")

    ends = np.array([0.0, 1.0])
    checks: Dict[int, CellCheck] = {}
    for j in sorted(window_cells | set(phi.active_cells)):
        values = cell_values(phi, j, ends)
        slopes = cell_slopes(phi, j, ends)
        sup_phi, sup_dphi = cell_sups(phi, j, nx)
        env = envelope_bound(j) if j in window_cells else None
        checks[j] = CellCheck(
            cell=j,
            endpoint_values=(float(values[0]), float(values[1])),
            endpoint_slopes=(float(slopes[0]), float(slopes[1])),
            sup_phi=sup_phi,
            sup_dphi=sup_dphi,
            envelope=env,
            margin_phi=None if env is None else env - sup_phi,
            margin_dphi=None if env is None else env - sup_dphi,
        )

    cell_list = list(checks.values())
    end_val, end_val_cell = _worst(cell_list, lambda c: max(map(abs, c.endpoint_values)))
    end_der, end_der_cell = _worst(cell_list, lambda c: max(map(abs, c.endpoint_slopes)))
    sup_phi = max((c.sup_phi for c in cell_list), default=0.0)
    sup_dphi = max((c.sup_dphi for c in cell_list), default=0.0)
    norm = l2_norm(phi, nx)
    env_phi, env_phi_cell = _worst(
        cell_list, lambda c: None if c.envelope is None else c.sup_phi / c.envelope
    )
    env_dphi, env_dphi_cell = _worst(
        cell_list, lambda c: None if c.envelope is None else c.sup_dphi / c.envelope
    )

    clauses = {
        "endpoint_value": ClauseResult(
            passed=end_val <= tol, measured=end_val, bound=tol,
            detail="" if end_val_cell is None else f"cell {end_val_cell}",
        ),
        "endpoint_derivative": ClauseResult(
            passed=end_der <= tol, measured=end_der, bound=tol,
            detail="" if end_der_cell is None else f"cell {end_der_cell}",
        ),
        "sup_phi": ClauseResult(passed=sup_phi < 1.0, measured=sup_phi, bound=1.0),
        "sup_dphi": ClauseResult(passed=sup_dphi < 1.0, measured=sup_dphi, bound=1.0),
        "l2": ClauseResult(passed=norm <= 1.0, measured=norm, bound=1.0),
        "envelope_phi": ClauseResult(
            passed=env_phi <= 1.0 + _ENVELOPE_RTOL, measured=env_phi, bound=1.0,
            detail="ratio sup|phi| / 2^-(|j|+1)"
            + ("" if env_phi_cell is None else f", worst cell {env_phi_cell}"),
        ),
        "envelope_dphi": ClauseResult(
            passed=env_dphi <= 1.0 + _ENVELOPE_RTOL, measured=env_dphi, bound=1.0,
            detail="ratio sup|phi'| / 2^-(|j|+1)"
            + ("" if env_dphi_cell is None else f", worst cell {env_dphi_cell}"),
        ),
    }
    report = ValidationReport(
        clauses=clauses,
        cells=cell_list,
        window=(lo, hi),
        cells_outside_window=outside,
        l2_norm=norm,
    )
    if not report.passed:
        logger.info(f"initial data fails clauses {report.failing_clauses()}")
    return report


def dump_initial_data(phi: InitialData) -> dict:
    """JSON document {"bumps": [{"cell": j, "amplitude": a}, ...]} (+ raw samples if any)."""
    doc = {"bumps": [b.model_dump() for b in phi.bumps]}
    if phi.samples:
        doc["samples"] = [s.model_dump() for s in phi.samples]
    return doc


def load_initial_data(doc: dict) -> InitialData:
    return InitialData.model_validate(doc)
