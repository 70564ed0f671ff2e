"""
Domain Models

Plain data carried between the numerical kernel, the run facade and the CLI:
tile geometry, initial data, solver/oracle configuration and every report block
that ends up in the run JSON.

Models holding numpy arrays (grid functions, traces, tile solutions) live next
to the kernels that produce them in ``src.core``; everything here serializes to
JSON without custom encoders.
"""

from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, computed_field, field_validator, model_validator

from ..config.settings import settings


def _check_odd_nodes(v: int) -> int:
    if v < 3 or v % 2 == 0:
        raise ValueError(f"node count must be odd and >= 3, got {v}")
    return v


class TileSpec(BaseModel):
    """
    One unit rectangle [k, k+1] x [j, j+1] of space-time with its resolution.

    Example: TileSpec(slab_k=0, cell_j=1) covers t in [0, 1], x in [1, 2].
    """
    model_config = ConfigDict(frozen=True)

    slab_k: int = Field(description="Time interval [k, k+1]")
    cell_j: int = Field(description="Space interval [j, j+1]")
    nt: int = Field(default_factory=lambda: settings.grid.nt, description="Nodes in t")
    nx: int = Field(default_factory=lambda: settings.grid.nx, description="Nodes in x")

    @field_validator("nt", "nx")
    @classmethod
    def odd_node_count(cls, v: int) -> int:
        """Odd counts keep midpoints representable and refinements nested"""
        return _check_odd_nodes(v)

    @property
    def ht(self) -> float:
        return 1.0 / (self.nt - 1)

    @property
    def hx(self) -> float:
        return 1.0 / (self.nx - 1)

    @property
    def t_nodes(self) -> np.ndarray:
        return self.slab_k + np.linspace(0.0, 1.0, self.nt)

    @property
    def x_nodes(self) -> np.ndarray:
        return self.cell_j + np.linspace(0.0, 1.0, self.nx)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.nt, self.nx)

    def refined(self) -> "TileSpec":
        """Same tile with h halved in both directions."""
        return self.model_copy(update={"nt": 2 * self.nt - 1, "nx": 2 * self.nx - 1})


# ---------------------------------------------------------------------------
# Initial data
# ---------------------------------------------------------------------------

class Bump(BaseModel):
    """a_j * psi(x - j) on cell j, with psi(s) = 16 s^2 (1-s)^2."""
    model_config = ConfigDict(frozen=True)

    cell: int = Field(description="Cell index j")
    amplitude: float = Field(ge=0.0, description="Peak value a_j, reached at the cell midpoint")


class SampledCell(BaseModel):
    """Raw data on one cell: values at uniformly spaced nodes covering [j, j+1]."""
    model_config = ConfigDict(frozen=True)

    cell: int
    values: List[float] = Field(min_length=3)


class InitialData(BaseModel):
    """
    Initial profile phi as a finite family of per-cell contributions.

    Cells without a contribution carry phi = 0.
    """
    model_config = ConfigDict(frozen=True)

    bumps: List[Bump] = Field(default_factory=list)
    samples: List[SampledCell] = Field(default_factory=list)

    @model_validator(mode="after")
    def one_contribution_per_cell(self) -> "InitialData":
        cells = [b.cell for b in self.bumps] + [s.cell for s in self.samples]
        if len(cells) != len(set(cells)):
            raise ValueError("at most one bump or sample per cell")
        return self

    @property
    def active_cells(self) -> List[int]:
        return sorted([b.cell for b in self.bumps] + [s.cell for s in self.samples])

    def bump_on(self, cell: int) -> Optional[Bump]:
        return next((b for b in self.bumps if b.cell == cell), None)

    def sample_on(self, cell: int) -> Optional[SampledCell]:
        return next((s for s in self.samples if s.cell == cell), None)

    def without_cell(self, cell: int) -> "InitialData":
        return InitialData(
            bumps=[b for b in self.bumps if b.cell != cell],
            samples=[s for s in self.samples if s.cell != cell],
        )


class ClauseResult(BaseModel):
    """One clause of the admissibility hypothesis with its measured value."""
    passed: bool
    measured: float
    bound: float
    detail: str = ""


class CellCheck(BaseModel):
    """Per-cell measurements taken by the validator."""
    cell: int
    endpoint_values: Tuple[float, float]
    endpoint_slopes: Tuple[float, float]
    sup_phi: float
    sup_dphi: float
    envelope: Optional[float] = Field(
        default=None, description="2^-(|j|+1) when the cell is in the window"
    )
    margin_phi: Optional[float] = None
    margin_dphi: Optional[float] = None


class ValidationReport(BaseModel):
    """Clause-by-clause verdict; overall pass iff every clause passes."""
    clauses: Dict[str, ClauseResult]
    cells: List[CellCheck]
    window: Tuple[int, int]
    cells_outside_window: List[int] = Field(default_factory=list)
    l2_norm: float

    @computed_field
    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.clauses.values())

    def failing_clauses(self) -> List[str]:
        return [name for name, c in self.clauses.items() if not c.passed]


# ---------------------------------------------------------------------------
# Solver / oracle configuration
# ---------------------------------------------------------------------------

class SolverConfig(BaseModel):
    """Stop and acceptance thresholds for one tile solve."""
    model_config = ConfigDict(frozen=True)

    tol: float = Field(default_factory=lambda: settings.solver.tol, gt=0)
    max_iter: int = Field(default_factory=lambda: settings.solver.max_iter, ge=1)
    residual_tol: float = Field(default_factory=lambda: settings.solver.residual_tol, gt=0)
    volterra_tol: float = Field(default_factory=lambda: settings.solver.volterra_tol, gt=0)
    blowup: float = Field(default_factory=lambda: settings.solver.blowup, gt=0)


class OracleConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    root_tol: float = Field(default_factory=lambda: settings.oracle.root_tol, gt=0)
    max_bisections: int = Field(default_factory=lambda: settings.oracle.max_bisections, ge=1)


# ---------------------------------------------------------------------------
# Report blocks
# ---------------------------------------------------------------------------

class SBoundReport(BaseModel):
    """Largest sampled ratios sup|S u|/eps, sup|d_t S u|/eps, sup|d_x S u|/eps."""
    ratio_s: float
    ratio_st: float
    ratio_sx: float
    max_c1_su: float = Field(description="Largest c1 norm of S u over the samples")
    n_samples: int
    seed: int
    violations: List[int] = Field(
        default_factory=list, description="Seed offsets of violating samples"
    )

    @computed_field
    @property
    def passed(self) -> bool:
        return not self.violations


class TileVerification(BaseModel):
    residual_sup: float
    volterra_residual_sup: float
    pde_residual_sup: float
    bottom_mismatch: float
    left_trace_sup: float
    right_trace_sup: float


class InterfaceMetrics(BaseModel):
    """Traces on the interior edge x = j shared by cells j-1 (left) and j (right)."""
    x: int
    value_left: float
    value_right: float
    slope_left: float
    slope_right: float
    ut_mismatch: float


class InterfaceReport(BaseModel):
    interfaces: List[InterfaceMetrics] = Field(default_factory=list)
    max_value: float = 0.0
    max_slope: float = 0.0
    max_ut_mismatch: float = 0.0

    def passed(self, trace_tol: float, slope_tol: float, ut_tol: float) -> bool:
        return (
            self.max_value <= trace_tol
            and self.max_slope <= slope_tol
            and self.max_ut_mismatch <= ut_tol
        )


class CellEnvelope(BaseModel):
    cell: int
    bound: float
    sup_u: float
    sup_ut: float
    sup_ux: float
    margin_u: float
    margin_ut: float
    margin_ux: float
    extrapolated: bool = Field(default=False, description="Bound beyond the second slab")


class EnvelopeReport(BaseModel):
    slab_k: int
    cells: List[CellEnvelope]
    tolerance: float

    @computed_field
    @property
    def passed(self) -> bool:
        return all(
            min(c.margin_u, c.margin_ut, c.margin_ux) >= -self.tolerance for c in self.cells
        )


class TileSummary(BaseModel):
    """The per-cell line of a slab report."""
    cell: int
    iterations: int
    final_update: float
    residual_sup: float
    glued_residual_sup: float
    volterra_residual_sup: float
    pde_residual_sup: float


class SlabReport(BaseModel):
    slab_k: int
    tiles: List[TileSummary]
    interfaces: InterfaceReport
    envelope: EnvelopeReport


class SlabFailure(BaseModel):
    """Where and why a multi-slab run stopped."""
    slab_k: int
    cell_j: Optional[int] = None
    kind: str = Field(description="non_convergence | shock_ahead | residual | interface_data")
    message: str
    t_shock: Optional[float] = None


class OracleReport(BaseModel):
    sup_err: float
    l2_err: float
    ratio: Optional[float] = None
    t_shock: Optional[float] = Field(default=None, description="None when no crossing occurs")
    bound: Optional[float] = None

    @computed_field
    @property
    def passed(self) -> bool:
        return self.bound is None or self.sup_err <= self.bound


class OperatorReport(BaseModel):
    """Block written by the operator diagnostics."""
    epsilon: float
    h_min: float
    onto_residual: float
    identity_max: float
    lipschitz_max: float
    bounds: SBoundReport
    seed: int
    passed: bool


# ---------------------------------------------------------------------------
# Run configuration and report
# ---------------------------------------------------------------------------

class RunConfig(BaseModel):
    """
    A single JSON document drives every CLI command.

    Example:
        {"cells": [-3, 3], "slabs": 1, "bumps": [{"cell": 0, "amplitude": 0.15}]}
    """
    model_config = ConfigDict(extra="forbid")

    cells: Tuple[int, int] = (-3, 3)
    slabs: int = Field(default=1, ge=1)
    nx: int = Field(default_factory=lambda: settings.grid.nx)
    nt: int = Field(default_factory=lambda: settings.grid.nt)
    epsilon: Optional[float] = Field(
        default=None, gt=0.0, lt=1.0, description="None selects the per-cell schedule"
    )
    tol: float = Field(default_factory=lambda: settings.solver.tol, gt=0)
    residual_tol: float = Field(default_factory=lambda: settings.solver.residual_tol, gt=0)
    max_iter: int = Field(default_factory=lambda: settings.solver.max_iter, ge=1)
    bumps: List[Bump] = Field(default_factory=list)
    samples: List[SampledCell] = Field(default_factory=list)
    seed: int = Field(default_factory=lambda: settings.operator.seed, ge=0)
    n_samples: int = Field(default_factory=lambda: settings.operator.n_samples, ge=0)
    oracle_bound: float = Field(default_factory=lambda: settings.oracle.error_bound, gt=0)
    refine: bool = Field(default=False, description="Also run at 2n-1 nodes and report the ratio")
    out_dir: str = "out"

    @field_validator("nx", "nt")
    @classmethod
    def odd_node_count(cls, v: int) -> int:
        return _check_odd_nodes(v)

    @field_validator("cells")
    @classmethod
    def ordered_cells(cls, v: Tuple[int, int]) -> Tuple[int, int]:
        if v[0] > v[1]:
            raise ValueError(f"cells must satisfy J- <= J+, got {list(v)}")
        return v

    @property
    def initial_data(self) -> InitialData:
        return InitialData(bumps=self.bumps, samples=self.samples)

    def solver_config(self) -> SolverConfig:
        return SolverConfig(tol=self.tol, residual_tol=self.residual_tol, max_iter=self.max_iter)


class RunReport(BaseModel):
    """Everything ``solve`` learned, in deterministic order."""
    config: RunConfig
    validation: ValidationReport
    slabs: List[SlabReport] = Field(default_factory=list)
    failure: Optional[SlabFailure] = None
    oracle: Optional[OracleReport] = None
    operators: Optional[OperatorReport] = None
    passed: bool = False
