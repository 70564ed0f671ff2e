"""
Run Pipeline - Orchestrator

Drives the four flows the command line exposes over one RunConfig:

validate: Initial data -> clause report
solve:    Validate -> Advance slabs -> Operator diagnostics -> Oracle -> Report
oracle:   Advance slabs -> Compare with characteristics (optionally at two resolutions)
opcheck:  Operator diagnostics on the (0, 0) tile

Each step appends to an execution log and records its wall time; the run
report itself never contains timings, so it stays reproducible.
"""

import time
from contextlib import contextmanager
from datetime import datetime
from typing import Dict, List, Optional

from loguru import logger

from ..config.settings import settings
from ..models.domain import (
    OperatorReport,
    OracleConfig,
    OracleReport,
    RunConfig,
    RunReport,
    SlabReport,
    TileSpec,
    ValidationReport,
)
from .assembler import GlobalSolution, advance
from .characteristics import compare, refinement_ratio, shock_time
from .errors import ConfigError, PastShockError
from .initial_data import sample_bottom, validate
from .operators import OperatorParams, epsilon_for_cell, run_diagnostics


class TilesPipeline:
    """
    Facade over the numerical kernel for one run configuration.

    Example:
        pipeline = TilesPipeline(config)
        report = pipeline.run_solve()
    """

    def __init__(self, config: RunConfig):
        self.config = config
        self.phi = config.initial_data
        self.validation: Optional[ValidationReport] = None
        self.solution: Optional[GlobalSolution] = None
        self.oracle_report: Optional[OracleReport] = None
        self.operator_report: Optional[OperatorReport] = None
        self.timings: Dict[str, float] = {}
        self.execution_log: List[str] = []

    def log(self, message: str):
        timestamp = datetime.now().strftime("%H:%M:%S")
        self.execution_log.append(f"[{timestamp}] {message}")
        logger.info(message)

    @contextmanager
    def phase(self, name: str):
        start = time.perf_counter()
        try:
            yield
        finally:
            self.timings[name] = self.timings.get(name, 0.0) + time.perf_counter() - start

    # ------------------------------------------------------------------
    # Steps
    # ------------------------------------------------------------------

    def validate_data(self) -> ValidationReport:
        self.log(f"Validating initial data on cells {list(self.config.cells)}...")
        with self.phase("validate"):
            self.validation = validate(self.phi, self.config.cells, self.config.nx)
        if self.validation.passed:
            self.log("Initial data admissible")
        else:
            self.log(f"Initial data fails {self.validation.failing_clauses()}")
        return self.validation

    def advance_slabs(self, nx: Optional[int] = None, nt: Optional[int] = None) -> GlobalSolution:
        nx = nx or self.config.nx
        nt = nt or self.config.nt
        self.log(f"Advancing {self.config.slabs} slab(s) at {nt}x{nx} nodes per tile...")
        with self.phase(f"advance_{nt}x{nx}"):
            solution = advance(
                self.phi,
                self.config.slabs,
                self.config.cells,
                self.config.solver_config(),
                nx=nx,
                nt=nt,
                epsilon=self.config.epsilon,
            )
        if solution.failure:
            self.log(f"Stopped at slab {solution.failure.slab_k}: {solution.failure.message}")
        else:
            self.log(f"Solved {len(solution.slabs)} slab(s)")
        return solution

    def compare_with_oracle(self) -> OracleReport:
        """Oracle report for the configured resolution, with the 2n-1 ratio if ``refine``."""
        t_shock = shock_time(self.phi)
        if self.config.slabs >= t_shock:
            raise PastShockError(
                f"{self.config.slabs} slab(s) reach the shock time T* = {t_shock:.6f}",
                t_shock=t_shock,
            )
        if self.solution is None:
            self.solution = self.advance_slabs()
        with self.phase("oracle"):
            if self.config.refine and self.solution.completed:
                fine = self.advance_slabs(2 * self.config.nx - 1, 2 * self.config.nt - 1)
                if fine.completed:
                    self.oracle_report, _ = refinement_ratio(
                        self.solution, fine, self.phi, OracleConfig(), self.config.oracle_bound
                    )
                    return self.oracle_report
            self.oracle_report = compare(
                self.solution, self.phi, OracleConfig(), self.config.oracle_bound
            )
        return self.oracle_report

    def check_operators(self) -> OperatorReport:
        """Operator diagnostics on the (0, 0) tile; eps follows the cell schedule unless set."""
        if self.config.n_samples < 1:
            raise ConfigError("operator diagnostics need n_samples >= 1")
        tile = TileSpec(slab_k=0, cell_j=0, nt=self.config.nt, nx=self.config.nx)
        epsilon = self.config.epsilon
        if epsilon is None:
            epsilon = epsilon_for_cell(tile.cell_j)
        params = OperatorParams.for_tile(tile, sample_bottom(self.phi, tile), epsilon=epsilon)
        self.log(f"Operator diagnostics: eps={epsilon}, {self.config.n_samples} samples")
        with self.phase("opcheck"):
            self.operator_report = run_diagnostics(params, self.config.n_samples, self.config.seed)
        return self.operator_report

    # ------------------------------------------------------------------
    # Verdicts
    # ------------------------------------------------------------------

    def slab_reports(self) -> List[SlabReport]:
        return [slab.report() for slab in self.solution.slabs] if self.solution else []

    def checks_pass(self, slabs: List[SlabReport]) -> bool:
        """Residual, interface and envelope checks of every solved slab."""
        c = settings.checks
        for s in slabs:
            if any(t.glued_residual_sup > self.config.residual_tol for t in s.tiles):
                return False
            if not s.interfaces.passed(c.trace_tol, c.slope_tol, c.ut_tol):
                return False
            if not s.envelope.passed:
                return False
        return True

    def generate_report(self) -> RunReport:
        if self.validation is None:
            raise ValueError("Must validate initial data first")
        slabs = self.slab_reports()
        failure = self.solution.failure if self.solution else None
        passed = failure is None and self.validation.passed and self.checks_pass(slabs)
        if self.operator_report is not None:
            passed = passed and self.operator_report.passed
        return RunReport(
            config=self.config,
            validation=self.validation,
            slabs=slabs,
            failure=failure,
            oracle=self.oracle_report,
            operators=self.operator_report,
            passed=passed,
        )

    # ------------------------------------------------------------------
    # Flows
    # ------------------------------------------------------------------

    def run_solve(self) -> RunReport:
        """Validate, advance, sample the operators, then run the oracle if the run completed."""
        self.log("=" * 60)
        self.log("Starting tile solve")
        self.log("=" * 60)
        self.validate_data()
        self.solution = self.advance_slabs()
        if self.config.n_samples > 0:
            self.check_operators()
        if self.solution.completed:
            try:
                self.compare_with_oracle()
            except PastShockError as e:
                self.log(f"Oracle skipped: {e}")
        report = self.generate_report()
        self.log(f"Run {'passed' if report.passed else 'did not pass'}")
        return report

    def get_execution_summary(self) -> str:
        return "\n".join(self.execution_log)
