"""
Configuration Management System

Defaults for every tolerance, resolution and sampling knob of the solver live here.
Values are loaded (highest priority first) from environment variables prefixed
with ``BURGERS_TILES_``, a ``.env`` file, then the defaults below. Nested sections
use ``__`` as delimiter, e.g. ``BURGERS_TILES_SOLVER__MAX_ITER=400``.

Run configuration files (see ``src.models.domain.RunConfig``) draw their defaults
from the singleton ``settings`` defined at the bottom of this module.
"""

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class GridSettings(BaseSettings):
    """Per-tile resolution. Node counts must be odd so refinements nest."""
    nx: int = Field(default=65, ge=3, description="Nodes per tile in x")
    nt: int = Field(default=65, ge=3, description="Nodes per tile in t")


class SolverSettings(BaseSettings):
    """
    Picard iteration controls for the tile equation.

    ``residual_tol`` bounds the integral residual F, which is a second-order
    discretization quantity; ``volterra_tol`` bounds the residual of the
    differentiated form the iteration actually solves.
    """
    tol: float = Field(default=1e-10, gt=0, description="Sup-norm stop threshold on updates")
    max_iter: int = Field(default=200, ge=1, description="Maximum Picard iterations per tile")
    residual_tol: float = Field(default=1e-3, gt=0, description="Accepted sup |F(u)|")
    volterra_tol: float = Field(default=1e-8, gt=0, description="Accepted Volterra residual")
    blowup: float = Field(default=1e6, gt=0, description="Update size treated as divergence")
    workers: int = Field(default=1, ge=1, description="Threads used to solve cells of a slab")


class OracleSettings(BaseSettings):
    """Characteristics root finder."""
    root_tol: float = Field(default=1e-13, gt=0)
    max_bisections: int = Field(default=200, ge=1)
    error_bound: float = Field(default=5e-3, gt=0, description="Accepted sup error vs oracle")


class OperatorSettings(BaseSettings):
    """Sampling diagnostics for the (T, S) operator pair."""
    epsilon: float = Field(default=0.05, gt=0.0, lt=1.0)
    n_samples: int = Field(default=100, ge=0)
    seed: int = Field(default=0, ge=0)
    bound_slack: float = Field(default=1e-6, ge=0.0)


class CheckSettings(BaseSettings):
    """Tolerances for interface, envelope and data checks."""
    trace_tol: float = Field(default=1e-8, description="Interface value traces")
    slope_tol: float = Field(default=2e-2, description="Interface slope traces (O(h^2) stencils)")
    ut_tol: float = Field(default=1e-6, description="u_t mismatch across interfaces")
    envelope_tol: float = Field(default=1e-6, description="Allowed negative envelope margin")
    data_trace_tol: float = Field(default=1e-8, description="Bottom data at cell endpoints")
    endpoint_tol: float = Field(default=1e-10, description="C0^1 endpoint clauses of the data")


class Settings(BaseSettings):
    """
    Master Configuration Class

    Aggregates all configuration sections.
    """

    log_level: str = Field(default="INFO")

    grid: GridSettings = Field(default_factory=GridSettings)
    solver: SolverSettings = Field(default_factory=SolverSettings)
    oracle: OracleSettings = Field(default_factory=OracleSettings)
    operator: OperatorSettings = Field(default_factory=OperatorSettings)
    checks: CheckSettings = Field(default_factory=CheckSettings)

    model_config = SettingsConfigDict(
        env_prefix="BURGERS_TILES_",
        env_file=".env",
        env_file_encoding="utf-8",
        env_nested_delimiter="__",
        case_sensitive=False,
        extra="ignore",
    )


# Singleton instance - import this throughout the application
settings = Settings()
