# Models Package
from .domain import (
    TileSpec,
    Bump,
    SampledCell,
    InitialData,
    ClauseResult,
    CellCheck,
    ValidationReport,
    SolverConfig,
    OracleConfig,
    SBoundReport,
    TileVerification,
    InterfaceMetrics,
    InterfaceReport,
    CellEnvelope,
    EnvelopeReport,
    TileSummary,
    SlabReport,
    SlabFailure,
    OracleReport,
    OperatorReport,
    RunConfig,
    RunReport,
)

__all__ = [
    "TileSpec",
    "Bump",
    "SampledCell",
    "InitialData",
    "ClauseResult",
    "CellCheck",
    "ValidationReport",
    "SolverConfig",
    "OracleConfig",
    "SBoundReport",
    "TileVerification",
    "InterfaceMetrics",
    "InterfaceReport",
    "CellEnvelope",
    "EnvelopeReport",
    "TileSummary",
    "SlabReport",
    "SlabFailure",
    "OracleReport",
    "OperatorReport",
    "RunConfig",
    "RunReport",
]
