"""
Schemas package - All data contracts.

Pydantic models shared by the services, agents and the CLI.
"""

from schemas.graph import (
    GraphArrays,
    WeightedGraph,
    ProblemInstance,
)

from schemas.energy import (
    EnergyBreakdown,
    BoundConstants,
)

from schemas.solver import (
    InitPolicy,
    SolverConfig,
    TraceEntry,
    SolveResult,
)

from schemas.oracle import (
    OracleMethod,
    OracleReport,
)

from schemas.run_record import (
    RunRecord,
    SweepRow,
    VerifyReport,
    GradcheckReport,
)

__all__ = [
    # Graph
    "GraphArrays",
    "WeightedGraph",
    "ProblemInstance",
    # Energy
    "EnergyBreakdown",
    "BoundConstants",
    # Solver
    "InitPolicy",
    "SolverConfig",
    "TraceEntry",
    "SolveResult",
    # Oracles
    "OracleMethod",
    "OracleReport",
    # CLI records
    "RunRecord",
    "SweepRow",
    "VerifyReport",
    "GradcheckReport",
]
