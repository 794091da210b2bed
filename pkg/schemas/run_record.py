"""
Command output contracts.

Each model serializes to one JSON object (by alias, so λ appears as "lambda").
"""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from schemas.solver import SolveResult, SolverConfig, TraceEntry


class RunRecord(BaseModel):
    """One `solve` invocation: what was solved, how, and the result."""

    instance: str = Field(..., description="Instance file path or generator spec")
    config: Dict[str, Any]
    phi: List[float]
    lambda_: float = Field(..., alias="lambda")
    beta: float
    residual_inf: float
    relative_residual: float
    iterations: int
    converged: bool
    restart_index: int
    restart_betas: List[Optional[float]]
    restarts_agree: bool
    trace: Optional[List[TraceEntry]] = None
    wall_time_ms: float
    version: str

    model_config = ConfigDict(populate_by_name=True)

    @classmethod
    def from_result(
        cls,
        instance: str,
        cfg: SolverConfig,
        result: SolveResult,
        wall_time_ms: float,
        version: str,
    ) -> "RunRecord":
        return cls(
            instance=instance,
            config=cfg.model_dump(mode="json"),
            wall_time_ms=wall_time_ms,
            version=version,
            **result.model_dump(by_alias=True),
        )


class SweepRow(BaseModel):
    """One (instance, p, α) solve in a sweep."""

    instance: str
    n: int
    p: float
    alpha: float
    beta: float
    lambda_: float = Field(..., alias="lambda")
    residual_inf: float
    iterations: int
    converged: bool

    model_config = ConfigDict(populate_by_name=True)


# CSV column order
SWEEP_COLUMNS = ["instance", "n", "p", "alpha", "beta", "lambda", "residual_inf", "iterations", "converged"]


class VerifyReport(BaseModel):
    """Independent check of a claimed solution (φ, λ)."""

    residual: List[float] = Field(..., description="Δ_pφ + hφ^{p−1} − λfφ^{α−1} per vertex")
    residual_inf: float
    relative_residual: float
    tol: float
    positive: bool
    nonpositive_indices: List[int] = Field(default_factory=list)
    constraint: float = Field(..., description="∫ f |φ|^α dμ")
    lambda_: float = Field(..., alias="lambda")
    lambda_phi: Optional[float] = Field(default=None, description="λ_φ, when φ > 0")
    passed: bool

    model_config = ConfigDict(populate_by_name=True)


class GradcheckReport(BaseModel):
    """energy_gradient against central finite differences on random positive φ."""

    instance: str
    trials: int
    seed: int
    errors: List[float] = Field(default_factory=list, description="Relative error per trial")
    max_relative_error: Optional[float] = None
    threshold: float
    passed: bool
    note: Optional[str] = None
