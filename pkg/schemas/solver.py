"""
Solver contracts: configuration in, result out.
"""

from enum import Enum
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from utils.errors import InstanceValidationError


class InitPolicy(str, Enum):
    """How restart 0 is initialised; later restarts are always random positive."""
    CONSTANT = "constant"
    RANDOM_POSITIVE = "random_positive"
    USER_SUPPLIED = "user_supplied"


class SolverConfig(BaseModel):
    """
    Projected-gradient solver settings.

    grad_tol is relative: a run converges when
    ‖residual‖_∞ ≤ grad_tol · (1 + ‖λ f φ^{α−1}‖_∞).
    """

    max_iters: int = Field(default=100000, gt=0)
    grad_tol: float = Field(default=1e-9, gt=0)
    step_init: float = Field(default=1.0, gt=0)
    armijo_c: float = Field(default=1e-4, gt=0, lt=1)
    backtrack_factor: float = Field(default=0.5, gt=0, lt=1)
    floor_eps: float = Field(default=1e-14, gt=0)
    restarts: int = Field(default=3, ge=1, description="Total descent runs")
    seed: int = 0
    init_policy: InitPolicy = InitPolicy.CONSTANT
    initial_phi: Optional[Tuple[float, ...]] = Field(
        default=None, description="Restart-0 start when init_policy is user_supplied"
    )
    step_growth: float = Field(default=2.0, ge=1)
    step_max: float = Field(default=1e6, gt=0)
    spectral_step: bool = Field(default=True, description="Trial step sᵀy/yᵀy from the last accepted move")
    max_backtracks: int = Field(default=60, gt=0)
    trace: bool = False
    trace_every: int = Field(default=1, gt=0)

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def validate_initial_phi(self) -> "SolverConfig":
        if self.init_policy == InitPolicy.USER_SUPPLIED and self.initial_phi is None:
            raise InstanceValidationError("initial_phi", "required when init_policy is user_supplied")
        if self.initial_phi is not None:
            for k, value in enumerate(self.initial_phi):
                if value < 0:
                    raise InstanceValidationError("initial_phi", f"must be nonnegative, got {value}", k)
        return self

    @classmethod
    def from_config(cls, cfg, **overrides) -> "SolverConfig":
        """
        Defaults from the environment config; explicit overrides win (None means unset).

        Raises:
            InstanceValidationError: a value is out of range (names the field)
        """
        values = {
            "max_iters": cfg.MAX_ITERS,
            "grad_tol": cfg.GRAD_TOL,
            "restarts": cfg.RESTARTS,
            "floor_eps": cfg.FLOOR_EPS,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        try:
            return cls(**values)
        except ValidationError as e:
            err = e.errors()[0]
            field = str(err["loc"][0]) if err.get("loc") else "solver config"
            raise InstanceValidationError(field, err.get("msg", "invalid value")) from None


class TraceEntry(BaseModel):
    """One accepted iterate."""

    iteration: int
    energy: float
    residual_inf: float
    sobolev_p: float = Field(..., description="‖φ_k‖_{W^{1,p}}^p")
    step: float

    model_config = ConfigDict(frozen=True)


class SolveResult(BaseModel):
    """
    Outcome of `solve`.

    phi is normalized to ∫ f φ^α dμ = 1, so lambda = −beta up to rounding.
    """

    phi: List[float]
    lambda_: float = Field(..., alias="lambda")
    beta: float
    residual_inf: float
    relative_residual: float
    iterations: int
    converged: bool
    restart_index: int
    restart_betas: List[Optional[float]] = Field(
        default_factory=list, description="Final β per restart, None for restarts that did not converge"
    )
    restarts_agree: bool = True
    trace: Optional[List[TraceEntry]] = None

    model_config = ConfigDict(populate_by_name=True)
