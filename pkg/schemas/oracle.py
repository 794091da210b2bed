"""Oracle report contract."""

from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field


class OracleMethod(str, Enum):
    """How an oracle value was obtained."""
    GRID_1D = "grid_1d"
    EIGEN_2X2 = "eigen_2x2"
    EIGEN_DENSE = "eigen_dense"
    FINITE_DIFFERENCE = "finite_difference"


class OracleReport(BaseModel):
    """
    Independent reference value for β (and the matching φ, λ).

    gap is filled by `compare` once a solver β is known.
    """

    beta_oracle: float
    lambda_oracle: float
    phi_oracle: List[float] = Field(..., description="Normalized to ∫ f φ^α dμ = 1")
    method: OracleMethod
    gap: Optional[float] = Field(default=None, ge=0)
    check: float = Field(
        ...,
        ge=0,
        description="Internal consistency measure: last refinement change (grid) or eigen residual",
    )

    model_config = ConfigDict(frozen=True)

    def compare(self, beta_solver: float) -> "OracleReport":
        """Copy with gap = |beta_solver − beta_oracle|."""
        return self.model_copy(update={"gap": abs(beta_solver - self.beta_oracle)})
