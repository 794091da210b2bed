"""Energy functional contracts."""

from pydantic import BaseModel, ConfigDict, Field


class EnergyBreakdown(BaseModel):
    """
    The three integrals behind I(φ) and the derived quantities.

    energy = (dirichlet − h_term) · constraint^{−p/α}
    lambda = −(dirichlet − h_term) / constraint
    """

    dirichlet: float = Field(..., description="∫_E |∇φ|^p dω")
    h_term: float = Field(..., description="∫_V h φ^p dμ")
    constraint: float = Field(..., description="∫_V f φ^α dμ")
    energy: float = Field(..., description="I(φ)")
    lambda_: float = Field(..., alias="lambda", description="λ_φ")

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    @property
    def numerator(self) -> float:
        return self.dirichlet - self.h_term


class BoundConstants(BaseModel):
    """Extremes of h and f and the graph volume used by the a-priori bounds."""

    f_max: float
    f_min: float
    neg_h_min: float = Field(..., description="(−h)_m = min_i(−h_i)")
    abs_h_max: float = Field(..., description="|h|_M = max_i |h_i|")
    volume: float

    model_config = ConfigDict(frozen=True)
