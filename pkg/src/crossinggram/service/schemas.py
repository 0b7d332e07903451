"""Request and response models for the coefficient service."""

from __future__ import annotations

from typing import Any, Literal, Optional

from pydantic import BaseModel, Field, model_validator

from ..model import ModelConfig
from ..runspec import ConfigError


class ModelSpec(BaseModel):
    """Wire form of a model configuration; same schema as the JSON file."""

    annuli: list[float] = Field(default_factory=list)
    betas: list[float]
    d: float = 1.0
    norm: str = "euclidean"

    @model_validator(mode="after")
    def _check_buildable(self) -> "ModelSpec":
        self.to_config()  # raises with a precise message on bad parameters
        return self

    def to_config(self) -> ModelConfig:
        try:
            return ModelConfig.from_dict(self.model_dump())
        except ValueError as exc:
            raise ConfigError(f"bad model config: {exc}") from None


class SimulateSpec(BaseModel):
    """Everything a deterministic simulation needs."""

    model: ModelSpec
    domain: str = Field(description="disk:<r> or file:<path>")
    n: int = Field(default=1000, ge=1)
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    field: Literal["model", "independent", "totally_dependent"] = "model"
    threads: Optional[int] = Field(default=None, ge=1)


class SimulateRequest(SimulateSpec):
    pass


class SimulateResponse(BaseModel):
    n: int
    domain_size: int
    provenance: dict[str, Any]
    csv: str
    sidecar: dict[str, Any]


class CoefficientPayload(BaseModel):
    """Wire form of a CoefficientReport."""

    region: list[list[int]]
    d: float
    norm: str
    kind: str
    method: str
    value: float
    diagnostics: dict[str, Any] = Field(default_factory=dict)


class ExactRequest(BaseModel):
    model: ModelSpec
    region: str = Field(description="disk:<r>@<x>,<y>, annulus:<r1>,<r2> or file:<path>")
    d: Optional[float] = None      # defaults to the model config's d
    norm: Optional[str] = None     # defaults to the model config's norm


class ExactResponse(BaseModel):
    zeta: CoefficientPayload
    zeta_star: CoefficientPayload
    gamma: Optional[CoefficientPayload]
    theta_region: float
    theta_site_min: float
    theta_site_max: float
    theta_site_mean: float
    region_size: int
    v_sum: int


class SampleRef(BaseModel):
    """A sample, carried inline or simulated on the fly (exactly one)."""

    sample_csv: Optional[str] = None
    sample_sidecar: Optional[dict[str, Any]] = None
    simulate: Optional[SimulateSpec] = None

    @model_validator(mode="after")
    def _exactly_one_source(self) -> "SampleRef":
        if (self.sample_csv is None) == (self.simulate is None):
            raise ValueError("provide exactly one of sample_csv or simulate")
        return self


class PairSpec(BaseModel):
    x1: list[int]
    x2: list[int]

    @model_validator(mode="after")
    def _two_coords(self) -> "PairSpec":
        if len(self.x1) != 2 or len(self.x2) != 2:
            raise ValueError("pair points must be [x, y] coordinate pairs")
        return self


class EstimateRequest(SampleRef):
    region: str
    d: float = 1.0
    norm: str = "euclidean"
    clip: bool = False
    pairs: list[PairSpec] = Field(default_factory=list)


class BetaEstimate(BaseModel):
    x1: list[int]
    x2: list[int]
    value: float


class EstimateResponse(BaseModel):
    zeta: CoefficientPayload
    zeta_star: CoefficientPayload
    betas: list[BetaEstimate]
    n: int
    tie_pairs: int
    provenance: dict[str, Any]


class SweepRequest(SampleRef):
    region: str
    d: float = 1.0
    norm: str = "euclidean"
    levels: list[float] = Field(default=[0.90, 0.95, 0.99, 0.995])
    mode: Literal["auto", "parametric", "rank"] = "auto"


class SweepRow(BaseModel):
    u: float
    zeta_u: Optional[float]
    zeta_star_u: Optional[float]
    conditioning_count: int
    oscillations: int
    exceedances: int


class SweepResponse(BaseModel):
    rows: list[SweepRow]
    csv: str
    mode: Literal["parametric", "rank"]


class MapRequest(BaseModel):
    mode: Literal["exact", "estimate"] = "exact"
    window: int = Field(ge=0)
    stride: int = Field(default=1, ge=1)
    d: float = 1.0
    norm: str = "euclidean"
    # exact mode: model + domain of window centers
    model: Optional[ModelSpec] = None
    domain: Optional[str] = None
    # estimate mode: a sample; centers default to its domain
    sample_csv: Optional[str] = None
    sample_sidecar: Optional[dict[str, Any]] = None
    simulate: Optional[SimulateSpec] = None
    clip: bool = False

    @model_validator(mode="after")
    def _mode_requirements(self) -> "MapRequest":
        if self.mode == "exact":
            if self.model is None or self.domain is None:
                raise ValueError("exact map mode needs model and domain")
        else:
            if (self.sample_csv is None) == (self.simulate is None):
                raise ValueError("estimate map mode needs exactly one of sample_csv or simulate")
        return self


class MapRow(BaseModel):
    x1: int
    x2: int
    zeta: float


class MapResponse(BaseModel):
    rows: list[MapRow]
    skipped: int
    csv: str


class HealthResponse(BaseModel):
    status: str
    version: str
