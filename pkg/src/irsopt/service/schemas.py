"""Request and response models for the HTTP service."""
from __future__ import annotations

from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, model_validator

from ..config import ConfigError, SystemConfig


class SystemConfigModel(BaseModel):
    """Wire form of SystemConfig; unknown fields are rejected."""

    model_config = ConfigDict(extra="forbid")

    mt: int = 16
    mr: int = 4
    mi: int = 100
    ms: int = 4
    power_db: float = 10.0
    noise_power: float = 1.0
    rho: float = 1.0
    tau: float = 0.001
    k_max: int = 100
    seed: int = 0
    rician_factor_db: float = 10.0
    pathloss_ref_db: float = 0.0
    pathloss_exponent: float = 2.0
    ref_distance: float = 1.0
    link_distance: float = 1.0
    element_spacing: float = 0.5
    csi_delta: float = 0.0
    convergence_tol: float = 0.01
    early_stop: bool = False
    validate_iterates: bool = True
    fixed_angles: Optional[Dict[str, Tuple[float, float]]] = None

    @model_validator(mode="after")
    def _domain_checks(self) -> "SystemConfigModel":
        try:
            self.to_config()
        except ConfigError as exc:
            raise ValueError(str(exc)) from exc
        return self

    def to_config(self) -> SystemConfig:
        data = self.model_dump()
        return SystemConfig.from_dict(data)


class ComplexVectorModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    real: List[float]
    imag: List[float]


class ComplexMatrixModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    real: List[List[float]]
    imag: List[List[float]]


class SolveRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    system: SystemConfigModel = SystemConfigModel()
    measure_time: bool = False


class SolveResponse(BaseModel):
    model_config = ConfigDict(extra="forbid")
    rates: List[float]
    lagrangian: List[float]
    primal_residual: List[float]
    converged_at: Optional[int]
    final_rate: float
    evaluated_rate: float           # on true channels; differs only when csi_delta > 0
    theta: ComplexVectorModel
    precoder: ComplexMatrixModel
    wall_time_s: float
    cm_count: int
    metadata: dict


SweepParam = Literal["power_db", "mi", "mt", "ms", "delta", "iterations"]
MethodName = Literal["admm_apg", "random_phase", "no_irs"]


class SweepRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    system: SystemConfigModel = SystemConfigModel()
    param: SweepParam
    values: List[float]
    trials: int = 200
    methods: List[MethodName] = ["admm_apg", "random_phase", "no_irs"]
    workers: int = 1
    measure_time: bool = False


class SweepRowModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    value: float
    method: str
    mean_rate_bps_hz: float
    stderr: float
    mean_converged_iter: float
    mean_wall_ms: float


class SweepResponse(BaseModel):
    model_config = ConfigDict(extra="forbid")
    rows: List[SweepRowModel]
    metadata: dict


class ConvergenceRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    system: SystemConfigModel = SystemConfigModel()
    power_dbs: List[float]
    trials: int = 100
    workers: int = 1


class ConvergenceResponse(BaseModel):
    model_config = ConfigDict(extra="forbid")
    power_dbs: List[float]
    mean_rates: List[List[float]]
    metadata: dict


class ComplexityRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    mt: int = 16
    mr: int = 4
    mi: int = 100
    ms: int = 4
    iterations: int = 10
    inner_ladmm: int = 20
    inner_spgm: int = 20
    inner_ao: int = 10
    realizations_ao: int = 100


class ComplexityRowModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    method: str
    per_iteration: Optional[int]
    total: int


class ComplexityResponse(BaseModel):
    model_config = ConfigDict(extra="forbid")
    rows: List[ComplexityRowModel]
    metadata: dict


class HealthResponse(BaseModel):
    model_config = ConfigDict(extra="forbid")
    status: str
    version: str
