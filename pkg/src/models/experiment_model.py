# src/models/experiment_model.py

from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from config import config
from models.fit_model import FitConfig
from models.sem_model import InterventionKind


class ExperimentConfig(BaseModel):
    """
    시뮬레이션 스윕 설정. 검증은 harness.experiment.validate_experiment 에서 InvalidConfig 로 처리합니다.
    """
    model_config = ConfigDict(frozen=True)

    n: int
    density: float = Field(default_factory=lambda: config.experiment.density)
    weight_range: Tuple[float, float] = Field(default_factory=lambda: tuple(config.experiment.weight_range))
    intervention_kind: InterventionKind = "stochastic"
    coverage: Literal["all", "half"] = "all"
    sample_sizes: List[int] = Field(default_factory=lambda: list(config.experiment.sample_sizes))
    cutoff: float = Field(default_factory=lambda: config.fit.cutoff)
    alpha: float = Field(default_factory=lambda: config.discovery.alpha)
    seeds: List[int] = Field(default_factory=lambda: list(range(10)))
    output_dir: str = "results"

    new_variance: float = Field(default_factory=lambda: config.experiment.new_variance)   # stochastic σ'
    shift_gamma: float = Field(default_factory=lambda: config.experiment.shift_gamma)     # shift γ
    soft_scale: float = Field(default_factory=lambda: config.experiment.soft_scale)       # soft a'_i = scale · a_i
    noise_variance: float = Field(default_factory=lambda: config.experiment.noise_variance)
    restarts: int = Field(default_factory=lambda: config.discovery.restarts)
    fit: FitConfig = Field(default_factory=FitConfig)
    include_observational: bool = True
    run_oracle: bool = True
    record_runtime: bool = True
    workers: Optional[int] = None


# Sachs 데이터 역할
SACHS_ROLES = ("observational", "Akt", "PKC", "PIP2", "Mek", "PIP3")

SACHS_COLUMNS = ["Raf", "Mek", "PLCg", "PIP2", "PIP3", "Erk", "Akt", "PKA", "PKC", "P38", "JNK"]


class SachsManifest(BaseModel):
    """조건 라벨 -> 역할 매핑"""
    model_config = ConfigDict(frozen=True)

    condition_column: str = "condition"
    columns: List[str] = Field(default_factory=lambda: list(SACHS_COLUMNS))
    conditions: Dict[str, str]
