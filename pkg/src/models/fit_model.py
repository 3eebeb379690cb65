# src/models/fit_model.py

from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator

from config import config
from models.component_model import GaussianComponent, MixtureSpec
from utils.linalg_utils import as_float_array


class FitConfig(BaseModel):
    """EM 설정 (기본값은 config.yaml 의 fit 섹션)"""
    model_config = ConfigDict(frozen=True)

    max_iters: int = Field(default_factory=lambda: config.fit.max_iters)
    tol: float = Field(default_factory=lambda: config.fit.tol)                  # 샘플당 평균 로그우도 절대 변화
    n_init: int = Field(default_factory=lambda: config.fit.n_init)
    cov_regularization: float = Field(default_factory=lambda: config.fit.cov_regularization)
    seed: int = 0
    workers: Optional[int] = None  # None 이면 MIXSEM_WORKERS


class FitResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    components: List[GaussianComponent]
    weights: np.ndarray
    log_likelihood: float                       # 샘플당 평균 로그우도
    ll_std_error: float = 0.0                   # 평균 로그우도의 표준오차
    responsibilities: Optional[np.ndarray] = None
    converged: bool = True
    iters: int = 0
    n_samples: int = 0
    history: List[float] = Field(default_factory=list)
    cov_regularization: float = 0.0
    restart: int = 0

    @field_validator("weights", mode="before")
    @classmethod
    def _coerce_weights(cls, v):
        return as_float_array(v, ndim=1)

    @field_serializer("weights")
    def _dump_weights(self, v: np.ndarray):
        return v.tolist()

    @field_serializer("responsibilities")
    def _dump_resp(self, v: Optional[np.ndarray]):
        # 응답 행렬은 크기가 커서 직렬화하지 않음
        return None

    @property
    def k(self) -> int:
        return len(self.components)

    @classmethod
    def from_truth(cls, spec: MixtureSpec, n_samples: int) -> "FitResult":
        """정답 컴포넌트를 그대로 담은 oracle 결과"""
        return cls(components=list(spec.components), weights=spec.weights,
                   log_likelihood=0.0, n_samples=n_samples)
