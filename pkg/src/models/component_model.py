# src/models/component_model.py

from typing import FrozenSet, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, field_serializer, field_validator

from models.sem_model import Intervention
from utils.linalg_utils import as_float_array


class GaussianComponent(BaseModel):
    """혼합 분포의 한 컴포넌트 N(m, S)"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    mean: np.ndarray
    cov: np.ndarray

    @field_validator("mean", mode="before")
    @classmethod
    def _coerce_mean(cls, v):
        return as_float_array(v, ndim=1)

    @field_validator("cov", mode="before")
    @classmethod
    def _coerce_cov(cls, v):
        return as_float_array(v, ndim=2)

    @field_serializer("mean", "cov")
    def _dump(self, v: np.ndarray):
        return v.tolist()

    @property
    def n(self) -> int:
        return int(self.mean.shape[0])


class Dataset(BaseModel):
    """
    샘플 행렬. labels 는 평가용 잠재 컴포넌트 인덱스이며 적합 파이프라인에는 넘기지 않습니다.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    rows: np.ndarray
    labels: Optional[np.ndarray] = None
    node_labels: Optional[List[str]] = None

    @field_validator("rows", mode="before")
    @classmethod
    def _coerce_rows(cls, v):
        return as_float_array(np.atleast_2d(np.asarray(v, dtype=float)), ndim=2)

    @field_validator("labels", mode="before")
    @classmethod
    def _coerce_labels(cls, v):
        if v is None:
            return None
        arr = np.array(v, dtype=int)
        arr.setflags(write=False)
        return arr

    @property
    def size(self) -> int:
        return int(self.rows.shape[0])

    @property
    def n(self) -> int:
        return int(self.rows.shape[1])

    @property
    def columns(self) -> List[str]:
        if self.node_labels:
            return list(self.node_labels)
        return [f"V{i}" for i in range(self.n)]

    def without_labels(self) -> "Dataset":
        return Dataset(rows=self.rows, node_labels=self.node_labels)

    def sample_moments(self) -> GaussianComponent:
        """Sample mean and maximum-likelihood (1/N) covariance."""
        cov = np.cov(self.rows, rowvar=False, bias=True)
        return GaussianComponent(mean=self.rows.mean(axis=0), cov=np.atleast_2d(cov))


class ComponentTag(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    kind: Literal["observational", "intervention"]
    target: Optional[int] = None
    intervention: Optional[Intervention] = None

    @property
    def target_set(self) -> FrozenSet[int]:
        return frozenset() if self.target is None else frozenset({self.target})


class MixtureSpec(BaseModel):
    """정답 혼합 분포: 컴포넌트, 혼합 가중치 π, 컴포넌트별 출처"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    components: List[GaussianComponent]
    weights: np.ndarray
    provenance: List[ComponentTag]

    @field_validator("weights", mode="before")
    @classmethod
    def _coerce_weights(cls, v):
        return as_float_array(v, ndim=1)

    @field_serializer("weights")
    def _dump_weights(self, v: np.ndarray):
        return v.tolist()

    @property
    def k(self) -> int:
        return len(self.components)

    @property
    def true_targets(self) -> List[FrozenSet[int]]:
        return [tag.target_set for tag in self.provenance]
