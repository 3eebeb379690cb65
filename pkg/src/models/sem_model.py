# src/models/sem_model.py

from typing import List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_serializer, field_validator

from utils.linalg_utils import as_float_array

InterventionKind = Literal["do", "stochastic", "shift", "soft"]


class WeightedDag(BaseModel):
    """
    가중 DAG. weights[j][i] 가 i -> j 엣지 계수입니다.
    비순환성 검사는 build_sem에서 수행합니다.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    weights: np.ndarray
    node_labels: Optional[List[str]] = None

    @field_validator("weights", mode="before")
    @classmethod
    def _coerce_weights(cls, v):
        return as_float_array(v, ndim=2)

    @field_serializer("weights")
    def _dump_weights(self, v: np.ndarray):
        return v.tolist()

    @property
    def n(self) -> int:
        return int(self.weights.shape[0])

    @property
    def labels(self) -> List[str]:
        if self.node_labels:
            return list(self.node_labels)
        return [f"V{i}" for i in range(self.n)]

    @property
    def adjacency(self) -> np.ndarray:
        """adjacency[i, j] = 1 for an edge i -> j."""
        return (self.weights.T != 0).astype(int)

    @property
    def edge_count(self) -> int:
        return int(np.count_nonzero(self.weights))


class NoiseSpec(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    mu: np.ndarray           # 노이즈 평균
    variances: np.ndarray    # D의 대각 성분

    @field_validator("mu", "variances", mode="before")
    @classmethod
    def _coerce_vectors(cls, v):
        return as_float_array(v, ndim=1)

    @field_serializer("mu", "variances")
    def _dump_vectors(self, v: np.ndarray):
        return v.tolist()

    @classmethod
    def standard(cls, n: int, variance: float = 1.0) -> "NoiseSpec":
        return cls(mu=np.zeros(n), variances=np.full(n, float(variance)))


class Intervention(BaseModel):
    """
    단일 노드 개입. kind는 일반 soft 개입(a'_i, γ_i, σ'_i)의 축약 표현입니다.
    new_row / new_variance 가 None 이면 SEM의 값으로 해석합니다.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    target: int
    kind: InterventionKind = "soft"
    gamma: float = 0.0
    new_variance: Optional[float] = None
    new_row: Optional[np.ndarray] = None

    @field_validator("new_row", mode="before")
    @classmethod
    def _coerce_row(cls, v):
        if v is None:
            return None
        return as_float_array(v, ndim=1)

    @field_serializer("new_row")
    def _dump_row(self, v: Optional[np.ndarray]):
        return None if v is None else v.tolist()

    @classmethod
    def do(cls, target: int, gamma: float = 0.0) -> "Intervention":
        return cls(target=target, kind="do", gamma=gamma)

    @classmethod
    def stochastic(cls, target: int, new_variance: Optional[float] = None, gamma: float = 0.0) -> "Intervention":
        return cls(target=target, kind="stochastic", new_variance=new_variance, gamma=gamma)

    @classmethod
    def shift(cls, target: int, gamma: float) -> "Intervention":
        return cls(target=target, kind="shift", gamma=gamma)

    @classmethod
    def soft(cls, target: int, new_row=None, gamma: float = 0.0,
             new_variance: Optional[float] = None) -> "Intervention":
        return cls(target=target, kind="soft", new_row=new_row, gamma=gamma, new_variance=new_variance)


class LinearSem(BaseModel):
    """
    선형 가우시안 SEM. b_matrix = (I - A)^{-1} 는 build_sem에서 위상 순서 전진 대입으로 계산됩니다.
    직접 생성하지 말고 sem.sem_core.build_sem 을 사용하세요.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    dag: WeightedDag
    noise: NoiseSpec
    topo_perm: Tuple[int, ...]
    b_matrix: np.ndarray

    @field_serializer("b_matrix")
    def _dump_b(self, v: np.ndarray):
        return v.tolist()

    @property
    def n(self) -> int:
        return self.dag.n

    @property
    def weights(self) -> np.ndarray:
        return self.dag.weights

    @property
    def mu(self) -> np.ndarray:
        return self.noise.mu

    @property
    def variances(self) -> np.ndarray:
        return self.noise.variances

    @property
    def b_inverse(self) -> np.ndarray:
        # (I - A) 자체가 B의 역행렬
        return np.eye(self.n) - self.weights

    @property
    def position(self) -> np.ndarray:
        """position[v] = index of node v in topo_perm."""
        pos = np.empty(self.n, dtype=int)
        pos[list(self.topo_perm)] = np.arange(self.n)
        return pos
