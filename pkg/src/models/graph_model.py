# src/models/graph_model.py

from typing import FrozenSet, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator


class TargetEstimate(BaseModel):
    """컴포넌트별 추정 개입 타깃 (빈 집합 = 관측 컴포넌트)"""
    model_config = ConfigDict(frozen=True)

    per_component: List[FrozenSet[int]]
    evidence: List[Optional[float]] = Field(default_factory=list)  # 선택된 노드의 p-value

    @field_serializer("per_component")
    def _dump_sets(self, v):
        return [sorted(s) for s in v]


class GraphEstimate(BaseModel):
    """adjacency[i, j] = 1 이면 i -> j"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    adjacency: np.ndarray
    permutation: Tuple[int, ...]
    score: float = 0.0
    violations: int = 0

    @field_validator("adjacency", mode="before")
    @classmethod
    def _coerce_adj(cls, v):
        arr = (np.array(v) != 0).astype(int)
        arr.setflags(write=False)
        return arr

    @field_serializer("adjacency")
    def _dump_adj(self, v: np.ndarray):
        return v.tolist()

    @property
    def n(self) -> int:
        return int(self.adjacency.shape[0])

    @property
    def edges(self) -> List[Tuple[int, int]]:
        return [(int(i), int(j)) for i, j in zip(*np.nonzero(self.adjacency))]
