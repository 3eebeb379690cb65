# src/models/report_model.py

from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field


class EffectivenessReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    effective: bool
    clauses: List[str] = Field(default_factory=list)  # "gamma", "c", "delta" 중 성립한 항목
    c_norm: float = 0.0
    gamma: float = 0.0
    delta: float = 0.0


class BoundTerms(BaseModel):
    """하한식 구성 항목"""
    model_config = ConfigDict(frozen=True)

    f_term: float = 0.0          # λ²(‖c_i‖²+‖c_j‖²)/(4‖B⁻¹‖_F⁴)
    g_term: float = 0.0          # Σ|δ|·min(|δ|,λ)/(4‖B⁻¹‖_F⁴)
    h_term: float = 0.0          # γ² 계수
    lambda_min: float = 0.0
    binv_fro: float = 0.0
    bmu_norm: float = 0.0
    bmu_guard: bool = False


class SeparationReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    target_i: Optional[int] = None
    target_j: Optional[int] = None   # None = 관측 분포
    exact_cov_sep: float
    exact_mean_sep: float
    lb_cov: float
    lb_mean: float
    lb_combined: float
    case_tags: Dict[str, str]
    terms: BoundTerms


class MatchingResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    assignment: Dict[int, int]                      # 정답 인덱스 -> 추정 인덱스
    total_error: float
    per_component: List[Tuple[float, float]]        # (mean_err, cov_err), assignment 순서
    deficit: int = 0
    unmatched_truth: List[int] = Field(default_factory=list)
    penalty: float = 0.0
