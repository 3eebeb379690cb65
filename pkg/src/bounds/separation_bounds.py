# src/bounds/separation_bounds.py
"""
Analytic lower bounds on how far apart two interventional (or observational)
Gaussian components of one SEM are, plus the exact separations they bound.

Notation: F = ‖B^{-1}‖_F, λ = λ_min(D) = min noise variance,
κ = γ - c^T B μ. A side is "psi+" when |c^T Bμ| < |γ|/2 or |c^T Bμ| > 3|γ|/2,
otherwise "psi-" (boundary points included).
"""
import itertools
from typing import Dict, Optional, Tuple

import numpy as np

from models.component_model import GaussianComponent, MixtureSpec
from models.report_model import BoundTerms, SeparationReport
from models.sem_model import Intervention, LinearSem
from sem.sem_core import intervened_params_rank1, observational_params, resolve_intervention
from utils.errors import NegativeInput, SameTarget, TooFewComponents
from utils.logger import get_logger

logger = get_logger(__name__)

BMU_GUARD = 1e-12
PSI_PLUS = "psi+"
PSI_MINUS = "psi-"


class _Side:
    """한쪽 컴포넌트의 (c, γ, δ). 관측 분포는 모두 0."""

    def __init__(self, sem: LinearSem, iv: Optional[Intervention]):
        if iv is None:
            self.target = None
            self.c = np.zeros(sem.n)
            self.gamma = 0.0
            self.delta = 0.0
            self.component = observational_params(sem)
        else:
            p = resolve_intervention(sem, iv)
            self.target = p.target
            self.c = np.array(p.c)
            self.gamma = p.gamma
            self.delta = p.delta
            self.component = intervened_params_rank1(sem, iv, perturbation=p)

    @property
    def c_sq(self) -> float:
        return float(self.c @ self.c)

    def psi(self, b_mu: np.ndarray) -> str:
        proj = abs(float(self.c @ b_mu))
        g = abs(self.gamma)
        if proj < g / 2 or proj > 1.5 * g:
            return PSI_PLUS
        return PSI_MINUS


def _sides(sem: LinearSem, iv_i: Intervention, iv_j: Optional[Intervention]) -> Tuple[_Side, _Side]:
    if iv_j is not None and iv_i.target == iv_j.target:
        raise SameTarget(f"both interventions target node {iv_i.target}")
    return _Side(sem, iv_i), _Side(sem, iv_j)


def _scale(sem: LinearSem) -> Tuple[float, float]:
    binv_fro_sq = float(np.sum(sem.b_inverse ** 2))
    return binv_fro_sq, float(np.min(sem.variances))


def exact_separation(a: GaussianComponent, b: GaussianComponent) -> Tuple[float, float]:
    """(‖S_a - S_b‖_F², ‖m_a - m_b‖²)"""
    return float(np.sum((a.cov - b.cov) ** 2)), float(np.sum((a.mean - b.mean) ** 2))


# -----------------------------------------------------------------------------
# 공분산 / 평균 하한
# -----------------------------------------------------------------------------
def _cov_terms(si: _Side, sj: _Side, binv_fro_sq: float, lam: float) -> Tuple[float, float]:
    denom = 4.0 * binv_fro_sq ** 2
    f_term = lam ** 2 * (si.c_sq + sj.c_sq) / denom
    g_term = sum(abs(s.delta) * min(abs(s.delta), lam) for s in (si, sj)) / denom
    return f_term, g_term


def cov_sep_lower_bound(sem: LinearSem, iv_i: Intervention,
                        iv_j: Optional[Intervention] = None) -> Tuple[float, BoundTerms]:
    si, sj = _sides(sem, iv_i, iv_j)
    binv_fro_sq, lam = _scale(sem)
    f_term, g_term = _cov_terms(si, sj, binv_fro_sq, lam)
    terms = BoundTerms(f_term=f_term, g_term=g_term, lambda_min=lam, binv_fro=float(np.sqrt(binv_fro_sq)))
    return f_term + g_term, terms


def mean_sep_lower_bound(sem: LinearSem, iv_i: Intervention,
                         iv_j: Optional[Intervention] = None) -> Tuple[float, Dict[str, str]]:
    """psi+ 인 쪽만 γ²/(4F²) 를 기여합니다. 관측 쪽은 항상 psi-."""
    si, sj = _sides(sem, iv_i, iv_j)
    binv_fro_sq, _ = _scale(sem)
    b_mu = sem.b_matrix @ sem.mu
    tags = {"i": si.psi(b_mu), "j": sj.psi(b_mu)}
    value = sum(s.gamma ** 2 for s, tag in zip((si, sj), tags.values()) if tag == PSI_PLUS)
    return value / (4.0 * binv_fro_sq), tags


def param_sep_lower_bound(sem: LinearSem, iv_i: Intervention,
                          iv_j: Optional[Intervention] = None) -> SeparationReport:
    si, sj = _sides(sem, iv_i, iv_j)
    binv_fro_sq, lam = _scale(sem)
    b_mu = sem.b_matrix @ sem.mu
    bmu_norm = float(np.linalg.norm(b_mu))

    f_term, g_term = _cov_terms(si, sj, binv_fro_sq, lam)
    tags = {"i": si.psi(b_mu), "j": sj.psi(b_mu)}
    lb_mean = sum(s.gamma ** 2 for s, tag in zip((si, sj), tags.values()) if tag == PSI_PLUS) / (4.0 * binv_fro_sq)

    # ζ = f/2 + g, 나머지 f/2 로 psi- 쪽 γ 를 흡수
    guard = bmu_norm < BMU_GUARD or lam == 0.0
    if guard:
        h_term = 1.0 / (4.0 * binv_fro_sq)
        gamma_part = sum(s.gamma ** 2 for s, tag in zip((si, sj), tags.values()) if tag == PSI_PLUS) * h_term
    else:
        h_term = 1.0 / max(4.0 * binv_fro_sq, 32.0 * binv_fro_sq ** 2 * bmu_norm ** 2 / lam ** 2)
        gamma_part = (si.gamma ** 2 + sj.gamma ** 2) * h_term
    lb_combined = 0.5 * f_term + g_term + gamma_part

    exact_cov, exact_mean = exact_separation(si.component, sj.component)
    report = SeparationReport(
        target_i=si.target,
        target_j=sj.target,
        exact_cov_sep=exact_cov,
        exact_mean_sep=exact_mean,
        lb_cov=f_term + g_term,
        lb_mean=lb_mean,
        lb_combined=lb_combined,
        case_tags=tags,
        terms=BoundTerms(f_term=f_term, g_term=g_term, h_term=h_term, lambda_min=lam,
                         binv_fro=float(np.sqrt(binv_fro_sq)), bmu_norm=bmu_norm, bmu_guard=guard),
    )
    logger.debug(f"separation {si.target} vs {sj.target}: exact={exact_cov + exact_mean:.4g} lb={lb_combined:.4g}")
    return report


def scalar_eta_delta_lb(lam: float, eta: float, delta: float) -> float:
    """λη/4 + |δ|·min(|δ|, λ)/4, a lower bound on λη + (η - δ)²."""
    if lam < 0 or eta < 0:
        raise NegativeInput(f"lambda and eta must be nonnegative, got {lam}, {eta}")
    return lam * eta / 4.0 + abs(delta) * min(abs(delta), lam) / 4.0


def radius_lower_bound(spec: MixtureSpec) -> float:
    if spec.k < 2:
        raise TooFewComponents("radius needs at least two components")
    min_sep = min(
        sum(exact_separation(a, b))
        for a, b in itertools.combinations(spec.components, 2)
    )
    return float(np.sqrt(min(0.25 * min_sep, float(np.min(spec.weights)))))


def all_pair_reports(sem: LinearSem, interventions) -> list:
    """관측 분포 포함 모든 쌍의 SeparationReport (bounds CLI 용)"""
    sides = [None] + list(interventions)
    reports = []
    for a, b in itertools.combinations(sides, 2):
        # 관측은 항상 j 쪽에 둔다
        iv_i, iv_j = (b, a) if a is None else (a, b)
        reports.append(param_sep_lower_bound(sem, iv_i, iv_j))
    return reports
