# src/sem/mixture_gen.py

from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np

from config import config
from models.component_model import ComponentTag, Dataset, GaussianComponent, MixtureSpec
from models.report_model import EffectivenessReport
from models.sem_model import Intervention, LinearSem
from sem.sem_core import (
    intervened_params_rank1, observational_params, resolve_intervention, sample_component,
)
from utils.errors import (
    DuplicateTarget, EmptyRequest, IneffectiveIntervention, NonPositiveWeight, WeightSumMismatch,
)
from utils.linalg_utils import numerical_rank, vec
from utils.logger import get_logger
from utils.rng_utils import split_seed

logger = get_logger(__name__)

EFFECT_TOL = 1e-12
WEIGHT_SUM_TOL = 1e-9


def make_mixture(sem: LinearSem, interventions: Sequence[Intervention],
                 weights: Optional[Sequence[float]] = None,
                 include_observational: bool = True) -> MixtureSpec:
    """
    관측 분포(선택)와 개입 분포들로 정답 혼합 분포를 구성합니다.
    컴포넌트 순서: 관측 -> interventions 순서. weights 가 None 이면 균등 비율.
    """
    targets = [iv.target for iv in interventions]
    if len(set(targets)) != len(targets):
        raise DuplicateTarget(f"interventions share a target: {targets}")

    components: List[GaussianComponent] = []
    provenance: List[ComponentTag] = []
    if include_observational:
        components.append(observational_params(sem))
        provenance.append(ComponentTag(kind="observational"))
    for iv in interventions:
        components.append(intervened_params_rank1(sem, iv))
        provenance.append(ComponentTag(kind="intervention", target=iv.target, intervention=iv))
    if not components:
        raise EmptyRequest("mixture needs at least one component")

    if weights is None:
        pi = np.full(len(components), 1.0 / len(components))
    else:
        pi = np.asarray(weights, dtype=float)
        if pi.shape != (len(components),):
            raise WeightSumMismatch(f"expected {len(components)} weights, got {pi.size}")
        if np.any(pi <= 0):
            raise NonPositiveWeight("mixing weights must be positive")
        if abs(pi.sum() - 1.0) > WEIGHT_SUM_TOL:
            raise WeightSumMismatch(f"weights sum to {pi.sum():.6f}")
        pi = pi / pi.sum()

    return MixtureSpec(components=components, weights=pi, provenance=provenance)


def sample_mixture(spec: MixtureSpec, count: int, seed: int, workers: Optional[int] = None) -> Dataset:
    """
    π 로 컴포넌트를 고른 뒤 해당 가우시안에서 샘플링합니다.
    라벨은 스트림 0, 컴포넌트 k 의 샘플은 스트림 k+1 을 사용합니다.
    """
    if count < 1:
        raise EmptyRequest("count must be positive")
    labels = split_seed(seed, 0).choice(spec.k, size=count, p=spec.weights)
    rows = np.empty((count, spec.components[0].n))

    def _draw(k: int) -> Tuple[int, Optional[np.ndarray]]:
        idx = np.flatnonzero(labels == k)
        if idx.size == 0:
            return k, None
        ds = sample_component(spec.components[k], idx.size, seed, rng=split_seed(seed, k + 1))
        return k, ds.rows

    with ThreadPoolExecutor(max_workers=workers or config.workers) as pool:
        for k, block in pool.map(_draw, range(spec.k)):
            if block is not None:
                rows[labels == k] = block
    return Dataset(rows=rows, labels=labels)


def effectiveness_check(sem: LinearSem, iv: Intervention) -> Tuple[bool, EffectivenessReport]:
    p = resolve_intervention(sem, iv)
    c_norm = float(np.linalg.norm(p.c))
    clauses = []
    if abs(p.gamma) > EFFECT_TOL:
        clauses.append("gamma")
    if c_norm > EFFECT_TOL:
        clauses.append("c")
    if abs(p.delta) > EFFECT_TOL:
        clauses.append("delta")
    report = EffectivenessReport(effective=bool(clauses), clauses=clauses,
                                 c_norm=c_norm, gamma=p.gamma, delta=p.delta)
    return report.effective, report


def covariance_rank(covs: Sequence[np.ndarray], tol: Optional[float] = None) -> int:
    tol = config.sem.rank_tolerance if tol is None else tol
    return numerical_rank(np.vstack([vec(c) for c in covs]), tol)


def vec_cov_rank(sem: LinearSem, interventions: Sequence[Intervention], tol: Optional[float] = None) -> int:
    covs = [observational_params(sem).cov]
    for iv in interventions:
        ok, _ = effectiveness_check(sem, iv)
        if not ok:
            raise IneffectiveIntervention(f"intervention on node {iv.target} changes nothing")
        covs.append(intervened_params_rank1(sem, iv).cov)
    rank = covariance_rank(covs, tol)
    logger.debug(f"vec_cov_rank: {rank} of {len(covs)} components")
    return rank
