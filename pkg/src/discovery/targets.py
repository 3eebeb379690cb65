# src/discovery/targets.py

from typing import List, Optional, Tuple, Union

import numpy as np

from config import config
from discovery.ci_tests import MemoizedInvarianceTester
from models.component_model import Dataset, GaussianComponent
from models.fit_model import FitResult
from models.graph_model import TargetEstimate
from utils.logger import get_logger

logger = get_logger(__name__)


def observational_reference(obs: Union[GaussianComponent, Dataset],
                            obs_count: Optional[float], default_count: float):
    """관측 기준 분포와 표본 수. Dataset 이면 표본 적률을 사용합니다."""
    if isinstance(obs, Dataset):
        return obs.sample_moments(), float(obs.size)
    return obs, float(obs_count if obs_count is not None else default_count)


def node_evidence(tester: MemoizedInvarianceTester, k: int, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    노드별 (주변 분포 log p, V\\{i} 조건부 log p).
    원자 개입 t 에서 조건부 분포는 t 와 t 의 부모에서만, 주변 분포는 t 와 자손에서만 바뀝니다.
    """
    marginal = np.empty(n)
    blanket = np.empty(n)
    for i in range(n):
        rest = [v for v in range(n) if v != i]
        marginal[i] = tester.log_pvalue(k, i, ())
        blanket[i] = tester.log_pvalue(k, i, rest)
    return marginal, blanket


def identify_targets(components: FitResult, obs: Union[GaussianComponent, Dataset],
                     alpha: Optional[float] = None, obs_count: Optional[float] = None,
                     max_targets: Optional[int] = None) -> TargetEstimate:
    alpha = config.discovery.alpha if alpha is None else alpha
    cap = config.discovery.max_targets if max_targets is None else max_targets
    reference, ref_count = observational_reference(obs, obs_count, components.n_samples)
    n = reference.n
    tester = MemoizedInvarianceTester(components.components, components.weights,
                                      max(components.n_samples, 1), reference, ref_count, alpha)

    per_component: List[frozenset] = []
    chosen_p: List[Optional[float]] = []
    log_alpha = np.log(alpha)
    for k in range(components.k):
        marginal, blanket = node_evidence(tester, k, n)
        # 후보: V\\{i} 조건부가 비불변인 노드. 그중 주변 분포 변화가 가장 큰 노드 (주변 검정에는 α 를 적용하지 않음)
        candidates = np.flatnonzero(blanket < log_alpha)
        order = np.lexsort((candidates, blanket[candidates], marginal[candidates]))
        ranked = [int(candidates[j]) for j in order]
        picked = frozenset(ranked[:cap])
        per_component.append(picked)
        chosen_p.append(float(np.exp(blanket[ranked[0]])) if ranked else None)
        logger.debug(f"component {k}: target={sorted(picked)} marginal={np.round(marginal, 2).tolist()} "
                     f"blanket={np.round(blanket, 2).tolist()}")

    logger.info(f"identify_targets: {[sorted(t) for t in per_component]}")
    return TargetEstimate(per_component=per_component, evidence=chosen_p)
