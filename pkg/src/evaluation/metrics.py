# src/evaluation/metrics.py

import itertools
from typing import Dict, FrozenSet, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import linear_sum_assignment

from models.component_model import GaussianComponent, MixtureSpec
from models.fit_model import FitResult
from models.graph_model import GraphEstimate
from models.report_model import MatchingResult
from models.sem_model import WeightedDag
from utils.errors import DimensionMismatch, EstimatedFewerThanTruth
from utils.logger import get_logger

logger = get_logger(__name__)

EXHAUSTIVE_LIMIT = 8

GraphLike = Union[GraphEstimate, WeightedDag, np.ndarray]


def component_error(a: GaussianComponent, b: GaussianComponent) -> Tuple[float, float]:
    """Entrywise absolute error sums (mean, cov)."""
    return float(np.abs(a.mean - b.mean).sum()), float(np.abs(a.cov - b.cov).sum())


def cost_matrix(truth: Sequence[GaussianComponent], est: Sequence[GaussianComponent]) -> np.ndarray:
    cost = np.empty((len(truth), len(est)))
    for t, e in itertools.product(range(len(truth)), range(len(est))):
        cost[t, e] = sum(component_error(truth[t], est[e]))
    return cost


def _exhaustive(cost: np.ndarray) -> Dict[int, int]:
    """행 수 <= 열 수 일 때 행 -> 열 단사 매핑 중 최소 비용 (사전순 첫 번째)"""
    rows, cols = cost.shape
    best, best_cols = np.inf, None
    for chosen in itertools.permutations(range(cols), rows):
        total = cost[np.arange(rows), list(chosen)].sum()
        if total < best:
            best, best_cols = total, chosen
    return {r: int(c) for r, c in enumerate(best_cols)}


def _solve(cost: np.ndarray, exhaustive: bool) -> Dict[int, int]:
    if exhaustive:
        return _exhaustive(cost)
    rows, cols = linear_sum_assignment(cost)
    return {int(r): int(c) for r, c in zip(rows, cols)}


def match_components(truth: MixtureSpec, est: FitResult, strict: bool = False) -> MatchingResult:
    """
    정답 컴포넌트 -> 추정 컴포넌트 단사 매핑 (평균+공분산 절대오차 합 최소).
    추정 개수가 더 적으면 추정 쪽 기준으로 매칭하고 deficit/penalty 를 기록합니다.
    """
    k_true, k_est = truth.k, est.k
    cost = cost_matrix(truth.components, est.components)
    exhaustive = k_est <= EXHAUSTIVE_LIMIT

    if k_est >= k_true:
        assignment = _solve(cost, exhaustive)
    else:
        if strict:
            raise EstimatedFewerThanTruth(f"estimated {k_est} components, truth has {k_true}")
        logger.warning(f"estimated {k_est} components, truth has {k_true}; matching the smaller side")
        flipped = _solve(cost.T, k_true <= EXHAUSTIVE_LIMIT)
        assignment = {t: e for e, t in flipped.items()}

    assignment = dict(sorted(assignment.items()))
    per_component = [component_error(truth.components[t], est.components[e]) for t, e in assignment.items()]
    unmatched = [t for t in range(k_true) if t not in assignment]
    penalty = sum(float(np.abs(truth.components[t].mean).sum() + np.abs(truth.components[t].cov).sum())
                  for t in unmatched)
    return MatchingResult(
        assignment=assignment,
        total_error=float(sum(m + c for m, c in per_component)),
        per_component=per_component,
        deficit=len(unmatched),
        unmatched_truth=unmatched,
        penalty=penalty,
    )


def parameter_estimation_error(matching: MatchingResult) -> float:
    """매칭 오차 합. 추정되지 않은 정답 컴포넌트는 그 파라미터 크기만큼 더함"""
    return matching.total_error + matching.penalty


def jaccard(t: FrozenSet[int], t_hat: FrozenSet[int]) -> float:
    t, t_hat = set(t), set(t_hat)
    if not t and not t_hat:
        return 1.0
    return len(t & t_hat) / len(t | t_hat)


def avg_jaccard(true_targets: Sequence[FrozenSet[int]], est_targets: Sequence[FrozenSet[int]],
                assignment: Dict[int, int]) -> float:
    if not assignment:
        return 0.0
    scores = [jaccard(true_targets[t], est_targets[e]) for t, e in assignment.items()]
    return float(np.mean(scores))


def _adjacency(g: GraphLike) -> np.ndarray:
    if isinstance(g, GraphEstimate):
        return np.asarray(g.adjacency)
    if isinstance(g, WeightedDag):
        return g.adjacency
    return (np.asarray(g) != 0).astype(int)


def shd(g1: GraphLike, g2: GraphLike) -> int:
    """삽입/삭제/역방향 각각 1로 세는 구조적 해밍 거리"""
    a, b = _adjacency(g1), _adjacency(g2)
    if a.shape != b.shape:
        raise DimensionMismatch(f"graphs have shapes {a.shape} and {b.shape}")
    upper = np.triu_indices(a.shape[0], k=1)
    # 노드 쌍의 상태: 0 없음, 1 i->j, 2 j->i
    state_a = a[upper] + 2 * a.T[upper]
    state_b = b[upper] + 2 * b.T[upper]
    return int(np.count_nonzero(state_a != state_b))


def mixing_weight_error(truth: MixtureSpec, est: FitResult, assignment: Dict[int, int]) -> float:
    """매칭된 쌍의 |π - π̂| 합 + 매칭되지 않은 추정/정답 질량"""
    matched = sum(abs(float(truth.weights[t]) - float(est.weights[e])) for t, e in assignment.items())
    used = set(assignment.values())
    loose_est = sum(float(w) for e, w in enumerate(est.weights) if e not in used)
    loose_truth = sum(float(w) for t, w in enumerate(truth.weights) if t not in assignment)
    return float(matched + loose_est + loose_truth)
