# src/discovery/gsp.py
"""
Greedy sparsest-permutation search with unknown-target invariance penalties.

A state is a node ordering. Its DAG is the minimal I-MAP of the ordering under
the observational CI tests; its score is the edge count plus a penalty for
every component/node pair whose conditional given its DAG parents is not
invariant although the node is not an estimated target of that component.
Moves reverse a covered edge and rebuild the minimal I-MAP of the new order.
"""
import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, NamedTuple, Optional, Tuple, Union

import networkx as nx
import numpy as np

from config import config
from discovery.ci_tests import MemoizedCITester, MemoizedInvarianceTester
from discovery.targets import observational_reference
from models.component_model import Dataset, GaussianComponent
from models.fit_model import FitResult
from models.graph_model import GraphEstimate, TargetEstimate
from utils.errors import DimensionMismatch, InvalidConfig
from utils.logger import get_logger
from utils.rng_utils import split_seed

logger = get_logger(__name__)

MAX_STATES_PER_RESTART = 5000


class _State(NamedTuple):
    score: float
    perm: Tuple[int, ...]
    adjacency: np.ndarray
    violations: int


def minimal_imap(perm: Tuple[int, ...], ci_tester: MemoizedCITester) -> np.ndarray:
    """pi_i -> pi_j 는 앞선 노드 전부를 조건으로 독립이 아닐 때만 추가"""
    n = len(perm)
    adjacency = np.zeros((n, n), dtype=int)
    for j_pos in range(n):
        for i_pos in range(j_pos):
            pi_i, pi_j = perm[i_pos], perm[j_pos]
            cond = set(perm[:j_pos]) - {pi_i}
            if not ci_tester.is_ci(pi_i, pi_j, cond):
                adjacency[pi_i, pi_j] = 1
    return adjacency


def covered_edges(adjacency: np.ndarray) -> List[Tuple[int, int]]:
    """i -> j 에서 pa(j) = pa(i) ∪ {i} 인 엣지"""
    edges = []
    for i, j in zip(*np.nonzero(adjacency)):
        pa_i = set(np.flatnonzero(adjacency[:, i]).tolist())
        pa_j = set(np.flatnonzero(adjacency[:, j]).tolist())
        if pa_j == pa_i | {int(i)}:
            edges.append((int(i), int(j)))
    return edges


def order_after_reversal(adjacency: np.ndarray, i: int, j: int) -> Tuple[int, ...]:
    reversed_adj = adjacency.copy()
    reversed_adj[i, j] = 0
    reversed_adj[j, i] = 1
    graph = nx.from_numpy_array(reversed_adj, create_using=nx.DiGraph)
    return tuple(nx.lexicographical_topological_sort(graph))


def count_violations(adjacency: np.ndarray, inv_tester: Optional[MemoizedInvarianceTester],
                     targets: TargetEstimate) -> int:
    if inv_tester is None:
        return 0
    n = adjacency.shape[0]
    violations = 0
    for k, target_set in enumerate(targets.per_component):
        for j in range(n):
            if j in target_set:
                continue
            parents = tuple(np.flatnonzero(adjacency[:, j]).tolist())
            if not inv_tester.is_invariant(k, j, parents):
                violations += 1
    return violations


class _Search:
    def __init__(self, ci_tester, inv_tester, targets, penalty: float, depth: int):
        self.ci_tester = ci_tester
        self.inv_tester = inv_tester
        self.targets = targets
        self.penalty = penalty
        self.depth = depth
        self._states: Dict[Tuple[int, ...], _State] = {}
        self._lock = threading.Lock()

    def evaluate(self, perm: Tuple[int, ...]) -> _State:
        state = self._states.get(perm)
        if state is None:
            adjacency = minimal_imap(perm, self.ci_tester)
            violations = count_violations(adjacency, self.inv_tester, self.targets)
            score = float(adjacency.sum()) + self.penalty * violations
            state = _State(score, perm, adjacency, violations)
            with self._lock:
                self._states[perm] = state
        return state

    def neighbours(self, state: _State) -> List[_State]:
        perms = {order_after_reversal(state.adjacency, i, j) for i, j in covered_edges(state.adjacency)}
        return sorted((self.evaluate(p) for p in perms), key=lambda s: (s.score, s.perm))

    def _improve(self, start: _State) -> Optional[_State]:
        # 같은 점수의 상태를 depth 까지 깊이 우선으로 훑어 더 나은 상태를 찾음
        visited = {start.perm}
        stack = [(start, 0)]
        explored = 0
        while stack and explored < MAX_STATES_PER_RESTART:
            state, level = stack.pop()
            for nb in self.neighbours(state):
                if nb.perm in visited:
                    continue
                visited.add(nb.perm)
                explored += 1
                if nb.score < start.score:
                    return nb
                if nb.score == start.score and level + 1 < self.depth:
                    stack.append((nb, level + 1))
        return None

    def run(self, perm: Tuple[int, ...]) -> _State:
        current = self.evaluate(perm)
        while True:
            better = self._improve(current)
            if better is None:
                return current
            current = better


def estimate_dag(obs_data: Dataset, components: FitResult, targets: TargetEstimate,
                 alpha: Optional[float] = None, restarts: Optional[int] = None, seed: int = 0,
                 obs: Optional[Union[GaussianComponent, Dataset]] = None,
                 workers: Optional[int] = None) -> GraphEstimate:
    """
    restarts 개의 무작위 순서에서 탐색을 시작해 가장 좋은 DAG를 반환합니다.
    동점이면 사전순으로 가장 작은 순서를 택합니다.
    """
    alpha = config.discovery.alpha if alpha is None else alpha
    restarts = config.discovery.restarts if restarts is None else restarts
    if restarts < 1:
        raise InvalidConfig(f"restarts must be at least 1, got {restarts}")
    if len(targets.per_component) != components.k:
        raise DimensionMismatch("one target set per component is required")

    n = obs_data.n
    ci_tester = MemoizedCITester(obs_data, alpha)
    reference, ref_count = observational_reference(obs if obs is not None else obs_data, None, obs_data.size)
    inv_tester = MemoizedInvarianceTester(components.components, components.weights,
                                          max(components.n_samples, 1), reference, ref_count, alpha)
    search = _Search(ci_tester, inv_tester, targets,
                     config.discovery.violation_penalty, config.discovery.search_depth)

    starts = [tuple(int(v) for v in split_seed(seed, r).permutation(n)) for r in range(restarts)]
    with ThreadPoolExecutor(max_workers=workers or config.workers) as pool:
        results = list(pool.map(search.run, starts))

    best = min(results, key=lambda s: (s.score, s.perm))
    logger.info(f"estimate_dag: edges={int(best.adjacency.sum())} violations={best.violations} "
                f"score={best.score:.1f} ci_tests={ci_tester.cache_size}")
    return GraphEstimate(adjacency=best.adjacency, permutation=best.perm,
                         score=best.score, violations=best.violations)
