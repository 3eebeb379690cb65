# src/sem/sem_core.py

from typing import Optional, Tuple

import networkx as nx
import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import linalg

from config import config
from models.component_model import Dataset, GaussianComponent
from models.sem_model import Intervention, LinearSem, NoiseSpec, WeightedDag
from utils.errors import (
    CyclicGraph, DimensionMismatch, EmptyRequest, InvalidRowSupport, NonPositiveVariance,
)
from utils.linalg_utils import frozen, psd_factor, symmetrize
from utils.logger import get_logger
from utils.rng_utils import split_seed

logger = get_logger(__name__)


class Perturbation(BaseModel):
    """
    개입을 (c_i, γ_i, δ_i) 로 정규화한 결과.
    c = a_i - a'_i, delta = σ_i - σ'_i
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    target: int
    c: np.ndarray
    gamma: float
    delta: float
    new_row: np.ndarray
    new_variance: float


# -----------------------------------------------------------------------------
# SEM 생성
# -----------------------------------------------------------------------------
def topological_order(weights: np.ndarray) -> Tuple[int, ...]:
    graph = nx.DiGraph()
    graph.add_nodes_from(range(weights.shape[0]))
    children, parents = np.nonzero(weights)
    graph.add_edges_from(zip(parents.tolist(), children.tolist()))
    try:
        return tuple(nx.lexicographical_topological_sort(graph))
    except nx.NetworkXUnfeasible as exc:
        raise CyclicGraph("graph has a directed cycle") from exc


def _solve_b(weights: np.ndarray, perm: Tuple[int, ...]) -> np.ndarray:
    # 위상 순서로 정렬하면 I - A 는 단위 하삼각 -> 전진 대입
    n = weights.shape[0]
    order = list(perm)
    lower = np.eye(n) - weights[np.ix_(order, order)]
    solved = linalg.solve_triangular(lower, np.eye(n), lower=True, unit_diagonal=True)
    b = np.empty((n, n))
    b[np.ix_(order, order)] = solved
    return b


def build_sem(dag: WeightedDag, noise: NoiseSpec) -> LinearSem:
    weights = dag.weights
    n = weights.shape[0]
    if weights.shape != (n, n):
        raise DimensionMismatch(f"weights must be square, got {weights.shape}")
    if noise.mu.shape != (n,) or noise.variances.shape != (n,):
        raise DimensionMismatch(
            f"noise vectors must have length {n}, got {noise.mu.shape} and {noise.variances.shape}")
    if dag.node_labels is not None and len(dag.node_labels) != n:
        raise DimensionMismatch("node_labels length does not match the weight matrix")
    if np.any(np.diag(weights) != 0):
        raise CyclicGraph("self loops are not allowed")
    if np.any(noise.variances <= 0):
        raise NonPositiveVariance("noise variances must be positive")

    perm = topological_order(weights)
    return LinearSem(dag=dag, noise=noise, topo_perm=perm, b_matrix=frozen(_solve_b(weights, perm)))


def observational_params(sem: LinearSem) -> GaussianComponent:
    b = sem.b_matrix
    mean = b @ sem.mu
    cov = symmetrize((b * sem.variances) @ b.T)
    return GaussianComponent(mean=mean, cov=cov)


# -----------------------------------------------------------------------------
# 개입
# -----------------------------------------------------------------------------
def resolve_intervention(sem: LinearSem, iv: Intervention) -> Perturbation:
    n = sem.n
    i = iv.target
    if not 0 <= i < n:
        raise DimensionMismatch(f"target {i} out of range for n={n}")
    a_i = np.array(sem.weights[i])
    sigma_i = float(sem.variances[i])

    if iv.kind == "do":
        new_row = np.zeros(n)
        new_variance = config.sem.do_variance_floor
    elif iv.kind == "stochastic":
        new_row = np.zeros(n)
        new_variance = sigma_i if iv.new_variance is None else float(iv.new_variance)
    elif iv.kind == "shift":
        if iv.new_variance is not None and iv.new_variance != sigma_i:
            logger.warning(f"shift on node {i} keeps the noise variance; ignoring new_variance={iv.new_variance}")
        new_row = a_i.copy()
        new_variance = sigma_i
    else:
        new_row = a_i.copy() if iv.new_row is None else np.array(iv.new_row, dtype=float)
        new_variance = sigma_i if iv.new_variance is None else float(iv.new_variance)

    if new_row.shape != (n,):
        raise DimensionMismatch(f"new_row must have length {n}")
    pos = sem.position
    late = pos >= pos[i]
    if np.any(new_row[late] != 0):
        raise InvalidRowSupport(f"new_row for node {i} uses nodes that are not topologically earlier")
    if iv.kind != "do" and new_variance <= 0:
        raise NonPositiveVariance(f"new variance for node {i} must be positive, got {new_variance}")

    return Perturbation(
        target=i,
        c=frozen(a_i - new_row),
        gamma=float(iv.gamma),
        delta=sigma_i - new_variance,
        new_row=frozen(new_row),
        new_variance=new_variance,
    )


def apply_intervention(sem: LinearSem, iv: Intervention) -> LinearSem:
    p = resolve_intervention(sem, iv)
    weights = np.array(sem.weights)
    weights[p.target] = p.new_row
    mu = np.array(sem.mu)
    mu[p.target] += p.gamma
    variances = np.array(sem.variances)
    variances[p.target] = p.new_variance

    dag = WeightedDag(weights=weights, node_labels=sem.dag.node_labels)
    noise = NoiseSpec(mu=mu, variances=variances)
    # 지지 집합 제약 덕분에 기존 위상 순서가 그대로 유효
    return LinearSem(dag=dag, noise=noise, topo_perm=sem.topo_perm,
                     b_matrix=frozen(_solve_b(weights, sem.topo_perm)))


def rank1_factors(sem: LinearSem, p: Perturbation) -> Tuple[np.ndarray, np.ndarray]:
    """r = B e_i, q = B^T c_i so that B_i = B - r q^T."""
    b = sem.b_matrix
    return b[:, p.target].copy(), b.T @ p.c


def intervened_params_rank1(sem: LinearSem, iv: Intervention,
                            perturbation: Optional[Perturbation] = None) -> GaussianComponent:
    p = perturbation or resolve_intervention(sem, iv)
    b = sem.b_matrix
    r, q = rank1_factors(sem, p)
    if not np.any(p.c != 0):
        # 루트 노드이거나 계수 변화가 없으면 노이즈만 바뀜
        base = observational_params(sem)
        cov = base.cov - p.delta * np.outer(r, r)
        b_i = b
    else:
        b_i = b - np.outer(r, q)
        cov = (b_i * sem.variances) @ b_i.T - p.delta * np.outer(r, r)
    shifted = np.array(sem.mu)
    shifted[p.target] += p.gamma
    return GaussianComponent(mean=b_i @ shifted, cov=symmetrize(cov))


# -----------------------------------------------------------------------------
# 샘플링
# -----------------------------------------------------------------------------
def sample_component(comp: GaussianComponent, count: int, seed: int,
                     rng: Optional[np.random.Generator] = None) -> Dataset:
    """m + L z 로 count 개의 샘플을 생성합니다. rng 를 주면 seed 대신 사용합니다."""
    if count < 1:
        raise EmptyRequest("count must be positive")
    factor = psd_factor(comp.cov, config.sem.psd_tolerance)
    gen = rng if rng is not None else split_seed(seed, 0)
    z = gen.standard_normal((count, comp.n))
    return Dataset(rows=comp.mean + z @ factor.T)
