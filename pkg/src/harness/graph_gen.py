# src/harness/graph_gen.py

import math
from typing import List, Optional, Tuple

import numpy as np

from config import config
from models.experiment_model import ExperimentConfig
from models.sem_model import Intervention, LinearSem, WeightedDag
from utils.rng_utils import split_seed


def random_graph(n: int, density: Optional[float] = None,
                 weight_range: Optional[Tuple[float, float]] = None, seed: int = 0) -> WeightedDag:
    """
    완전 하삼각 가중치(크기 U[low, high], 부호 무작위)를 만든 뒤 각 엣지를 확률 density 로 유지합니다.
    """
    density = config.experiment.density if density is None else density
    low, high = config.experiment.weight_range if weight_range is None else weight_range
    rng = split_seed(seed, 0)
    magnitude = rng.uniform(low, high, size=(n, n))
    sign = rng.choice([-1.0, 1.0], size=(n, n))
    keep = rng.random((n, n)) < density
    return WeightedDag(weights=np.tril(magnitude * sign * keep, k=-1))


def choose_targets(n: int, coverage: str, rng: np.random.Generator) -> List[int]:
    if coverage == "all":
        return list(range(n))
    # 절반 커버리지: ceil(n/2) 개를 무작위 선택
    picked = rng.choice(n, size=math.ceil(n / 2), replace=False)
    return sorted(int(v) for v in picked)


def make_intervention(sem: LinearSem, target: int, cfg: ExperimentConfig) -> Intervention:
    kind = cfg.intervention_kind
    if kind == "do":
        return Intervention.do(target)
    if kind == "stochastic":
        return Intervention.stochastic(target, new_variance=cfg.new_variance)
    if kind == "shift":
        return Intervention.shift(target, gamma=cfg.shift_gamma)
    return Intervention.soft(target, new_row=cfg.soft_scale * sem.weights[target],
                             gamma=0.0, new_variance=cfg.new_variance)


def build_interventions(sem: LinearSem, cfg: ExperimentConfig, rng: np.random.Generator) -> List[Intervention]:
    return [make_intervention(sem, t, cfg) for t in choose_targets(sem.n, cfg.coverage, rng)]
