import numpy as np
import pytest

from evaluation.metrics import (
    _solve, avg_jaccard, jaccard, match_components, mixing_weight_error, parameter_estimation_error, shd,
)
from models.component_model import ComponentTag, GaussianComponent, MixtureSpec
from models.fit_model import FitResult
from models.graph_model import GraphEstimate
from models.sem_model import Intervention
from sem.mixture_gen import make_mixture
from utils.errors import DimensionMismatch, EstimatedFewerThanTruth


def _fit(components, weights) -> FitResult:
    return FitResult(components=list(components), weights=weights, log_likelihood=0.0)


def _spread_spec(k: int) -> MixtureSpec:
    comps = [GaussianComponent(mean=[10.0 * i, -3.0 * i], cov=np.eye(2) * (1 + i)) for i in range(k)]
    tags = [ComponentTag(kind="observational")] + [ComponentTag(kind="intervention", target=0)] * (k - 1)
    return MixtureSpec(components=comps, weights=np.full(k, 1.0 / k), provenance=tags)


# ---------------------------------------------------------------------
# Jaccard
# ---------------------------------------------------------------------
def test_jaccard_empty_sets():
    assert jaccard(frozenset(), frozenset()) == 1.0


def test_jaccard_partial_overlap():
    assert jaccard(frozenset({1}), frozenset({1, 2})) == pytest.approx(0.5)
    assert jaccard(frozenset({0}), frozenset()) == 0.0


def test_avg_jaccard_follows_assignment():
    truth = [frozenset(), frozenset({0}), frozenset({1})]
    est = [frozenset({1}), frozenset(), frozenset({0})]
    assert avg_jaccard(truth, est, {0: 1, 1: 2, 2: 0}) == pytest.approx(1.0)
    assert avg_jaccard(truth, est, {}) == 0.0


# ---------------------------------------------------------------------
# SHD
# ---------------------------------------------------------------------
def test_shd_counts_each_pair_once():
    chain = np.array([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    assert shd(chain, chain) == 0
    reversed_edge = np.array([[0, 0, 0], [1, 0, 1], [0, 0, 0]])
    assert shd(chain, reversed_edge) == 1
    missing = np.array([[0, 1, 0], [0, 0, 0], [0, 0, 0]])
    assert shd(chain, missing) == 1
    assert shd(chain, np.zeros((3, 3))) == 2


def _random_dag(rng: np.random.Generator, n: int) -> np.ndarray:
    adj = np.triu(rng.random((n, n)) < 0.5, k=1).astype(int)
    perm = rng.permutation(n)
    return adj[np.ix_(perm, perm)]


def test_shd_is_a_metric_on_random_triples():
    rng = np.random.default_rng(8)
    for _ in range(200):
        g1, g2, g3 = (_random_dag(rng, 5) for _ in range(3))
        assert shd(g1, g1) == 0
        assert shd(g1, g2) == shd(g2, g1)
        assert shd(g1, g3) <= shd(g1, g2) + shd(g2, g3)


def test_avg_jaccard_stays_in_unit_interval():
    rng = np.random.default_rng(9)
    for _ in range(200):
        k = int(rng.integers(1, 6))
        truth = [frozenset(np.flatnonzero(rng.random(4) < 0.3).tolist()) for _ in range(k)]
        est = [frozenset(np.flatnonzero(rng.random(4) < 0.3).tolist()) for _ in range(k)]
        assignment = dict(enumerate(rng.permutation(k).tolist()))
        assert 0.0 <= avg_jaccard(truth, est, assignment) <= 1.0


def test_shd_accepts_dag_and_estimate(chain3):
    graph = GraphEstimate(adjacency=chain3.dag.adjacency, permutation=(0, 1, 2))
    assert shd(graph, chain3.dag) == 0


def test_shd_shape_mismatch():
    with pytest.raises(DimensionMismatch):
        shd(np.zeros((2, 2)), np.zeros((3, 3)))


# ---------------------------------------------------------------------
# 컴포넌트 매칭
# ---------------------------------------------------------------------
def test_matching_identity(chain3):
    spec = make_mixture(chain3, [Intervention.stochastic(i, 2.0) for i in range(3)])
    result = match_components(spec, FitResult.from_truth(spec, 100))
    assert result.assignment == {0: 0, 1: 1, 2: 2, 3: 3}
    assert parameter_estimation_error(result) == pytest.approx(0.0)
    assert mixing_weight_error(spec, FitResult.from_truth(spec, 100), result.assignment) == pytest.approx(0.0)


def test_matching_recovers_permutation():
    spec = _spread_spec(4)
    order = [2, 0, 3, 1]
    est = _fit([spec.components[i] for i in order], spec.weights[order])
    result = match_components(spec, est)
    assert result.assignment == {t: order.index(t) for t in range(4)}
    assert result.total_error == pytest.approx(0.0)


def test_hungarian_path_for_many_components():
    spec = _spread_spec(10)
    order = list(np.random.default_rng(1).permutation(10))
    est = _fit([spec.components[i] for i in order], spec.weights[order])
    result = match_components(spec, est)
    assert result.assignment == {t: order.index(t) for t in range(10)}


def test_hungarian_matches_exhaustive_on_random_costs():
    rng = np.random.default_rng(12)
    for _ in range(100):
        rows = int(rng.integers(1, 7))
        cost = rng.uniform(0.0, 10.0, size=(rows, int(rng.integers(rows, 8))))
        exhaustive, hungarian = _solve(cost, exhaustive=True), _solve(cost, exhaustive=False)
        assert sorted(hungarian) == list(range(rows))
        assert sum(cost[r, c] for r, c in hungarian.items()) == pytest.approx(
            sum(cost[r, c] for r, c in exhaustive.items()))


def test_extra_estimated_component_counts_in_weight_error():
    spec = _spread_spec(2)
    extra = GaussianComponent(mean=[100.0, 100.0], cov=np.eye(2))
    est = _fit(list(spec.components) + [extra], [0.4, 0.4, 0.2])
    result = match_components(spec, est)
    assert result.assignment == {0: 0, 1: 1}
    assert mixing_weight_error(spec, est, result.assignment) == pytest.approx(0.1 + 0.1 + 0.2)


def test_fewer_estimated_components():
    spec = _spread_spec(3)
    est = _fit(spec.components[:2], [0.5, 0.5])
    with pytest.raises(EstimatedFewerThanTruth):
        match_components(spec, est, strict=True)

    result = match_components(spec, est)
    assert result.deficit == 1
    assert result.unmatched_truth == [2]
    missing = spec.components[2]
    assert result.penalty == pytest.approx(np.abs(missing.mean).sum() + np.abs(missing.cov).sum())
    assert parameter_estimation_error(result) == pytest.approx(result.total_error + result.penalty)
    assert parameter_estimation_error(result) > result.total_error
    weight_err = mixing_weight_error(spec, est, result.assignment)
    assert weight_err == pytest.approx(2 * abs(1 / 3 - 0.5) + 1 / 3)
