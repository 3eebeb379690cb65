import numpy as np
import pytest

from tests.factories import make_random_sem
from models.sem_model import Intervention
from sem.mixture_gen import (
    covariance_rank, effectiveness_check, make_mixture, sample_mixture, vec_cov_rank,
)
from sem.sem_core import observational_params
from utils.errors import (
    DuplicateTarget, EmptyRequest, IneffectiveIntervention, NonPositiveWeight, WeightSumMismatch,
)


def _stochastic_all(sem, variance=2.0):
    return [Intervention.stochastic(i, new_variance=variance) for i in range(sem.n)]


# ---------------------------------------------------------------------
# make_mixture
# ---------------------------------------------------------------------
def test_equal_weight_mixture(chain2):
    spec = make_mixture(chain2, _stochastic_all(chain2))
    assert spec.k == 3
    np.testing.assert_allclose(spec.weights, [1 / 3, 1 / 3, 1 / 3])
    assert spec.true_targets == [frozenset(), frozenset({0}), frozenset({1})]
    assert spec.provenance[0].kind == "observational"


def test_mixture_without_observational(chain2):
    spec = make_mixture(chain2, _stochastic_all(chain2), include_observational=False)
    assert spec.k == 2
    assert all(tag.kind == "intervention" for tag in spec.provenance)


def test_weights_must_sum_to_one(chain2):
    with pytest.raises(WeightSumMismatch):
        make_mixture(chain2, [Intervention.stochastic(1, 2.0)], weights=[0.5, 0.6])


def test_weights_length_must_match(chain2):
    with pytest.raises(WeightSumMismatch):
        make_mixture(chain2, [Intervention.stochastic(1, 2.0)], weights=[1.0])


def test_weights_must_be_positive(chain2):
    with pytest.raises(NonPositiveWeight):
        make_mixture(chain2, [Intervention.stochastic(1, 2.0)], weights=[1.2, -0.2])


def test_duplicate_targets(chain2):
    with pytest.raises(DuplicateTarget):
        make_mixture(chain2, [Intervention.stochastic(1, 2.0), Intervention.shift(1, 1.0)])


def test_near_unit_weights_are_normalized(chain2):
    spec = make_mixture(chain2, [Intervention.stochastic(1, 2.0)], weights=[0.5, 0.5 + 5e-10])
    assert abs(spec.weights.sum() - 1.0) < 1e-12


# ---------------------------------------------------------------------
# sample_mixture
# ---------------------------------------------------------------------
def test_single_component_labels(chain2):
    spec = make_mixture(chain2, [])
    ds = sample_mixture(spec, 100, seed=0)
    assert ds.size == 100
    assert np.all(ds.labels == 0)


def test_label_frequencies(chain2):
    spec = make_mixture(chain2, [Intervention.stochastic(1, 2.0)])
    ds = sample_mixture(spec, 100_000, seed=1)
    assert abs(np.mean(ds.labels == 0) - 0.5) < 0.01


def test_empty_request(chain2):
    with pytest.raises(EmptyRequest):
        sample_mixture(make_mixture(chain2, []), 0, seed=0)


def test_sampling_is_reproducible_across_worker_counts(chain3):
    spec = make_mixture(chain3, _stochastic_all(chain3))
    a = sample_mixture(spec, 500, seed=9, workers=1)
    b = sample_mixture(spec, 500, seed=9, workers=4)
    np.testing.assert_array_equal(a.rows, b.rows)
    np.testing.assert_array_equal(a.labels, b.labels)


def test_rows_grouped_by_label_match_components(chain3):
    spec = make_mixture(chain3, _stochastic_all(chain3))
    n_rows = 40_000
    ds = sample_mixture(spec, n_rows, seed=2)
    bound = 5.0 / np.sqrt(n_rows * spec.weights.min())
    for k, comp in enumerate(spec.components):
        rows = ds.rows[ds.labels == k]
        cov = np.cov(rows, rowvar=False, bias=True)
        assert np.linalg.norm(cov - comp.cov) < bound * max(1.0, np.linalg.norm(comp.cov))
        assert np.linalg.norm(rows.mean(axis=0) - comp.mean) < bound * max(1.0, np.sqrt(np.trace(comp.cov)))


def test_without_labels_drops_latent_indices(chain2):
    ds = sample_mixture(make_mixture(chain2, _stochastic_all(chain2)), 10, seed=0)
    assert ds.without_labels().labels is None


# ---------------------------------------------------------------------
# effectiveness / rank
# ---------------------------------------------------------------------
def test_effectiveness_on_non_root(chain2):
    ok, report = effectiveness_check(chain2, Intervention.stochastic(1, new_variance=1.0))
    assert ok
    assert report.clauses == ["c"]


def test_ineffective_on_root(chain2):
    ok, report = effectiveness_check(chain2, Intervention.stochastic(0, new_variance=1.0))
    assert not ok
    assert report.clauses == []


def test_shift_on_root_is_effective(chain2):
    ok, report = effectiveness_check(chain2, Intervention.shift(0, gamma=0.1))
    assert ok
    assert "gamma" in report.clauses


def test_vec_cov_rank_chain2(chain2):
    assert vec_cov_rank(chain2, _stochastic_all(chain2)) == 3


def test_vec_cov_rank_single_component(chain2):
    assert vec_cov_rank(chain2, []) == 1


def test_repeated_covariance_keeps_rank(chain2):
    spec = make_mixture(chain2, _stochastic_all(chain2))
    covs = [c.cov for c in spec.components]
    assert covariance_rank(covs + [observational_params(chain2).cov]) == covariance_rank(covs)


def test_vec_cov_rank_rejects_ineffective(chain2):
    with pytest.raises(IneffectiveIntervention):
        vec_cov_rank(chain2, [Intervention.stochastic(0, new_variance=1.0)])


def test_vectorized_covariances_are_independent():
    """그래프에 엣지가 하나 이상이면 관측 + 전 노드 개입 공분산이 선형 독립"""
    rng = np.random.default_rng(21)
    for trial in range(200):
        n = int(rng.integers(3, 7))
        sem = make_random_sem(n, 5000 + trial, min_edges=1)
        ivs = [Intervention.stochastic(i, new_variance=float(sem.variances[i]) + 1.0) for i in range(n)]
        assert vec_cov_rank(sem, ivs) == n + 1
