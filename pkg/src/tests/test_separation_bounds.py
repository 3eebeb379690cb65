import itertools

import numpy as np
import pytest

from tests.factories import KINDS, make_random_intervention, make_random_sem
from bounds.separation_bounds import (
    PSI_MINUS, PSI_PLUS, all_pair_reports, cov_sep_lower_bound, mean_sep_lower_bound,
    param_sep_lower_bound, radius_lower_bound, scalar_eta_delta_lb,
)
from models.component_model import ComponentTag, GaussianComponent, MixtureSpec
from models.sem_model import Intervention
from sem.mixture_gen import effectiveness_check, make_mixture
from utils.errors import NegativeInput, SameTarget, TooFewComponents


# ---------------------------------------------------------------------
# 공분산 하한
# ---------------------------------------------------------------------
def test_cov_bound_chain2_stochastic_vs_observational(chain2):
    value, terms = cov_sep_lower_bound(chain2, Intervention.stochastic(1, new_variance=1.0))
    assert value == pytest.approx(1 / 36)
    assert terms.binv_fro == pytest.approx(np.sqrt(3.0))
    assert terms.lambda_min == pytest.approx(1.0)
    report = param_sep_lower_bound(chain2, Intervention.stochastic(1, new_variance=1.0))
    assert report.exact_cov_sep == pytest.approx(3.0)


def test_cov_bound_vanishes_without_c_and_delta(empty2):
    value, _ = cov_sep_lower_bound(empty2, Intervention.shift(0, 1.0), Intervention.shift(1, 1.0))
    assert value == 0.0


def test_delta_term_uses_min_clause(empty2):
    # δ = 1 - 0.5, λ = 1, ‖B⁻¹‖_F² = 2
    value, terms = cov_sep_lower_bound(empty2, Intervention.stochastic(0, new_variance=0.5))
    assert terms.f_term == 0.0
    assert value == pytest.approx(0.5 * 0.5 / (4 * 4))


def test_same_target_is_rejected(chain2):
    with pytest.raises(SameTarget):
        cov_sep_lower_bound(chain2, Intervention.shift(1, 1.0), Intervention.stochastic(1, 2.0))


# ---------------------------------------------------------------------
# 평균 하한
# ---------------------------------------------------------------------
def test_mean_bound_shift_vs_observational(chain2):
    value, tags = mean_sep_lower_bound(chain2, Intervention.shift(1, gamma=2.0))
    assert value == pytest.approx(1 / 3)
    assert tags == {"i": PSI_PLUS, "j": PSI_MINUS}
    report = param_sep_lower_bound(chain2, Intervention.shift(1, gamma=2.0))
    assert report.exact_mean_sep == pytest.approx(4.0)


def test_mean_bound_zero_without_gamma(chain2):
    value, _ = mean_sep_lower_bound(chain2, Intervention.stochastic(1, 2.0), Intervention.stochastic(0, 2.0))
    assert value == 0.0


# ---------------------------------------------------------------------
# 결합 하한
# ---------------------------------------------------------------------
def test_combined_bound_halves_f(chain2):
    report = param_sep_lower_bound(chain2, Intervention.stochastic(1, new_variance=1.0))
    assert report.lb_combined == pytest.approx(1 / 72)
    assert report.exact_cov_sep + report.exact_mean_sep >= report.lb_combined


def test_combined_bound_zero_for_ineffective_pair(empty2):
    report = param_sep_lower_bound(empty2, Intervention.stochastic(0, 1.0), Intervention.stochastic(1, 1.0))
    assert report.lb_combined == 0.0


def test_combined_bound_guard_for_zero_mean(chain2):
    report = param_sep_lower_bound(chain2, Intervention.shift(1, gamma=2.0))
    assert report.terms.bmu_guard
    assert report.lb_combined == pytest.approx(4.0 / 12.0)


def test_all_pair_reports_put_observational_last(chain3):
    ivs = [Intervention.stochastic(i, 2.0) for i in range(3)]
    reports = all_pair_reports(chain3, ivs)
    assert len(reports) == 6
    assert all(r.target_i is not None for r in reports)
    assert sum(r.target_j is None for r in reports) == 3


def test_bounds_hold_on_random_pairs():
    rng = np.random.default_rng(7)
    checked = 0
    for trial in range(2000):
        n = int(rng.integers(2, 7))
        sem = make_random_sem(n, 20_000 + trial)
        i, j = rng.choice(n, size=2, replace=False)
        iv_i = make_random_intervention(sem, int(i), KINDS[trial % 4], rng)
        iv_j = None if trial % 3 == 0 else make_random_intervention(sem, int(j), KINDS[(trial // 4) % 4], rng)
        report = param_sep_lower_bound(sem, iv_i, iv_j)
        assert report.exact_cov_sep >= report.lb_cov - 1e-9
        assert report.exact_mean_sep >= report.lb_mean - 1e-9
        assert report.exact_cov_sep + report.exact_mean_sep >= report.lb_combined - 1e-9
        checked += 1
    assert checked == 2000


# ---------------------------------------------------------------------
# 스칼라 부등식
# ---------------------------------------------------------------------
@pytest.mark.parametrize("lam, eta, delta, expected", [
    (1.0, 1.0, 0.0, 0.25),
    (0.0, 1.0, 2.0, 0.0),
    (1.0, 0.0, 2.0, 0.5),
])
def test_scalar_eta_delta_examples(lam, eta, delta, expected):
    assert scalar_eta_delta_lb(lam, eta, delta) == pytest.approx(expected)
    assert lam * eta + (eta - delta) ** 2 >= expected


def test_scalar_eta_delta_random_triples():
    rng = np.random.default_rng(3)
    lam = rng.uniform(0, 10, size=100_000)
    eta = rng.uniform(0, 10, size=100_000)
    delta = rng.uniform(-10, 10, size=100_000)
    for a, b, c in zip(lam[:2000], eta[:2000], delta[:2000]):
        assert a * b + (b - c) ** 2 >= scalar_eta_delta_lb(float(a), float(b), float(c)) - 1e-12
    # 벡터화된 동일 식으로 나머지 확인
    lower = lam * eta / 4 + np.abs(delta) * np.minimum(np.abs(delta), lam) / 4
    assert np.all(lam * eta + (eta - delta) ** 2 >= lower - 1e-12)


def test_scalar_rejects_negative_inputs():
    with pytest.raises(NegativeInput):
        scalar_eta_delta_lb(-1.0, 1.0, 0.0)
    with pytest.raises(NegativeInput):
        scalar_eta_delta_lb(1.0, -1.0, 0.0)


# ---------------------------------------------------------------------
# 식별 반경
# ---------------------------------------------------------------------
def test_radius_chain2(chain2):
    spec = make_mixture(chain2, [Intervention.stochastic(1, new_variance=1.0)])
    # min(¼·3, ½)
    assert radius_lower_bound(spec) == pytest.approx(np.sqrt(0.5))


def _two_component_spec(second_mean, weights) -> MixtureSpec:
    comps = [GaussianComponent(mean=[0.0, 0.0], cov=np.eye(2)), GaussianComponent(mean=second_mean, cov=np.eye(2))]
    tags = [ComponentTag(kind="observational"), ComponentTag(kind="intervention", target=0)]
    return MixtureSpec(components=comps, weights=weights, provenance=tags)


def test_radius_separation_clause():
    # 쌍 분리도 4, 가중치 ½ -> R² = min(1, ½)
    assert radius_lower_bound(_two_component_spec([2.0, 0.0], [0.5, 0.5])) == pytest.approx(np.sqrt(0.5))


def test_radius_weight_clause():
    assert radius_lower_bound(_two_component_spec([50.0, 0.0], [0.9, 0.1])) == pytest.approx(np.sqrt(0.1))


def test_radius_identical_components_is_zero():
    assert radius_lower_bound(_two_component_spec([0.0, 0.0], [0.5, 0.5])) == 0.0


def test_radius_needs_two_components(chain2):
    with pytest.raises(TooFewComponents):
        radius_lower_bound(make_mixture(chain2, []))


def test_radius_positive_under_effectiveness():
    rng = np.random.default_rng(17)
    for trial in range(200):
        n = int(rng.integers(3, 7))
        sem = make_random_sem(n, 40_000 + trial, min_edges=1)
        ivs = [make_random_intervention(sem, t, KINDS[(trial + t) % 4], rng) for t in range(n)]
        assert all(effectiveness_check(sem, iv)[0] for iv in ivs)
        assert radius_lower_bound(make_mixture(sem, ivs)) > 0


def test_pairwise_lower_bounds_are_positive_for_effective_pairs(chain3):
    ivs = [Intervention.stochastic(i, 2.0) for i in range(3)]
    for a, b in itertools.combinations(ivs, 2):
        assert param_sep_lower_bound(chain3, a, b).lb_combined > 0
