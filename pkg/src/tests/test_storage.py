import numpy as np
import pandas as pd
import pytest

from fitting.gmm_fit import select_components
from main import main
from models.component_model import Dataset
from models.fit_model import FitConfig
from models.graph_model import GraphEstimate, TargetEstimate
from models.sem_model import Intervention
from sem.mixture_gen import make_mixture, sample_mixture
from storage.dataset_io import export_labels, labels_path, load_dataset, save_dataset
from storage.serialization import (
    fit_from_dict, fit_to_dict, graph_from_dict, graph_to_dict, selected_fit, sem_from_dict, sem_to_dict,
    truth_from_dict, truth_to_dict,
)
from utils.errors import NonFiniteData


def test_sem_json_layout(chain2):
    data = sem_to_dict(chain2)
    assert set(data) == {"n", "weights", "mu", "variances"}
    assert data["weights"] == [[0.0, 0.0], [1.0, 0.0]]
    assert sem_from_dict(data).topo_perm == chain2.topo_perm


def test_intervention_json_layout():
    data = Intervention.soft(1, new_row=[0.5, 0.0], gamma=1.0).model_dump(mode="json")
    assert data == {"target": 1, "kind": "soft", "gamma": 1.0, "new_variance": None, "new_row": [0.5, 0.0]}


def test_truth_file_rebuilds_the_mixture(chain3):
    ivs = [Intervention.stochastic(0, 2.0), Intervention.shift(2, 1.5)]
    spec = make_mixture(chain3, ivs)
    _, ivs_back, spec_back = truth_from_dict(truth_to_dict(chain3, ivs, spec))
    assert [iv.kind for iv in ivs_back] == ["stochastic", "shift"]
    for a, b in zip(spec.components, spec_back.components):
        np.testing.assert_allclose(a.cov, b.cov)
        np.testing.assert_allclose(a.mean, b.mean)


def test_dataset_csv_keeps_labels_separate(chain2, tmp_path):
    ds = sample_mixture(make_mixture(chain2, [Intervention.stochastic(1, 2.0)]), 50, seed=0)
    path = str(tmp_path / "mix.csv")
    save_dataset(ds, path)
    label_file = export_labels(ds, path)

    assert label_file == labels_path(path) == str(tmp_path / "mix.labels.csv")
    header = pd.read_csv(path).columns.tolist()
    assert header == ["V0", "V1"]
    loaded = load_dataset(path)
    assert loaded.labels is None
    np.testing.assert_array_equal(loaded.rows, ds.rows)
    np.testing.assert_array_equal(load_dataset(path, with_labels=True).labels, ds.labels)


def test_export_labels_without_labels(tmp_path):
    assert export_labels(Dataset(rows=np.zeros((3, 2))), str(tmp_path / "x.csv")) is None


def test_load_dataset_rejects_non_finite(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n3,\n", encoding="utf-8")
    with pytest.raises(NonFiniteData):
        load_dataset(str(path))
    assert main(["fit", "--data", str(path), "--out", str(tmp_path / "fit.json")]) == 1


def test_dataset_csv_round_trip_is_exact(tmp_path):
    rows = np.random.default_rng(3).normal(size=(500, 4)) * np.array([1e-7, 1.0, 1e3, 1e9])
    path = str(tmp_path / "rows.csv")
    save_dataset(Dataset(rows=rows), path)
    np.testing.assert_array_equal(load_dataset(path).rows, rows)


def test_fit_file_keeps_failed_k():
    rows = np.random.default_rng(0).normal(size=(200, 1))
    k_star, fits = select_components(Dataset(rows=rows), 1, cfg=FitConfig(seed=1, n_init=2))
    data = fit_to_dict(k_star, fits + [None])
    assert data["fits"][-1] == {"k": 3, "failed": True}
    k_back, fits_back = fit_from_dict(data)
    assert k_back == k_star
    assert fits_back[-1] is None
    assert fits_back[0].log_likelihood == pytest.approx(fits[0].log_likelihood)
    assert selected_fit(data).k == k_star


def test_graph_file_layout():
    graph = GraphEstimate(adjacency=[[0, 1], [0, 0]], permutation=(0, 1), score=1.0)
    targets = TargetEstimate(per_component=[frozenset(), frozenset({1})])
    data = graph_to_dict(graph, targets)
    assert data["adjacency"] == [[0, 1], [0, 0]]
    assert data["targets"] == [[], [1]]
    graph_back, targets_back = graph_from_dict(data)
    assert graph_back.edges == [(0, 1)]
    assert targets_back.per_component[1] == frozenset({1})
