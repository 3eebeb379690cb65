# serialization.py
from typing import Any, Dict, List, Optional, Tuple

from models.component_model import GaussianComponent, MixtureSpec
from models.fit_model import FitResult
from models.graph_model import GraphEstimate, TargetEstimate
from models.report_model import SeparationReport
from models.sem_model import Intervention, LinearSem, NoiseSpec, WeightedDag
from sem.mixture_gen import make_mixture
from sem.sem_core import build_sem


# ---------------------------------------------------------------------
# SEM / 개입
# ---------------------------------------------------------------------
def sem_to_dict(sem: LinearSem) -> Dict[str, Any]:
    data = {
        "n": sem.n,
        "weights": sem.weights.tolist(),
        "mu": sem.mu.tolist(),
        "variances": sem.variances.tolist(),
    }
    if sem.dag.node_labels:
        data["node_labels"] = list(sem.dag.node_labels)
    return data


def sem_from_dict(data: Dict[str, Any]) -> LinearSem:
    dag = WeightedDag(weights=data["weights"], node_labels=data.get("node_labels"))
    return build_sem(dag, NoiseSpec(mu=data["mu"], variances=data["variances"]))


def intervention_to_dict(iv: Intervention) -> Dict[str, Any]:
    return iv.model_dump(mode="json")


def intervention_from_dict(data: Dict[str, Any]) -> Intervention:
    return Intervention(**data)


# ---------------------------------------------------------------------
# 정답 혼합 분포
# ---------------------------------------------------------------------
def truth_to_dict(sem: LinearSem, interventions: List[Intervention], spec: MixtureSpec) -> Dict[str, Any]:
    return {
        "sem": sem_to_dict(sem),
        "interventions": [intervention_to_dict(iv) for iv in interventions],
        "include_observational": any(tag.kind == "observational" for tag in spec.provenance),
        "weights": spec.weights.tolist(),
        "components": [c.model_dump(mode="json") for c in spec.components],
        "targets": [sorted(t) for t in spec.true_targets],
    }


def truth_from_dict(data: Dict[str, Any]) -> Tuple[LinearSem, List[Intervention], MixtureSpec]:
    sem = sem_from_dict(data["sem"])
    interventions = [intervention_from_dict(d) for d in data.get("interventions", [])]
    spec = make_mixture(sem, interventions, data.get("weights"),
                        include_observational=data.get("include_observational", True))
    return sem, interventions, spec


# ---------------------------------------------------------------------
# 적합 결과 / 그래프
# ---------------------------------------------------------------------
def fit_to_dict(k_star: int, fits: List[Optional[FitResult]]) -> Dict[str, Any]:
    dumped = []
    for k, fit in enumerate(fits, start=1):
        if fit is None:
            dumped.append({"k": k, "failed": True})
            continue
        entry = fit.model_dump(mode="json", exclude={"responsibilities"})
        entry["k"] = k
        dumped.append(entry)
    return {"k_star": k_star, "fits": dumped}


def fit_from_dict(data: Dict[str, Any]) -> Tuple[int, List[Optional[FitResult]]]:
    fits: List[Optional[FitResult]] = []
    for entry in data["fits"]:
        if entry.get("failed"):
            fits.append(None)
            continue
        entry = {k: v for k, v in entry.items() if k != "k"}
        entry["components"] = [GaussianComponent(**c) for c in entry["components"]]
        fits.append(FitResult(**entry))
    return int(data["k_star"]), fits


def selected_fit(data: Dict[str, Any]) -> FitResult:
    k_star, fits = fit_from_dict(data)
    fit = fits[k_star - 1]
    if fit is None:
        raise ValueError(f"fit for k_star={k_star} is missing")
    return fit


def graph_to_dict(graph: GraphEstimate, targets: TargetEstimate) -> Dict[str, Any]:
    return {
        "adjacency": graph.adjacency.tolist(),
        "targets": [sorted(t) for t in targets.per_component],
        "permutation": list(graph.permutation),
        "score": graph.score,
    }


def graph_from_dict(data: Dict[str, Any]) -> Tuple[GraphEstimate, TargetEstimate]:
    graph = GraphEstimate(adjacency=data["adjacency"],
                          permutation=tuple(data.get("permutation", range(len(data["adjacency"])))),
                          score=data.get("score", 0.0))
    return graph, TargetEstimate(per_component=[frozenset(t) for t in data["targets"]])


def report_to_row(report: SeparationReport) -> Dict[str, Any]:
    """SeparationReport -> bounds CSV 한 행 (terms 펼침)"""
    row = report.model_dump(exclude={"case_tags", "terms"})
    row["psi_i"] = report.case_tags.get("i")
    row["psi_j"] = report.case_tags.get("j")
    row.update(report.terms.model_dump())
    return row
