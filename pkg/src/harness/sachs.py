# src/harness/sachs.py
"""
Sachs 단백질 신호 데이터 적재와 cutoff 스윕.

CSV 한 파일에 11개 단백질 열과 조건 라벨 열이 있고, manifest 가 라벨을 역할
(observational / 개입 대상 단백질)로 연결합니다.
"""
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from discovery.gsp import estimate_dag
from discovery.targets import identify_targets
from evaluation.metrics import avg_jaccard, match_components, parameter_estimation_error, shd
from fitting.gmm_fit import select_components, select_from_fits
from helpers import load_structured
from models.component_model import ComponentTag, Dataset, MixtureSpec
from models.experiment_model import SACHS_COLUMNS, SACHS_ROLES, SachsManifest
from models.fit_model import FitConfig
from utils.errors import EmptySplit, InvalidConfig, SchemaMismatch, UnknownCondition
from utils.logger import get_logger

logger = get_logger(__name__)

DEFAULT_MANIFEST = SachsManifest(conditions={
    "cd3cd28": "observational",
    "cd3cd28icam2": "observational",
    "cd3cd28+aktinhib": "Akt",
    "cd3cd28+g0076": "PKC",
    "cd3cd28+psitect": "PIP2",
    "cd3cd28+u0126": "Mek",
    "cd3cd28+ly": "PIP3",
})

# 합의(consensus) 네트워크
SACHS_CONSENSUS_EDGES: List[Tuple[str, str]] = [
    ("PKC", "Raf"), ("PKC", "Mek"), ("PKC", "PKA"), ("PKC", "JNK"), ("PKC", "P38"),
    ("PKA", "Raf"), ("PKA", "Mek"), ("PKA", "Erk"), ("PKA", "Akt"), ("PKA", "JNK"), ("PKA", "P38"),
    ("Raf", "Mek"), ("Mek", "Erk"), ("PLCg", "PIP2"), ("PIP3", "PIP2"), ("PLCg", "PIP3"),
    ("Erk", "Akt"),
]


class SachsData:
    """관측 split, 개입 split 들(역할 순서), 이를 합친 혼합 데이터"""

    def __init__(self, obs: Dataset, interventional: List[Dataset], roles: List[str], mixture: Dataset):
        self.obs = obs
        self.interventional = interventional
        self.roles = roles
        self.mixture = mixture

    @property
    def columns(self) -> List[str]:
        return self.mixture.columns


def load_manifest(path: Optional[str]) -> SachsManifest:
    if not path:
        return DEFAULT_MANIFEST
    return SachsManifest(**load_structured(path))


def load_sachs(path: str, manifest: Optional[SachsManifest] = None) -> SachsData:
    manifest = manifest or DEFAULT_MANIFEST
    frame = pd.read_csv(path, encoding="utf-8")

    expected = list(manifest.columns) + [manifest.condition_column]
    if sorted(frame.columns) != sorted(expected):
        raise SchemaMismatch(f"expected columns {expected}, got {list(frame.columns)}")

    present = set(frame[manifest.condition_column].astype(str).unique())
    for label, role in manifest.conditions.items():
        if role not in SACHS_ROLES:
            raise UnknownCondition(f"unknown role '{role}' for condition '{label}'")
        if label not in present:
            raise UnknownCondition(f"condition '{label}' not found in {path}")

    conditions = frame[manifest.condition_column].astype(str)
    values = frame[list(manifest.columns)]

    def _split(role: str) -> Optional[Dataset]:
        labels = [label for label, r in manifest.conditions.items() if r == role]
        mask = conditions.isin(labels).to_numpy()
        if not mask.any():
            return None
        return Dataset(rows=values[mask].to_numpy(dtype=float), node_labels=list(manifest.columns))

    obs = _split("observational")
    if obs is None:
        raise EmptySplit("manifest selects no observational rows")
    roles, interventional = [], []
    for role in SACHS_ROLES[1:]:
        part = _split(role)
        if part is not None:
            roles.append(role)
            interventional.append(part)
    if not interventional:
        raise EmptySplit("manifest selects no interventional rows")

    parts = [obs] + interventional
    rows = np.vstack([p.rows for p in parts])
    labels = np.concatenate([np.full(p.size, k) for k, p in enumerate(parts)])
    mixture = Dataset(rows=rows, labels=labels, node_labels=list(manifest.columns))
    logger.info(f"sachs loaded: obs={obs.size} " + " ".join(f"{r}={p.size}" for r, p in zip(roles, interventional)))
    return SachsData(obs, interventional, roles, mixture)


def consensus_adjacency(columns: Sequence[str] = SACHS_COLUMNS) -> np.ndarray:
    index = {name: i for i, name in enumerate(columns)}
    adjacency = np.zeros((len(columns), len(columns)), dtype=int)
    for src, dst in SACHS_CONSENSUS_EDGES:
        if src in index and dst in index:
            adjacency[index[src], index[dst]] = 1
    return adjacency


def empirical_truth(data: SachsData) -> MixtureSpec:
    """split 별 표본 적률을 정답 컴포넌트로 사용 (가중치는 split 크기 비율)"""
    parts = [data.obs] + data.interventional
    sizes = np.array([p.size for p in parts], dtype=float)
    index = {name: i for i, name in enumerate(data.columns)}
    tags = [ComponentTag(kind="observational")]
    tags += [ComponentTag(kind="intervention", target=index[role]) for role in data.roles]
    return MixtureSpec(components=[p.sample_moments() for p in parts],
                       weights=sizes / sizes.sum(), provenance=tags)


def sachs_cutoff_sweep(data: SachsData, cutoffs: Sequence[float], alpha: Optional[float] = None,
                       restarts: Optional[int] = None, seed: int = 0,
                       fit_cfg: Optional[FitConfig] = None) -> pd.DataFrame:
    """
    k=1..n+1 적합은 한 번만 하고 cutoff 마다 k* 를 다시 고른 뒤
    target Jaccard 와 합의 네트워크 대비 SHD 를 계산합니다.
    """
    if not cutoffs:
        raise InvalidConfig("cutoffs must not be empty")
    n = data.mixture.n
    fit_cfg = (fit_cfg or FitConfig()).model_copy(update={"seed": seed})
    _, fits = select_components(data.mixture.without_labels(), n, min(cutoffs), fit_cfg)
    truth = empirical_truth(data)
    consensus = consensus_adjacency(data.columns)

    rows: List[Dict] = []
    for cutoff in cutoffs:
        k_star = select_from_fits(fits, cutoff)
        fit = fits[k_star - 1] or next(f for f in reversed(fits) if f is not None)
        matching = match_components(truth, fit)
        targets = identify_targets(fit, data.obs, alpha)
        graph = estimate_dag(data.obs, fit, targets, alpha, restarts, seed)
        rows.append({
            "cutoff": cutoff,
            "k_star": k_star,
            "jaccard": avg_jaccard(truth.true_targets, targets.per_component, matching.assignment),
            "shd": shd(graph, consensus),
            "edges": len(graph.edges),
            "param_err": parameter_estimation_error(matching),
        })
        logger.info(f"sachs cutoff={cutoff}: k*={k_star} shd={rows[-1]['shd']}")
    return pd.DataFrame(rows)
