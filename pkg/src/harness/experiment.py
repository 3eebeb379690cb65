# src/harness/experiment.py

import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Any, Dict, Iterable, List, Optional

import numpy as np
import pandas as pd
from tqdm import tqdm

from bounds.separation_bounds import radius_lower_bound
from config import RESULT_SCHEMA_VERSION, config
from discovery.gsp import estimate_dag
from discovery.targets import identify_targets
from evaluation.metrics import avg_jaccard, match_components, mixing_weight_error, parameter_estimation_error, shd
from fitting.gmm_fit import select_components
from harness.graph_gen import build_interventions, random_graph
from models.experiment_model import ExperimentConfig
from models.fit_model import FitResult
from models.sem_model import NoiseSpec, WeightedDag
from sem.mixture_gen import make_mixture, sample_mixture
from sem.sem_core import build_sem, observational_params, sample_component
from utils.errors import InvalidConfig
from utils.logger import get_logger
from utils.rng_utils import derive_seed, split_seed

logger = get_logger(__name__)

RESULT_COLUMNS = [
    "schema_version", "n", "seed", "N", "k_true", "k_star",
    "param_err", "weight_err", "jaccard", "jaccard_oracle", "shd", "shd_oracle",
    "radius_lb", "runtime_ms", "error",
]


def validate_experiment(cfg: ExperimentConfig) -> None:
    if cfg.n < 1:
        raise InvalidConfig(f"n must be at least 1, got {cfg.n}")
    if not 0.0 <= cfg.density <= 1.0:
        raise InvalidConfig(f"density must lie in [0, 1], got {cfg.density}")
    low, high = cfg.weight_range
    if low < 0 or high < low:
        raise InvalidConfig(f"invalid weight_range {cfg.weight_range}")
    if not cfg.sample_sizes:
        raise InvalidConfig("sample_sizes is empty")
    if min(cfg.sample_sizes) < cfg.n + 1:
        raise InvalidConfig(f"every sample size must be at least n+1={cfg.n + 1}")
    if not cfg.seeds:
        raise InvalidConfig("seeds is empty")
    if cfg.cutoff <= 0 or not 0 < cfg.alpha < 1:
        raise InvalidConfig("cutoff must be positive and alpha in (0, 1)")
    if cfg.restarts < 1:
        raise InvalidConfig("restarts must be at least 1")


class ResultAppender:
    """실행 결과 행을 모아 (seed, N) 순서로 한 번에 기록합니다."""

    def __init__(self, path: Optional[str] = None):
        self.path = path
        self._rows: List[Dict[str, Any]] = []
        self._lock = threading.Lock()

    def append(self, row: Dict[str, Any]) -> None:
        with self._lock:
            self._rows.append(row)

    def frame(self) -> pd.DataFrame:
        with self._lock:
            rows = list(self._rows)
        frame = pd.DataFrame(rows)
        for col in RESULT_COLUMNS:
            if col not in frame.columns:
                frame[col] = np.nan
        extra = [c for c in frame.columns if c not in RESULT_COLUMNS]
        frame = frame[RESULT_COLUMNS + extra]
        keys = [c for c in ("setting", "seed", "N") if c in frame.columns]
        return frame.sort_values(keys, kind="mergesort").reset_index(drop=True)

    def flush(self) -> pd.DataFrame:
        frame = self.frame()
        if self.path:
            directory = os.path.dirname(self.path)
            if directory:
                os.makedirs(directory, exist_ok=True)
            frame.to_csv(self.path, index=False, encoding="utf-8")
            logger.info(f"results written: {self.path} ({len(frame)} rows)")
        return frame


def run_single(cfg: ExperimentConfig, seed: int, sample_size: int,
               dag: Optional[WeightedDag] = None) -> Dict[str, Any]:
    """(seed, N) 한 번의 end-to-end 실행. dag 를 주면 랜덤 그래프 대신 사용합니다."""
    started = time.perf_counter()
    row: Dict[str, Any] = {"schema_version": RESULT_SCHEMA_VERSION, "n": cfg.n, "seed": seed,
                           "N": sample_size, "error": ""}
    try:
        n = cfg.n
        if dag is None:
            dag = random_graph(n, cfg.density, cfg.weight_range, derive_seed(seed, 0))
        sem = build_sem(dag, NoiseSpec.standard(n, cfg.noise_variance))
        interventions = build_interventions(sem, cfg, split_seed(seed, 1))
        spec = make_mixture(sem, interventions, include_observational=cfg.include_observational)
        row["k_true"] = spec.k

        mixture = sample_mixture(spec, sample_size, derive_seed(seed, 2, sample_size), workers=1)
        obs = sample_component(observational_params(sem), sample_size, derive_seed(seed, 3, sample_size))

        fit_cfg = cfg.fit.model_copy(update={"seed": derive_seed(seed, 4, sample_size), "workers": 1})
        k_star, fits = select_components(mixture.without_labels(), n, cfg.cutoff, fit_cfg)
        fit = fits[k_star - 1] or next(f for f in reversed(fits) if f is not None)
        row["k_star"] = k_star

        matching = match_components(spec, fit)
        row["param_err"] = parameter_estimation_error(matching)
        row["weight_err"] = mixing_weight_error(spec, fit, matching.assignment)

        search_seed = derive_seed(seed, 5, sample_size)
        targets = identify_targets(fit, obs, cfg.alpha)
        graph = estimate_dag(obs, fit, targets, cfg.alpha, cfg.restarts, search_seed, workers=1)
        row["jaccard"] = avg_jaccard(spec.true_targets, targets.per_component, matching.assignment)
        row["shd"] = shd(graph, dag)

        if cfg.run_oracle:
            oracle = FitResult.from_truth(spec, sample_size)
            oracle_targets = identify_targets(oracle, obs, cfg.alpha)
            oracle_graph = estimate_dag(obs, oracle, oracle_targets, cfg.alpha, cfg.restarts, search_seed, workers=1)
            identity = {k: k for k in range(spec.k)}
            row["jaccard_oracle"] = avg_jaccard(spec.true_targets, oracle_targets.per_component, identity)
            row["shd_oracle"] = shd(oracle_graph, dag)

        row["radius_lb"] = radius_lower_bound(spec) if spec.k >= 2 else np.nan
    except Exception as exc:
        logger.warning(f"run seed={seed} N={sample_size} failed: {type(exc).__name__}: {exc}")
        row["error"] = f"{type(exc).__name__}: {exc}"
    row["runtime_ms"] = int((time.perf_counter() - started) * 1000) if cfg.record_runtime else 0
    return row


def run_experiment(cfg: ExperimentConfig, write: bool = True, setting: Optional[Any] = None,
                   dag: Optional[WeightedDag] = None) -> pd.DataFrame:
    validate_experiment(cfg)
    if dag is not None and dag.n != cfg.n:
        raise InvalidConfig(f"fixed graph has {dag.n} nodes, config says n={cfg.n}")
    path = os.path.join(cfg.output_dir, "results.csv") if write else None
    appender = ResultAppender(path)
    jobs = [(seed, size) for seed in cfg.seeds for size in cfg.sample_sizes]
    logger.info(f"sweep n={cfg.n} kind={cfg.intervention_kind} coverage={cfg.coverage} "
                f"new_variance={cfg.new_variance} shift_gamma={cfg.shift_gamma} runs={len(jobs)}")

    with ThreadPoolExecutor(max_workers=cfg.workers or config.workers) as pool:
        futures = [pool.submit(run_single, cfg, seed, size, dag) for seed, size in jobs]
        for future in tqdm(as_completed(futures), total=len(futures), desc=f"n={cfg.n}", disable=len(jobs) < 2):
            row = future.result()
            if setting is not None:
                row["setting"] = setting
            appender.append(row)
    return appender.flush()


def _sweep(cfg: ExperimentConfig, field: str, values: Iterable[float], name: str, write: bool) -> pd.DataFrame:
    frames = []
    for value in values:
        sub = cfg.model_copy(update={field: value})
        frames.append(run_experiment(sub, write=False, setting=value))
    frame = pd.concat(frames, ignore_index=True)
    if write:
        os.makedirs(cfg.output_dir, exist_ok=True)
        path = os.path.join(cfg.output_dir, f"{name}.csv")
        frame.to_csv(path, index=False, encoding="utf-8")
        logger.info(f"{name} written: {path}")
    return frame


def variance_sweep(cfg: ExperimentConfig, values: Iterable[float], write: bool = True) -> pd.DataFrame:
    """stochastic 개입의 새 분산 σ' 을 바꿔가며 실행"""
    cfg = cfg.model_copy(update={"intervention_kind": "stochastic"})
    return _sweep(cfg, "new_variance", values, "variance_sweep", write)


def shift_sweep(cfg: ExperimentConfig, values: Iterable[float], write: bool = True) -> pd.DataFrame:
    """shift 개입의 평균 이동 γ 를 바꿔가며 실행"""
    cfg = cfg.model_copy(update={"intervention_kind": "shift"})
    return _sweep(cfg, "shift_gamma", values, "shift_sweep", write)
