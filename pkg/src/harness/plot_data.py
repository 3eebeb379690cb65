# src/harness/plot_data.py

import os
from typing import List

import pandas as pd

from utils.errors import EmptyRequest, UnknownMetric
from utils.logger import get_logger

logger = get_logger(__name__)

PLOT_METRICS = ("k_star", "param_err", "weight_err", "jaccard", "jaccard_oracle",
                "shd", "shd_oracle", "radius_lb", "runtime_ms")


def summarize(results: pd.DataFrame, metric: str) -> pd.DataFrame:
    """(n, N) 그룹별 median / q05 / q95"""
    if metric not in PLOT_METRICS or metric not in results.columns:
        raise UnknownMetric(f"unknown metric '{metric}'")
    keys = [c for c in ("setting", "n", "N") if c in results.columns]
    ok = results
    if "error" in results.columns:
        ok = results[results["error"].fillna("").astype(str) == ""]
    grouped = ok.dropna(subset=[metric]).groupby(keys)[metric]
    summary = pd.DataFrame({
        "median": grouped.median(),
        "q05": grouped.quantile(0.05),
        "q95": grouped.quantile(0.95),
        "runs": grouped.size(),
    }).reset_index()
    return summary


def emit_plot_data(results: pd.DataFrame, metric: str, output_dir: str) -> List[str]:
    if results is None or results.empty:
        raise EmptyRequest("no result rows to summarize")
    metrics = [m for m in PLOT_METRICS if m in results.columns] if metric == "all" else [metric]
    os.makedirs(output_dir, exist_ok=True)
    paths = []
    for name in metrics:
        path = os.path.join(output_dir, f"plot_{name}.csv")
        summarize(results, name).to_csv(path, index=False, encoding="utf-8")
        paths.append(path)
    logger.info(f"plot data written: {paths}")
    return paths
