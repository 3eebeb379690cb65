# dataset_io.py
import os
from typing import Optional

import numpy as np
import pandas as pd

from models.component_model import Dataset
from utils.errors import NonFiniteData
from utils.logger import get_logger

logger = get_logger(__name__)


# ---------------------------------------------------------------------
# 경로 유틸
# ---------------------------------------------------------------------
def labels_path(path: str) -> str:
    """mix.csv -> mix.labels.csv"""
    root, ext = os.path.splitext(path)
    return f"{root}.labels{ext or '.csv'}"


def _ensure_dir(path: str) -> None:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)


# ---------------------------------------------------------------------
# 저장 / 로드
# ---------------------------------------------------------------------
def save_dataset(ds: Dataset, path: str) -> str:
    """샘플만 저장 (잠재 라벨은 적합 파이프라인에 넘기지 않음)"""
    _ensure_dir(path)
    frame = pd.DataFrame(ds.rows, columns=ds.columns)
    frame.to_csv(path, index=False, encoding="utf-8", float_format="%.17g")
    logger.info(f"dataset saved: {path} ({ds.size} rows)")
    return path


def export_labels(ds: Dataset, path: str) -> Optional[str]:
    """평가용 라벨 파일 <name>.labels.csv"""
    if ds.labels is None:
        return None
    target = labels_path(path)
    _ensure_dir(target)
    pd.DataFrame({"label": ds.labels}).to_csv(target, index=False, encoding="utf-8")
    return target


def load_dataset(path: str, with_labels: bool = False) -> Dataset:
    frame = pd.read_csv(path, encoding="utf-8", float_precision="round_trip")
    labels = None
    if with_labels and os.path.exists(labels_path(path)):
        labels = pd.read_csv(labels_path(path))["label"].to_numpy(dtype=int)
    rows = frame.to_numpy(dtype=float)
    if not np.all(np.isfinite(rows)):
        raise NonFiniteData(f"{path} contains non-finite values")
    return Dataset(rows=rows, labels=labels, node_labels=[str(c) for c in frame.columns])
