# src/utils/linalg_utils.py

from typing import Iterable, Optional

import numpy as np
from scipy import linalg

from utils.errors import FactorizationFailure


def as_float_array(value, ndim: Optional[int] = None) -> np.ndarray:
    """리스트/배열을 읽기 전용 float 배열로 변환합니다."""
    arr = np.array(value, dtype=float, copy=True)
    if ndim is not None and arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


def frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


def symmetrize(mat: np.ndarray) -> np.ndarray:
    return 0.5 * (mat + mat.T)


def vec(mat: np.ndarray) -> np.ndarray:
    return np.asarray(mat, dtype=float).reshape(-1)


def psd_factor(cov: np.ndarray, tol: float) -> np.ndarray:
    """
    Cholesky-type factor L with L @ L.T == cov.

    Falls back to an eigen-decomposition with negative eigenvalues clipped to 0
    when they are above -tol; anything more negative is not a covariance.
    """
    cov = symmetrize(np.asarray(cov, dtype=float))
    try:
        return linalg.cholesky(cov, lower=True)
    except linalg.LinAlgError:
        pass
    eigval, eigvec = linalg.eigh(cov)
    if eigval.min() < -tol:
        raise FactorizationFailure(f"covariance is not PSD (min eigenvalue {eigval.min():.3e})")
    return eigvec * np.sqrt(np.clip(eigval, 0.0, None))


def numerical_rank(rows: np.ndarray, tol: float) -> int:
    """Count singular values above tol times the largest."""
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    s = linalg.svd(rows, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


def is_ill_conditioned(block: np.ndarray, limit: float = 1e12) -> bool:
    if block.size == 0:
        return False
    return not np.isfinite(np.linalg.cond(block)) or np.linalg.cond(block) > limit


def index_list(nodes: Iterable[int]) -> list:
    return sorted(int(v) for v in nodes)
