# src/fitting/gmm_fit.py

from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Tuple

import numpy as np
from scipy import linalg
from scipy.cluster.vq import kmeans2
from scipy.special import logsumexp

from config import config
from models.component_model import Dataset, GaussianComponent
from models.fit_model import FitConfig, FitResult
from utils.errors import DegenerateComponent, InvalidConfig, TooFewSamples
from utils.logger import get_logger
from utils.rng_utils import derive_seed, split_seed

logger = get_logger(__name__)

LOG_2PI = np.log(2.0 * np.pi)


def _validate(cfg: FitConfig) -> None:
    if cfg.tol <= 0:
        raise InvalidConfig(f"tol must be positive, got {cfg.tol}")
    if cfg.max_iters < 1 or cfg.n_init < 1:
        raise InvalidConfig("max_iters and n_init must be at least 1")
    if cfg.cov_regularization < 0:
        raise InvalidConfig("cov_regularization must be nonnegative")


# -----------------------------------------------------------------------------
# E / M step
# -----------------------------------------------------------------------------
def _log_gaussian(x: np.ndarray, mean: np.ndarray, cov: np.ndarray) -> np.ndarray:
    try:
        chol = linalg.cholesky(cov, lower=True)
    except linalg.LinAlgError as exc:
        raise DegenerateComponent("component covariance is not positive definite") from exc
    sol = linalg.solve_triangular(chol, (x - mean).T, lower=True)
    log_det = 2.0 * np.sum(np.log(np.diag(chol)))
    return -0.5 * (x.shape[1] * LOG_2PI + log_det + np.sum(sol ** 2, axis=0))


def _e_step(x, weights, means, covs) -> Tuple[np.ndarray, float, float]:
    """(log 책임도, 평균 로그우도, 평균 로그우도의 표준오차)"""
    weighted = np.column_stack([
        np.log(weights[j]) + _log_gaussian(x, means[j], covs[j]) for j in range(len(weights))
    ])
    norm = logsumexp(weighted, axis=1)
    return weighted - norm[:, None], float(np.mean(norm)), float(np.std(norm) / np.sqrt(len(norm)))


def _m_step(x, resp, nk, reg) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    n_samples, n_features = x.shape
    weights = nk / n_samples
    means = (resp.T @ x) / nk[:, None]
    covs = np.empty((len(nk), n_features, n_features))
    for j in range(len(nk)):
        diff = x - means[j]
        covs[j] = (resp[:, j] * diff.T) @ diff / nk[j]
        covs[j].flat[::n_features + 1] += reg
    return weights, means, covs


def _kmeans_init(x: np.ndarray, k: int, reg: float, rng: np.random.Generator):
    # k-means++ 라벨로 한 번의 M-step. 빈 클러스터는 균등 책임도로 채움
    _, labels = kmeans2(x, k, iter=10, minit="++", missing="warn", seed=rng)
    resp = np.zeros((x.shape[0], k))
    resp[np.arange(x.shape[0]), labels] = 1.0
    empty = resp.sum(axis=0) == 0
    if empty.any():
        resp[:, empty] = 1.0 / k
        resp /= resp.sum(axis=1, keepdims=True)
    return _m_step(x, resp, resp.sum(axis=0), reg)


def _run_em(x: np.ndarray, k: int, cfg: FitConfig, restart: int) -> FitResult:
    rng = split_seed(cfg.seed, restart)
    n_samples, n_features = x.shape
    reg = cfg.cov_regularization

    pooled = np.atleast_2d(np.cov(x, rowvar=False, bias=True))
    pooled.flat[::n_features + 1] += reg
    weights, means, covs = _kmeans_init(x, k, reg, rng)

    log_resp, ll, se = _e_step(x, weights, means, covs)
    history = [ll]
    reinitialized = set()
    converged = False
    iters = 0
    for iters in range(1, cfg.max_iters + 1):
        resp = np.exp(log_resp)
        nk = resp.sum(axis=0)
        starved = np.flatnonzero(nk < 1.0)  # 책임 질량 < 1/N
        if starved.size:
            for j in starved:
                if j in reinitialized:
                    raise DegenerateComponent(f"component {j} collapsed twice (k={k}, restart={restart})")
                reinitialized.add(int(j))
                logger.warning(f"k={k} restart={restart}: reinitializing starved component {j}")
                means[j] = x[rng.integers(n_samples)]
                covs[j] = pooled
                weights[j] = 1.0 / k
            weights = weights / weights.sum()
            log_resp, ll, se = _e_step(x, weights, means, covs)
            history.append(ll)
            continue

        weights, means, covs = _m_step(x, resp, nk, reg)
        log_resp, ll_new, se = _e_step(x, weights, means, covs)
        history.append(ll_new)
        # 샘플당 평균 로그우도의 절대 변화
        if abs(ll_new - ll) <= cfg.tol:
            ll = ll_new
            converged = True
            break
        ll = ll_new

    if not np.isfinite(ll):
        raise DegenerateComponent(f"log-likelihood is not finite (k={k}, restart={restart})")
    return FitResult(
        components=[GaussianComponent(mean=means[j], cov=covs[j]) for j in range(k)],
        weights=weights,
        log_likelihood=ll,
        ll_std_error=se,
        responsibilities=np.exp(log_resp),
        converged=converged,
        iters=iters,
        n_samples=n_samples,
        history=history,
        cov_regularization=reg,
        restart=restart,
    )


def fit_gmm(data: Dataset, k: int, cfg: Optional[FitConfig] = None) -> FitResult:
    """
    Full-covariance EM, best of cfg.n_init restarts by final mean log-likelihood.

    Rows are put into a canonical (lexicographic) order first so the result
    does not depend on the order the samples arrive in.
    """
    cfg = cfg or FitConfig()
    _validate(cfg)
    if k < 1:
        raise InvalidConfig(f"k must be at least 1, got {k}")
    if data.size < k:
        raise TooFewSamples(f"{data.size} samples cannot support {k} components")

    order = np.lexsort(data.rows.T[::-1])
    x = np.ascontiguousarray(data.rows[order])

    def _attempt(restart: int):
        try:
            return _run_em(x, k, cfg, restart)
        except DegenerateComponent as exc:
            logger.warning(f"k={k} restart={restart} discarded: {exc}")
            return exc

    with ThreadPoolExecutor(max_workers=cfg.workers or config.workers) as pool:
        outcomes = list(pool.map(_attempt, range(cfg.n_init)))

    fits = [o for o in outcomes if isinstance(o, FitResult)]
    if not fits:
        raise outcomes[0]
    best = max(fits, key=lambda f: (f.log_likelihood, -f.restart))

    resp = np.empty_like(best.responsibilities)
    resp[order] = best.responsibilities
    logger.debug(f"fit_gmm k={k}: ll={best.log_likelihood:.5f} iters={best.iters} restart={best.restart}")
    return best.model_copy(update={"responsibilities": resp})


# -----------------------------------------------------------------------------
# 컴포넌트 수 선택
# -----------------------------------------------------------------------------
def select_from_fits(fits: List[Optional[FitResult]], cutoff: float) -> int:
    """
    fits[k-1] 는 k 컴포넌트 적합 결과. 실패한 k(None)는 직전 우도를 그대로 씁니다.

    l_k 는 k=1 적합 대비 이득 g_k = l_k - l_1 로 재고, 단조 포락선을 씌워 EM 국소해로 생긴
    역전을 없앱니다. 위에서부터 처음으로 (g_k - g_{k-1}) / g_k > cutoff 이면서 그 증가가
    k=1 평균 로그우도의 표준오차보다 큰 k, 없으면 1. 데이터 스케일과 N 에 무관합니다.
    """
    envelope: List[Optional[float]] = []
    best = None
    for fit in fits:
        if fit is not None:
            best = fit.log_likelihood if best is None else max(best, fit.log_likelihood)
        envelope.append(best)
    if not fits or fits[0] is None:
        return 1
    floor = fits[0].ll_std_error
    base = envelope[0]
    total = envelope[-1] - base
    if total <= floor:
        return 1
    for k in range(len(fits), 1, -1):
        gain = envelope[k - 1] - envelope[k - 2]
        if gain > cutoff * (envelope[k - 1] - base) and gain > floor:
            return k
    return 1


def select_components(data: Dataset, n: int, cutoff: Optional[float] = None,
                      cfg: Optional[FitConfig] = None) -> Tuple[int, List[Optional[FitResult]]]:
    cfg = cfg or FitConfig()
    cutoff = config.fit.cutoff if cutoff is None else cutoff
    if cutoff <= 0:
        raise InvalidConfig(f"cutoff must be positive, got {cutoff}")
    if data.size < n + 1:
        raise TooFewSamples(f"need at least {n + 1} samples, got {data.size}")

    def _fit(k: int) -> Optional[FitResult]:
        sub_cfg = cfg.model_copy(update={"seed": derive_seed(cfg.seed, k)})
        try:
            return fit_gmm(data, k, sub_cfg)
        except DegenerateComponent as exc:
            logger.warning(f"k={k} failed on every restart: {exc}")
            return None

    with ThreadPoolExecutor(max_workers=cfg.workers or config.workers) as pool:
        fits = list(pool.map(_fit, range(1, n + 2)))

    k_star = select_from_fits(fits, cutoff)
    logger.info(f"select_components: k_star={k_star} (cutoff={cutoff})")
    return k_star, fits
