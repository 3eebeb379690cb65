import os
from typing import Any, Dict, Optional, Tuple

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, Field
from pydantic_settings import BaseSettings, SettingsConfigDict

# .env 파일 로드
load_dotenv()

PROJECT_ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))

# 환경 변수에서 값 읽기
CONFIG_PATH = os.getenv("MIXSEM_CONFIG", os.path.join(PROJECT_ROOT, "config.yaml"))
LOG_LEVEL = os.getenv("MIXSEM_LOG_LEVEL", "INFO")  # 기본값 설정
LOG_FILE = os.getenv("MIXSEM_LOG_FILE", "mixsem.log")

# 실험 기본 상수
DO_VARIANCE_FLOOR = 1e-9
PSD_TOLERANCE = 1e-8
RANK_TOLERANCE = 1e-9
EM_TOL = 1e-3
EM_MAX_ITERS = 500
EM_N_INIT = 5
COV_REGULARIZATION = 1e-6
CUTOFF_RATIO = 0.07
CI_ALPHA = 1e-3
EDGE_DENSITY = 0.8
WEIGHT_RANGE: Tuple[float, float] = (0.5, 1.0)
STOCHASTIC_VARIANCE = 2.0
SHIFT_GAMMA = 2.0
RESULT_SCHEMA_VERSION = 1


class SemConfig(BaseModel):
    do_variance_floor: float = DO_VARIANCE_FLOOR
    psd_tolerance: float = PSD_TOLERANCE
    rank_tolerance: float = RANK_TOLERANCE


class FitDefaults(BaseModel):
    max_iters: int = EM_MAX_ITERS
    tol: float = EM_TOL
    n_init: int = EM_N_INIT
    cov_regularization: float = COV_REGULARIZATION
    cutoff: float = CUTOFF_RATIO


class DiscoveryConfig(BaseModel):
    alpha: float = CI_ALPHA
    restarts: int = 10
    search_depth: int = 4
    violation_penalty: float = 1.0
    max_targets: int = 1  # atomic 설정에서는 컴포넌트당 타깃 1개


class ExperimentDefaults(BaseModel):
    density: float = EDGE_DENSITY
    weight_range: Tuple[float, float] = WEIGHT_RANGE
    new_variance: float = STOCHASTIC_VARIANCE
    shift_gamma: float = SHIFT_GAMMA
    soft_scale: float = 0.5
    noise_variance: float = 1.0
    sample_sizes: list = Field(default_factory=lambda: [2 ** p for p in range(10, 18)])


class LogConfig(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="MIXSEM_LOG_", extra="ignore")

    level: str = LOG_LEVEL
    file: Optional[str] = LOG_FILE


class RuntimeConfig(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="MIXSEM_", extra="ignore")

    workers: int = 1


def _read_yaml(path: str) -> Dict[str, Any]:
    if not path or not os.path.exists(path):
        return {}
    with open(path, "r", encoding="utf-8") as f:
        data = yaml.safe_load(f)
    return data or {}


class Config:
    def __init__(self, path: Optional[str] = CONFIG_PATH):
        raw = _read_yaml(path)
        self.path = path
        self.sem = SemConfig(**raw.get("sem", {}))
        self.fit = FitDefaults(**raw.get("fit", {}))
        self.discovery = DiscoveryConfig(**raw.get("discovery", {}))
        self.experiment = ExperimentDefaults(**raw.get("experiment", {}))
        # 환경 변수가 YAML보다 우선
        log_section = {k: v for k, v in raw.get("log", {}).items()
                       if f"MIXSEM_LOG_{k.upper()}" not in os.environ}
        self.log = LogConfig(**log_section)
        self.runtime = RuntimeConfig()

    @property
    def workers(self) -> int:
        return max(1, self.runtime.workers)


# 설정 객체 생성
config = Config()
