# tests/conftest.py
import os
import sys
import pathlib

import numpy as np
import pytest

# 테스트 중에는 파일 로그를 남기지 않음
os.environ.setdefault("MIXSEM_LOG_FILE", "")

SRC_PATH = pathlib.Path(__file__).resolve().parents[1]
if str(SRC_PATH) not in sys.path:
    sys.path.insert(0, str(SRC_PATH))

from models.sem_model import NoiseSpec, WeightedDag  # noqa: E402
from sem.sem_core import build_sem  # noqa: E402


@pytest.fixture
def chain2():
    """0 -> 1, 가중치 1, 단위 분산, 평균 0"""
    dag = WeightedDag(weights=[[0.0, 0.0], [1.0, 0.0]])
    return build_sem(dag, NoiseSpec.standard(2))


@pytest.fixture
def chain3():
    """0 -> 1 -> 2"""
    dag = WeightedDag(weights=[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.8, 0.0]])
    return build_sem(dag, NoiseSpec.standard(3))


@pytest.fixture
def empty2():
    return build_sem(WeightedDag(weights=np.zeros((2, 2))), NoiseSpec.standard(2))
