# src/utils/rng_utils.py
"""
시드 분할 규칙.

모든 병렬 작업(컴포넌트별 샘플링, EM 재시작, 탐색 재시작, 스윕 실행)은
(seed, chunk_index) -> SeedSequence(entropy=seed, spawn_key=(chunk_index,)) 로
독립 스트림을 얻습니다. 같은 (seed, chunk_index)는 항상 같은 스트림입니다.
"""
import numpy as np


def _entropy(seed: int) -> int:
    # SeedSequence는 음수 entropy를 받지 않음
    return abs(int(seed))


def split_seed(seed: int, chunk_index: int) -> np.random.Generator:
    """(seed, chunk_index) 쌍에 대응하는 독립 난수 생성기를 반환합니다."""
    ss = np.random.SeedSequence(entropy=_entropy(seed), spawn_key=(int(chunk_index),))
    return np.random.default_rng(ss)


def derive_seed(seed: int, *keys: int) -> int:
    """하위 작업에 넘길 정수 시드. keys는 (k, restart) 같은 경로입니다."""
    ss = np.random.SeedSequence(entropy=_entropy(seed), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint32)[0])

