# src/utils/logger.py

import os
import sys
import logging
from logging.handlers import RotatingFileHandler
from typing import List, Optional, Union

from config import config

LOG_FORMAT = '[%(asctime)s] [%(levelname)s] [%(name)s] %(message)s'
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

# get_logger 로 만든 로거 이름 (set_level 대상)
_registered: List[str] = []


def _resolve_level(level: Union[int, str, None]) -> int:
    if level is None:
        level = config.log.level
    if isinstance(level, int):
        return level
    return getattr(logging, str(level).upper(), logging.INFO)


def _handlers(level: int) -> List[logging.Handler]:
    formatter = logging.Formatter(LOG_FORMAT, DATE_FORMAT)
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stdout)]
    log_file = config.log.file
    if log_file:
        directory = os.path.dirname(log_file)
        if directory:
            os.makedirs(directory, exist_ok=True)
        handlers.append(RotatingFileHandler(log_file, maxBytes=5 * 1024 * 1024, backupCount=3, encoding="utf-8"))
    for handler in handlers:
        handler.setLevel(level)
        handler.setFormatter(formatter)
    return handlers


def get_logger(name: str = __name__, level: Union[int, str, None] = None) -> logging.Logger:
    """
    config.yaml 의 log 섹션과 MIXSEM_LOG_* 환경 변수로 로거를 초기화합니다.
    MIXSEM_LOG_FILE 이 빈 문자열이면 콘솔에만 기록합니다.
    """
    logger = logging.getLogger(name)
    resolved = _resolve_level(level)
    logger.setLevel(resolved)

    # 핸들러가 이미 등록되어 있으면 재설정하지 않음
    if not logger.handlers:
        for handler in _handlers(resolved):
            logger.addHandler(handler)
        _registered.append(name)
    return logger


def set_level(level: Optional[Union[int, str]]) -> int:
    """등록된 모든 로거와 핸들러의 레벨을 바꿉니다 (CLI --log-level)."""
    resolved = _resolve_level(level)
    for name in _registered:
        logger = logging.getLogger(name)
        logger.setLevel(resolved)
        for handler in logger.handlers:
            handler.setLevel(resolved)
    return resolved
