import os
import json
from typing import Any, Dict, List, Optional, Union

import yaml

from utils.logger import get_logger

logger = get_logger(__name__)


def open_yaml(file_path: str) -> Optional[Dict[str, Any]]:
    """
    YAML 파일을 안전하게 열어서 Python 딕셔너리 형태로 반환합니다.
    파일이 없거나 파싱에 실패하면 None을 반환합니다.
    """
    try:
        with open(file_path, 'r', encoding='utf-8') as f:
            return yaml.safe_load(f)
    except FileNotFoundError:
        logger.error(f"The file '{file_path}' was not found.")
    except yaml.YAMLError as exc:
        logger.error(f"Error parsing YAML file: {exc}")
    return None


def load_structured(file_path: str) -> Dict[str, Any]:
    """확장자에 따라 JSON 또는 YAML 을 읽습니다."""
    if file_path.endswith((".yaml", ".yml")):
        data = open_yaml(file_path)
        if data is None:
            raise FileNotFoundError(file_path)
        return data
    with open(file_path, 'r', encoding='utf-8') as f:
        return json.load(f)


def save_json(data: Any, file_path: str) -> str:
    directory = os.path.dirname(file_path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(file_path, 'w', encoding='utf-8') as f:
        json.dump(data, f, ensure_ascii=False, indent=2)
    logger.info(f"saved {file_path}")
    return file_path


def _to_number(val: Optional[str]) -> Optional[Union[int, float]]:
    """
    문자열 숫자를 int/float로 변환. "2^10" 같은 거듭제곱 표기도 허용합니다.
    """
    if val is None:
        return None
    s = str(val).strip()
    if not s:
        return None
    if "^" in s:
        base, exp = s.split("^", 1)
        return int(base) ** int(exp)
    try:
        if "." in s or "e" in s.lower():
            return float(s)
        return int(s)
    except ValueError:
        return None


def parse_number_list(text: Optional[str]) -> List[Union[int, float]]:
    """'1024,2^12,0.07' -> [1024, 4096, 0.07]"""
    if not text:
        return []
    values = [_to_number(part) for part in str(text).split(",")]
    return [v for v in values if v is not None]
