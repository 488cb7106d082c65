# src/core/logging_config.py

import logging
import sys

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def configure_logging(level: str = "INFO", stream=None) -> None:
    """루트 로거 설정. CLI 는 stdout 을 결과 출력에 쓰므로 stderr 로 보냅니다."""
    logging.basicConfig(
        level=getattr(logging, str(level).upper(), logging.INFO),
        format=LOG_FORMAT,
        stream=stream or sys.stderr,
        force=True,
    )
