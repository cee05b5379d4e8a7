import logging
import sys
import time
from datetime import datetime
from pathlib import Path
from typing import Dict, Optional, Union


def setup_logging(level=logging.INFO, log_dir: Optional[Union[str, Path]] = None):
    """Setup console + dated file logging for a pipeline run"""

    formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )

    console_handler = logging.StreamHandler(sys.stdout)
    console_handler.setLevel(level)
    console_handler.setFormatter(formatter)
    handlers = [console_handler]

    if log_dir is not None:
        log_path = Path(log_dir)
        log_path.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(
            log_path / f'pipeline_{datetime.now().strftime("%Y%m%d")}.log', encoding="utf-8"
        )
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(formatter)
        handlers.append(file_handler)

    logging.basicConfig(
        level=min(level, logging.DEBUG) if log_dir is not None else level,
        handlers=handlers,
        force=True
    )

    # Third-party clients are chatty at DEBUG
    for noisy in ("urllib3", "httpx", "openai"):
        logging.getLogger(noisy).setLevel(logging.WARNING)

    logging.getLogger(__name__).debug("Logging setup completed")


class StageTimer:
    """Wall-clock timings per stage for the run report"""

    def __init__(self):
        self.durations: Dict[str, float] = {}
        self._started: Dict[str, float] = {}

    def start(self, stage: str):
        self._started[stage] = time.perf_counter()

    def stop(self, stage: str) -> float:
        started = self._started.pop(stage, None)
        duration = time.perf_counter() - started if started is not None else 0.0
        self.durations[stage] = duration
        logging.getLogger(__name__).info(f"⏱️ Stage {stage} took {duration:.2f}s")
        return duration
