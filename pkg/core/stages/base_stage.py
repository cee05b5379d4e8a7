# [file name]: core/stages/base_stage.py
import asyncio
import logging
import shutil
from pathlib import Path
from typing import TYPE_CHECKING, Any, Awaitable, Callable, Dict, List, Optional, Sequence, Tuple, TypeVar

from pydantic import BaseModel, Field

from config.constants import STAGE_ORDER
from config.settings import settings
from core.errors import PipelineError
from utils.helpers import canonical_json, digest_file, digest_text

if TYPE_CHECKING:
    from core.system_initializer import PipelineSystem

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class StageOutcome(BaseModel):
    work_items: int = 0
    output_paths: List[str] = Field(default_factory=list)


class BaseStage:
    """Common plumbing for pipeline stages.

    A stage reads the registered outputs of the stages named in `reads`,
    writes only under its own workspace directory and returns the
    workspace-relative paths it produced.
    """

    name: str = ""
    reads: Tuple[str, ...] = ()
    config_keys: Tuple[str, ...] = ()

    def __init__(self, system: "PipelineSystem"):
        self.system = system
        self.config = system.config
        self.monitor = system.monitor
        self.manifest = system.manifest
        self.workspace = Path(self.config.workspace_dir)

    @property
    def predecessor(self) -> Optional[str]:
        position = STAGE_ORDER.index(self.name)
        return STAGE_ORDER[position - 1] if position > 0 else None

    @property
    def stage_dir(self) -> Path:
        return self.workspace / self.name

    def relative(self, path: Path) -> str:
        return path.relative_to(self.workspace).as_posix()

    def reset_outputs(self):
        """Start from an empty stage directory so stale artifacts never survive a re-run"""
        if self.stage_dir.exists():
            shutil.rmtree(self.stage_dir)
        self.stage_dir.mkdir(parents=True, exist_ok=True)

    # --- inputs ---

    def upstream_paths(self, stage: str, suffix: Optional[str] = None) -> List[Path]:
        record = self.manifest.get(stage)
        if record is None:
            raise PipelineError(f"Stage '{self.name}' needs outputs of '{stage}', which has no manifest record")
        paths = [self.workspace / p for p in record.output_paths]
        if suffix is not None:
            paths = [p for p in paths if p.name.endswith(suffix)]
        return sorted(paths)

    def upstream_file(self, stage: str, name: str) -> Path:
        for path in self.upstream_paths(stage):
            if path.name == name:
                return path
        raise PipelineError(f"Stage '{stage}' did not register {name}")

    def extra_input_files(self) -> List[Path]:
        return []

    def input_files(self) -> List[Path]:
        files: List[Path] = []
        for stage in self.reads:
            files.extend(self.upstream_paths(stage))
        files.extend(self.extra_input_files())
        return files

    def input_digest(self) -> str:
        """Content hash of upstream artifacts, the stage's config view and the tool version"""
        dump = self.config.model_dump(mode="json")
        payload: Dict[str, Any] = {
            "stage": self.name,
            "config": {key: dump[key] for key in self.config_keys},
            "tool_version": settings.PIPELINE_VERSION,
            "inputs": [],
        }
        for path in self.input_files():
            name = self.relative(path) if path.is_relative_to(self.workspace) else path.name
            payload["inputs"].append([name, digest_file(path)])
        return digest_text(canonical_json(payload))

    # --- reporting ---

    def warn(self, message: str):
        logger.warning(f"⚠️ [{self.name}] {message}")
        self.record_warning(message)

    def record_warning(self, message: str):
        """For callbacks from code that already logged the warning"""
        self.monitor.warn(self.name, message)

    def exclude(self, call_id: str, reason: str, detail: str = ""):
        self.monitor.exclude(self.name, call_id, reason, detail)

    # --- concurrency ---

    async def for_each_call(self, items: Sequence[T], func: Callable[[T], Awaitable[R]]) -> List[R]:
        """Run func over items, at most max_concurrent_calls at a time, results in input order"""
        semaphore = asyncio.Semaphore(self.config.max_concurrent_calls)

        async def _bounded(item: T) -> R:
            async with semaphore:
                return await func(item)

        return list(await asyncio.gather(*(_bounded(item) for item in items)))

    async def in_executor(self, func: Callable[..., R], *args) -> R:
        loop = asyncio.get_running_loop()
        return await loop.run_in_executor(None, func, *args)

    async def run(self) -> StageOutcome:
        raise NotImplementedError


def call_id_of(path: Path, suffix: str) -> str:
    return path.name[: -len(suffix)]
