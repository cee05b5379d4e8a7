import asyncio
import json
import logging
from pathlib import Path
from typing import List, Optional, Union

from pydantic import ValidationError

from config.constants import MANIFEST_FILE, STAGE_ORDER
from core.errors import PipelineError
from models.pipeline_models import StageRecord, WorkspaceManifest
from utils.helpers import atomic_write_text

logger = logging.getLogger(__name__)


class ManifestStore:
    """Single-writer registry of completed stages, rewritten atomically on each change"""

    def __init__(self, workspace_dir: Union[str, Path]):
        self.workspace_dir = Path(workspace_dir)
        self.path = self.workspace_dir / MANIFEST_FILE
        self._lock = asyncio.Lock()

    def load(self) -> WorkspaceManifest:
        if not self.path.exists():
            return WorkspaceManifest()
        try:
            return WorkspaceManifest.model_validate(json.loads(self.path.read_text(encoding="utf-8")))
        except (ValueError, ValidationError) as e:
            raise PipelineError(f"Corrupt manifest at {self.path}: {e}")

    def _write(self, manifest: WorkspaceManifest):
        manifest.stage_records.sort(
            key=lambda r: STAGE_ORDER.index(r.stage_name) if r.stage_name in STAGE_ORDER else len(STAGE_ORDER)
        )
        atomic_write_text(self.path, manifest.model_dump_json(indent=2) + "\n")

    def get(self, stage_name: str) -> Optional[StageRecord]:
        return self.load().get(stage_name)

    def completed_stages(self) -> List[str]:
        return [r.stage_name for r in self.load().stage_records if self.outputs_exist(r)]

    def outputs_exist(self, record: StageRecord) -> bool:
        return all((self.workspace_dir / p).exists() for p in record.output_paths)

    def is_current(self, stage_name: str, input_digest: str) -> bool:
        record = self.get(stage_name)
        return record is not None and record.input_digest == input_digest and self.outputs_exist(record)

    async def record(self, record: StageRecord):
        missing = [p for p in record.output_paths if not (self.workspace_dir / p).exists()]
        if missing:
            raise PipelineError(f"Stage '{record.stage_name}' lists missing outputs: {missing[:3]}")
        async with self._lock:
            manifest = self.load()
            records = [r for r in manifest.stage_records if r.stage_name != record.stage_name]
            records.append(record)
            self._write(WorkspaceManifest(stage_records=records))
        logger.debug(f"📝 Manifest updated for stage {record.stage_name}")

    async def remove(self, stage_name: str):
        async with self._lock:
            manifest = self.load()
            records = [r for r in manifest.stage_records if r.stage_name != stage_name]
            if len(records) != len(manifest.stage_records):
                self._write(WorkspaceManifest(stage_records=records))
