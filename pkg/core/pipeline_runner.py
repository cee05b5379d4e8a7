# [file name]: core/pipeline_runner.py
import logging
from datetime import datetime, timezone
from typing import TYPE_CHECKING, List, Sequence

from config.constants import RUN_REPORT_FILE, STAGE_ORDER
from config.settings import settings
from core.errors import PipelineError, ReleaseGateError, StageDependencyError, StageFailedError
from core.stages import STAGE_CLASSES, BaseStage
from models.pipeline_models import RunReport, StageRecord, StageSummary
from utils.helpers import atomic_write_text
from utils.logger import StageTimer

if TYPE_CHECKING:
    from core.system_initializer import PipelineSystem

logger = logging.getLogger(__name__)


class PipelineRunner:
    """Runs stages in canonical order against one workspace"""

    def __init__(self, system: "PipelineSystem"):
        self.system = system
        self.manifest = system.manifest
        self.monitor = system.monitor
        self.timer = StageTimer()

    def order(self, stages: Sequence[str]) -> List[str]:
        unknown = sorted(set(stages) - set(STAGE_ORDER))
        if unknown:
            raise PipelineError(f"Unknown stage(s): {', '.join(unknown)}")
        return [name for name in STAGE_ORDER if name in set(stages)]

    def check_dependencies(self, stages: List[str]):
        """Each stage's predecessor must run earlier in this request or be complete already"""
        completed = set(self.manifest.completed_stages())
        for position, name in enumerate(stages):
            index = STAGE_ORDER.index(name)
            if index == 0:
                continue
            predecessor = STAGE_ORDER[index - 1]
            if predecessor not in stages[:position] and predecessor not in completed:
                raise StageDependencyError(name, predecessor)

    async def _run_stage(self, stage: BaseStage, resume: bool) -> StageSummary:
        name = stage.name
        self.monitor.begin_stage(name)
        self.timer.start(name)

        digest = stage.input_digest()
        if resume and self.manifest.is_current(name, digest):
            logger.info(f"⏭️ Stage {name} is up to date, skipping")
            return StageSummary(stage=name, status="skipped", duration_s=self.timer.stop(name))

        logger.info(f"🚀 Running stage {name}")
        await self.manifest.remove(name)
        stage.reset_outputs()
        outcome = await stage.run()
        await self.manifest.record(
            StageRecord(
                stage_name=name,
                input_digest=digest,
                output_paths=outcome.output_paths,
                completed_at=datetime.now(timezone.utc).isoformat(),
                tool_version=settings.PIPELINE_VERSION,
                work_items=outcome.work_items,
            )
        )
        return StageSummary(
            stage=name,
            status="completed",
            work_items=outcome.work_items,
            duration_s=self.timer.stop(name),
            warnings=self.monitor.stage_warnings(name),
            exclusions=self.monitor.stage_exclusions(name),
        )

    async def run_stages(self, stages: Sequence[str], resume: bool = False) -> RunReport:
        """Run the requested stages; the first failure stops everything downstream.

        Raises StageDependencyError before any work when a prerequisite is missing.
        """
        ordered = self.order(stages)
        self.check_dependencies(ordered)

        report = RunReport(tool_version=settings.PIPELINE_VERSION)
        failed = False
        for name in ordered:
            if failed:
                report.stages.append(StageSummary(stage=name, status="not_run"))
                continue
            stage = STAGE_CLASSES[name](self.system)
            try:
                report.stages.append(await self._run_stage(stage, resume))
            except Exception as e:
                failed = True
                error = e if isinstance(e, PipelineError) else StageFailedError(name, e)
                exit_code = e.exit_code if isinstance(e, ReleaseGateError) else 1
                self.monitor.log_error(name, type(e).__name__, str(e))
                await self.manifest.remove(name)
                report.exit_code = exit_code
                report.stages.append(
                    StageSummary(
                        stage=name,
                        status="failed",
                        duration_s=self.timer.stop(name),
                        warnings=self.monitor.stage_warnings(name),
                        exclusions=self.monitor.stage_exclusions(name),
                        error=str(error),
                    )
                )

        atomic_write_text(self.system.workspace_dir / RUN_REPORT_FILE, report.model_dump_json(indent=2) + "\n")
        if report.exit_code == 0:
            logger.info(f"✅ Run finished: {len(ordered)} stage(s)")
        else:
            logger.error(f"❌ Run stopped with exit code {report.exit_code}")
        return report
