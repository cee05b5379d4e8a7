# [file name]: core/stages/text_stages.py
import asyncio
import logging
from pathlib import Path
from typing import List, Optional

from core.anonymize import anonymize_text
from core.asr import merge_channels, transcribe
from core.audio import read_wav_file
from core.errors import AsrBackendError, AsrOutputError, RedactionError, TranscriptError
from core.stages.base_stage import BaseStage, StageOutcome, call_id_of
from models.dataset_models import RedactionReport
from models.transcript_models import CallTranscript, TranscriptSegment
from utils.helpers import atomic_write_text, canonical_json, read_jsonl, write_jsonl

logger = logging.getLogger(__name__)

TRANSCRIPT_SUFFIX = ".jsonl"


def write_transcript(path: Path, transcript: CallTranscript) -> Path:
    return write_jsonl(path, [s.model_dump() for s in transcript.segments])


def read_transcript(path: Path) -> CallTranscript:
    call_id = call_id_of(path, TRANSCRIPT_SUFFIX)
    return CallTranscript(call_id=call_id, segments=[TranscriptSegment(**row) for row in read_jsonl(path)])


class AsrStage(BaseStage):
    """Transcribe both channels of every trimmed call and merge them by time"""

    name = "asr"
    reads = ("ivr",)
    config_keys = ("asr",)

    def extra_input_files(self) -> List[Path]:
        fixtures = self.config.asr.fixtures
        return [Path(fixtures)] if self.config.asr.backend == "mock" and fixtures else []

    async def run(self) -> StageOutcome:
        inputs = self.upstream_paths("ivr", ".wav")
        settings = self.config.asr
        backend = self.system.asr_backend
        requests_gate = asyncio.Semaphore(self.config.max_concurrent_requests)
        logger.info(f"📝 Transcribing {len(inputs)} call(s) with the {backend.kind} backend")

        async def _one(path: Path) -> Optional[Path]:
            call_id = call_id_of(path, ".wav")
            call = await self.in_executor(read_wav_file, path, 0)
            try:
                agent, customer = await asyncio.gather(
                    transcribe(call.agent, "agent", backend, call_id, settings.max_attempts, semaphore=requests_gate),
                    transcribe(call.customer, "customer", backend, call_id, settings.max_attempts, semaphore=requests_gate),
                )
                transcript = merge_channels(agent, customer, call_id)
            except (AsrBackendError, AsrOutputError, TranscriptError) as e:
                self.exclude(call_id, "asr_error", str(e))
                return None
            if not transcript.segments:
                self.warn(f"{call_id}: empty transcript")
            return write_transcript(self.stage_dir / f"{call_id}{TRANSCRIPT_SUFFIX}", transcript)

        written = [p for p in await self.for_each_call(inputs, _one) if p is not None]
        return StageOutcome(work_items=len(inputs), output_paths=[self.relative(p) for p in written])


class CleanStage(BaseStage):
    """Mechanical transcript cleaning with a per-call report"""

    name = "clean"
    reads = ("asr",)
    config_keys = ("cleaning", "language")

    def extra_input_files(self) -> List[Path]:
        replacements = self.config.cleaning.replacements
        return [Path(replacements)] if replacements else []

    def _process(self, path: Path) -> List[Path]:
        transcript = read_transcript(path)
        cleaned, report = self.system.cleaner.clean(transcript)
        if report.overlap_count:
            logger.debug(f"{transcript.call_id}: {report.overlap_count} cross-speaker overlap(s)")
        out = write_transcript(self.stage_dir / path.name, cleaned)
        report_path = atomic_write_text(
            self.stage_dir / f"{transcript.call_id}.report.json",
            canonical_json(report.model_dump()) + "\n",
        )
        return [out, report_path]

    async def run(self) -> StageOutcome:
        inputs = self.upstream_paths("asr", TRANSCRIPT_SUFFIX)
        logger.info(f"🧹 Cleaning {len(inputs)} transcript(s)")

        async def _one(path: Path):
            return await self.in_executor(self._process, path)

        written = [p for pair in await self.for_each_call(inputs, _one) for p in pair]
        return StageOutcome(work_items=len(inputs), output_paths=[self.relative(p) for p in written])


class AnonymizeStage(BaseStage):
    """Mask PII in every segment with placeholder tokens; digests only, never originals"""

    name = "anonymize"
    reads = ("clean",)
    config_keys = ("pii_rules",)

    def extra_input_files(self) -> List[Path]:
        return [Path(self.config.pii_rules)] if self.config.pii_rules else []

    def _process(self, path: Path) -> List[Path]:
        transcript = read_transcript(path)
        report = RedactionReport()
        segments = []
        for segment in transcript.segments:
            text, segment_report = anonymize_text(segment.text, self.system.pii_rules)
            report = report.merge(segment_report)
            segments.append(segment.model_copy(update={"text": text}))

        masked = CallTranscript(call_id=transcript.call_id, segments=segments)
        out = write_transcript(self.stage_dir / path.name, masked)
        report_path = atomic_write_text(
            self.stage_dir / f"{transcript.call_id}.redaction.json",
            canonical_json(report.model_dump()) + "\n",
        )
        if report.counts:
            logger.debug(f"🔐 {transcript.call_id}: masked {report.counts}")
        return [out, report_path]

    async def run(self) -> StageOutcome:
        inputs = self.upstream_paths("clean", TRANSCRIPT_SUFFIX)
        logger.info(f"🔐 Anonymizing {len(inputs)} transcript(s)")

        async def _one(path: Path):
            try:
                return await self.in_executor(self._process, path)
            except RedactionError as e:
                self.exclude(call_id_of(path, TRANSCRIPT_SUFFIX), "redaction_error", str(e))
                return []

        written = [p for pair in await self.for_each_call(inputs, _one) for p in pair]
        return StageOutcome(work_items=len(inputs), output_paths=[self.relative(p) for p in written])
