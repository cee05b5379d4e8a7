# [file name]: core/stages/audio_stages.py
import logging
from pathlib import Path
from typing import List, Optional

from core.audio import apply_external_denoiser, noise_gate, read_wav_file, resample, rms_dbfs, write_wav_file
from core.errors import AudioDecodeError, DenoiserError, FeatureExtractionError, IvrError
from core.ivr import detect_call_ivr, trim_ivr
from core.stages.base_stage import BaseStage, StageOutcome, call_id_of
from models.audio_models import AudioClip, IvrDecision, StereoCall
from utils.helpers import write_jsonl

logger = logging.getLogger(__name__)


class IngestStage(BaseStage):
    """Decode input recordings into canonical PCM16 stereo at the run sample rate.

    Workspace files always carry the agent on channel 0.
    """

    name = "ingest"
    config_keys = ("sample_rate_hz", "audio")

    def input_recordings(self) -> List[Path]:
        input_dir = Path(self.config.input_dir)
        return sorted(p for p in input_dir.iterdir() if p.is_file() and p.suffix.lower() == ".wav")

    def extra_input_files(self) -> List[Path]:
        return self.input_recordings()

    def _prepare_channel(self, clip: AudioClip) -> AudioClip:
        audio = self.config.audio
        clip = resample(clip, self.config.sample_rate_hz)
        if audio.denoiser_command:
            clip = apply_external_denoiser(clip, audio.denoiser_command, audio.denoiser_timeout_s, on_warning=self.record_warning)
        return noise_gate(clip, audio.gate_threshold_dbfs, audio.gate_frame_s)

    def _process(self, path: Path) -> Optional[Path]:
        call_id = path.stem
        try:
            decoded = read_wav_file(path, agent_channel=self.config.audio.agent_channel)
        except AudioDecodeError as e:
            self.exclude(call_id, "decode_error", str(e))
            return None
        if not isinstance(decoded, StereoCall):
            self.exclude(call_id, "mono_unsupported", "speaker attribution needs separated channels")
            return None

        try:
            call = StereoCall(
                call_id=call_id,
                agent=self._prepare_channel(decoded.agent),
                customer=self._prepare_channel(decoded.customer),
            )
        except DenoiserError as e:
            self.exclude(call_id, "denoiser_error", f"{e} {e.stderr}".strip())
            return None

        out = self.stage_dir / f"{call_id}.wav"
        write_wav_file(out, call, agent_channel=0)
        logger.debug(f"🎧 {call_id}: {call.duration_s:.2f}s at {call.sample_rate_hz} Hz")
        return out

    async def run(self) -> StageOutcome:
        recordings = self.input_recordings()
        logger.info(f"🔍 Ingesting {len(recordings)} recording(s) from {self.config.input_dir}")

        async def _one(path: Path):
            return await self.in_executor(self._process, path)

        written = [p for p in await self.for_each_call(recordings, _one) if p is not None]
        return StageOutcome(work_items=len(recordings), output_paths=[self.relative(p) for p in written])


class IvrStage(BaseStage):
    """Detect and trim the IVR head of each call's agent channel"""

    name = "ivr"
    reads = ("ingest",)
    config_keys = ("ivr", "audio")
    decisions_file = "decisions.jsonl"

    def _decide(self, call: StereoCall) -> IvrDecision:
        settings = self.config.ivr
        if not settings.enabled:
            return IvrDecision(call_id=call.call_id)
        try:
            return detect_call_ivr(call.agent, settings, call.call_id)
        except FeatureExtractionError as e:
            self.warn(f"{call.call_id}: {e}")
            return IvrDecision(call_id=call.call_id)

    def _process(self, path: Path):
        call_id = call_id_of(path, ".wav")
        call = read_wav_file(path, agent_channel=0)
        try:
            decision = self._decide(call)
        except IvrError as e:
            self.exclude(call_id, "ivr_error", str(e))
            return None, None

        if self.config.ivr.enabled and decision.boundary_window is None:
            # No transition and nobody on the customer side: the whole call is menu audio
            if rms_dbfs(call.customer.samples) < self.config.audio.gate_threshold_dbfs:
                decision = decision.model_copy(update={"all_ivr": True})
                self.exclude(call_id, "all_ivr")
                return None, decision

        trimmed = call
        if self.config.ivr.enabled:
            try:
                trimmed = trim_ivr(call, decision, self.config.ivr.hop_s, on_warning=self.record_warning)
            except IvrError as e:
                self.exclude(call_id, "ivr_error", str(e))
                return None, decision

        out = self.stage_dir / f"{call_id}.wav"
        write_wav_file(out, trimmed, agent_channel=0)
        return out, decision

    async def run(self) -> StageOutcome:
        inputs = self.upstream_paths("ingest", ".wav")
        logger.info(f"🔍 Detecting IVR on {len(inputs)} call(s)")

        async def _one(path: Path):
            return await self.in_executor(self._process, path)

        results = await self.for_each_call(inputs, _one)
        decisions = [d.to_record() for _, d in results if d is not None]
        written = [p for p, _ in results if p is not None]
        trimmed = sum(1 for d in decisions if d["trimmed"])
        logger.info(f"✂️ Trimmed IVR from {trimmed} of {len(inputs)} call(s)")

        decisions_path = write_jsonl(self.stage_dir / self.decisions_file, decisions)
        outputs = [self.relative(p) for p in written] + [self.relative(decisions_path)]
        return StageOutcome(work_items=len(inputs), output_paths=outputs)
