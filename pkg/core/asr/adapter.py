# [file name]: core/asr/adapter.py
import asyncio
import json
import logging
import math
import numbers
from typing import List, Optional

import backoff

from core.asr.backends import AsrBackend
from core.errors import AsrBackendError, AsrOutputError, TranscriptError
from models.audio_models import AudioClip
from models.transcript_models import CallTranscript, Speaker, TranscriptSegment

logger = logging.getLogger(__name__)


def parse_external_asr_output(data: bytes, speaker: Speaker = "customer") -> List[TranscriptSegment]:
    """Parse a UTF-8 JSON array of {start, end, text} objects.

    Text is trimmed and empty entries dropped; output is sorted by start.
    Parse failures carry the byte offset, bad timestamps the entry index.
    """
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise AsrOutputError(f"Invalid UTF-8 at byte {e.start}", offset=e.start)
    try:
        entries = json.loads(text)
    except json.JSONDecodeError as e:
        offset = len(text[:e.pos].encode("utf-8"))
        raise AsrOutputError(f"Malformed ASR output at byte {offset}: {e.msg}", offset=offset)
    if not isinstance(entries, list):
        raise AsrOutputError("ASR output must be a JSON array", offset=0)

    segments = []
    for index, entry in enumerate(entries):
        if not isinstance(entry, dict) or not {"start", "end", "text"} <= set(entry):
            raise AsrOutputError(f"Entry {index} lacks start/end/text", index=index)
        start, end = entry["start"], entry["end"]
        if not all(isinstance(v, numbers.Real) and not isinstance(v, bool) for v in (start, end)):
            raise AsrOutputError(f"Entry {index} has non-numeric timestamps", index=index)
        if not (math.isfinite(start) and math.isfinite(end)):
            raise AsrOutputError(f"Entry {index} has a non-finite timestamp", index=index)
        if start < 0 or end < 0:
            raise AsrOutputError(f"Entry {index} has a negative timestamp", index=index)
        if end <= start:
            raise AsrOutputError(f"Entry {index} has end {end} <= start {start}", index=index)
        content = str(entry["text"]).strip()
        if not content:
            continue
        try:
            confidence = _confidence(entry.get("confidence"))
            segment = TranscriptSegment(
                start_s=float(start), end_s=float(end), text=content, speaker=speaker, confidence=confidence
            )
        except (TypeError, ValueError) as e:
            raise AsrOutputError(f"Entry {index} is invalid: {e}", index=index)
        segments.append(segment)
    return sorted(segments, key=lambda s: (s.start_s, s.end_s))


def _confidence(value) -> Optional[float]:
    """Clamped into [0, 1]; None stays None"""
    if value is None:
        return None
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"non-finite confidence {value}")
    return min(max(value, 0.0), 1.0)


def _fit_to_clip(segments: List[TranscriptSegment], duration_s: float) -> List[TranscriptSegment]:
    fitted = []
    for segment in segments:
        if segment.start_s >= duration_s:
            logger.debug(f"Dropping segment starting past clip end ({segment.start_s:.2f}s)")
            continue
        if segment.end_s > duration_s:
            segment = segment.model_copy(update={"end_s": duration_s})
        fitted.append(segment)
    return fitted


async def transcribe(
    clip: AudioClip,
    speaker: Speaker,
    backend: AsrBackend,
    call_id: Optional[str] = None,
    max_attempts: int = 3,
    backoff_base_s: float = 1.0,
    semaphore: Optional[asyncio.Semaphore] = None,
) -> List[TranscriptSegment]:
    """Transcribe one channel through the backend, retrying transient failures"""
    if clip.duration_s <= 0:
        raise TranscriptError("Cannot transcribe a zero-duration clip")

    alias = f"{call_id}/{speaker}" if call_id else None
    loop = asyncio.get_event_loop()

    @backoff.on_exception(
        backoff.expo,
        AsrBackendError,
        max_tries=max_attempts,
        factor=backoff_base_s,
        jitter=backoff.full_jitter,
        on_backoff=lambda d: logger.warning(f"⚠️ ASR attempt {d['tries']} failed for {alias}; retrying"),
    )
    async def _recognize() -> bytes:
        if semaphore is None:
            return await loop.run_in_executor(None, backend.recognize, clip, alias)
        async with semaphore:
            return await loop.run_in_executor(None, backend.recognize, clip, alias)

    raw = await _recognize()
    segments = parse_external_asr_output(raw, speaker=speaker)
    return _fit_to_clip(segments, clip.duration_s)


def merge_channels(
    agent_segments: List[TranscriptSegment],
    customer_segments: List[TranscriptSegment],
    call_id: str,
) -> CallTranscript:
    """Interleave both speakers by start time; customer first on ties, then by end"""
    for label, segments in (("agent", agent_segments), ("customer", customer_segments)):
        ordered = sorted(range(len(segments)), key=lambda i: (segments[i].start_s, segments[i].end_s))
        for prev, nxt in zip(ordered, ordered[1:]):
            if segments[nxt].start_s < segments[prev].end_s:
                raise TranscriptError(
                    f"{call_id}: {label} segments {prev} and {nxt} overlap "
                    f"({segments[prev].start_s}-{segments[prev].end_s} vs "
                    f"{segments[nxt].start_s}-{segments[nxt].end_s})"
                )

    stamped = [s.model_copy(update={"speaker": "agent"}) for s in agent_segments]
    stamped += [s.model_copy(update={"speaker": "customer"}) for s in customer_segments]
    return CallTranscript(call_id=call_id, segments=sorted(stamped, key=lambda s: s.sort_key()))
