# [file name]: core/text/cleaning.py
import logging
import re
import unicodedata
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Set, Tuple, Union

from config.constants import DEFAULT_FILLERS
from core.text.numerals import lexicon_for, normalize_numbers
from models.pipeline_models import CleaningConfig
from models.transcript_models import (
    CallTranscript,
    CleaningReport,
    NumeralLexicon,
    SegmentCleaning,
    TranscriptSegment,
)
from utils.helpers import tokenize

logger = logging.getLogger(__name__)

TERMINAL_MARKS = (".", "!", "?", "…")
_TRAILING_SOFT_PUNCT = re.compile(r"[\s,;:]+$")
_AFTER_TERMINAL = re.compile(r"([.!?…]\s+)([^\W\d_])")


def _bare(token: str) -> str:
    """Casefolded token with surrounding punctuation removed"""
    start, end = 0, len(token)
    while start < end and unicodedata.category(token[start]).startswith("P"):
        start += 1
    while end > start and unicodedata.category(token[end - 1]).startswith("P"):
        end -= 1
    return token[start:end].casefold()


def collapse_repetitions(text: str, max_ngram: int = 3, min_repeats: int = 2) -> str:
    """Reduce consecutive repeats of any n-gram (n <= max_ngram) to one occurrence.

    Longest n first, leftmost first, repeated until nothing changes.
    """
    tokens = text.split()
    changed = True
    while changed:
        changed = False
        for n in range(max_ngram, 0, -1):
            i = 0
            while i + n * min_repeats <= len(tokens):
                block = [_bare(t) for t in tokens[i:i + n]]
                repeats = 1
                while [_bare(t) for t in tokens[i + repeats * n:i + (repeats + 1) * n]] == block:
                    repeats += 1
                if repeats >= min_repeats:
                    del tokens[i + n:i + repeats * n]
                    changed = True
                i += 1
    return " ".join(tokens)


def remove_fillers(text: str, filler_list: Iterable[str]) -> str:
    fillers: Set[str] = {f.casefold() for f in filler_list}
    kept = [t for t in text.split() if _bare(t) not in fillers or not _bare(t)]
    return " ".join(kept)


def filter_hallucination(
    segment: TranscriptSegment,
    repetition_ratio_max: float = 0.3,
    min_tokens: int = 5,
) -> bool:
    """True to keep. Drops long segments made of very few distinct tokens."""
    tokens = tokenize(segment.text)
    if len(tokens) < min_tokens:
        return True
    return len(set(tokens)) / len(tokens) >= repetition_ratio_max


def load_replacements(path: Optional[Union[str, Path]]) -> Dict[str, str]:
    """Read a `wrong<TAB>right` table; blank lines and # comments skipped"""
    if path is None:
        return {}
    table = {}
    with open(path, "r", encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0].strip():
                raise ValueError(f"{path}:{line_no}: expected 'wrong<TAB>right'")
            table[parts[0].strip()] = parts[1].strip()
    return table


def apply_replacements(text: str, table: Dict[str, str]) -> str:
    if not table:
        return text
    keys = sorted(table, key=len, reverse=True)
    pattern = re.compile(r"(?<!\w)(" + "|".join(re.escape(k) for k in keys) + r")(?!\w)", re.IGNORECASE)
    lookup = {k.casefold(): v for k, v in table.items()}
    return pattern.sub(lambda m: lookup[m.group(1).casefold()], text)


def _capitalize_first(text: str) -> str:
    for i, ch in enumerate(text):
        if ch.isalnum():
            return text[:i] + ch.upper() + text[i + 1:] if ch.isalpha() else text
    return text


def _close_sentence(text: str) -> str:
    stripped = text.rstrip()
    if stripped.endswith(TERMINAL_MARKS):
        return stripped
    return _TRAILING_SOFT_PUNCT.sub("", stripped) + "."


def restore_sentences(segments: List[TranscriptSegment], pause_gap_s: float = 1.0) -> List[TranscriptSegment]:
    """Rule-based punctuation: close a segment on speaker change, long pause or end.

    Capitalizes the first letter of a segment that opens a sentence and any
    letter following an internal terminal mark. Existing punctuation stays.
    """
    restored = []
    opens_sentence = True
    for i, segment in enumerate(segments):
        text = segment.text.strip()
        nxt = segments[i + 1] if i + 1 < len(segments) else None
        if nxt is None or nxt.speaker != segment.speaker or nxt.start_s - segment.end_s > pause_gap_s:
            text = _close_sentence(text)
        if opens_sentence:
            text = _capitalize_first(text)
        text = _AFTER_TERMINAL.sub(lambda m: m.group(1) + m.group(2).upper(), text)
        opens_sentence = text.endswith(TERMINAL_MARKS)
        restored.append(segment.model_copy(update={"text": text}))
    return restored


def count_cross_speaker_overlaps(segments: List[TranscriptSegment]) -> int:
    count = 0
    for i, first in enumerate(segments):
        for second in segments[i + 1:]:
            if second.start_s >= first.end_s:
                break
            if second.speaker != first.speaker:
                count += 1
    return count


class TranscriptCleaner:
    """Applies the cleaning operators to a transcript in a fixed order:
    hallucination filter, repetition collapse, filler removal, replacement
    table, number normalization, sentence restoration.
    """

    def __init__(
        self,
        settings: CleaningConfig,
        language: str = "pt",
        lexicon: Optional[NumeralLexicon] = None,
        replacements: Optional[Dict[str, str]] = None,
    ):
        self.settings = settings
        self.language = language
        self.lexicon = lexicon or lexicon_for(language)
        self.fillers = settings.fillers if settings.fillers is not None else DEFAULT_FILLERS.get(language, [])
        if replacements is None:
            replacements = load_replacements(settings.replacements)
        self.replacements = replacements

    def _clean_text(self, text: str) -> Tuple[str, List[str]]:
        applied = []
        steps = (
            ("collapse_repetitions", lambda t: collapse_repetitions(t, self.settings.max_ngram, self.settings.min_repeats)),
            ("remove_fillers", lambda t: remove_fillers(t, self.fillers)),
            ("apply_replacements", lambda t: apply_replacements(t, self.replacements)),
            ("normalize_numbers", lambda t: normalize_numbers(t, self.lexicon)),
        )
        for name, op in steps:
            updated = op(text)
            if updated != text:
                applied.append(name)
                text = updated
        return text, applied

    def clean(self, transcript: CallTranscript) -> Tuple[CallTranscript, CleaningReport]:
        entries: List[SegmentCleaning] = []
        kept: List[TranscriptSegment] = []
        kept_entries: List[SegmentCleaning] = []

        for ref, segment in enumerate(transcript.segments):
            if not filter_hallucination(segment, self.settings.repetition_ratio_max, self.settings.min_tokens):
                logger.debug(f"{transcript.call_id}: dropping hallucinated segment {ref}")
                entries.append(SegmentCleaning(segment_ref=ref, dropped=True, drop_reason="hallucination"))
                continue
            text, applied = self._clean_text(segment.text)
            if not text.strip() or not tokenize(text):
                entries.append(
                    SegmentCleaning(segment_ref=ref, operators_applied=applied, dropped=True, drop_reason="empty_after_clean")
                )
                continue
            entry = SegmentCleaning(segment_ref=ref, operators_applied=applied)
            entries.append(entry)
            kept.append(segment.model_copy(update={"text": text}))
            kept_entries.append(entry)

        restored = restore_sentences(kept, self.settings.pause_gap_s)
        for before, after, entry in zip(kept, restored, kept_entries):
            if before.text != after.text:
                entry.operators_applied.append("restore_sentences")

        report = CleaningReport(
            call_id=transcript.call_id,
            segments=entries,
            overlap_count=count_cross_speaker_overlaps(restored),
        )
        dropped = report.dropped_count
        if dropped:
            logger.info(f"🧹 {transcript.call_id}: dropped {dropped} of {len(transcript.segments)} segment(s)")
        return CallTranscript(call_id=transcript.call_id, segments=restored), report
