# [file name]: models/transcript_models.py
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

Speaker = Literal["customer", "agent"]

# customer sorts before agent on equal start times
SPEAKER_ORDER = {"customer": 0, "agent": 1}


class TranscriptSegment(BaseModel):
    start_s: float = Field(ge=0.0)
    end_s: float
    text: str
    speaker: Speaker
    confidence: Optional[float] = Field(default=None, ge=0.0, le=1.0)

    @field_validator("text")
    @classmethod
    def _non_empty(cls, value: str) -> str:
        if not value.strip():
            raise ValueError("segment text is empty")
        return value

    @model_validator(mode="after")
    def _ordered_bounds(self):
        if not self.start_s < self.end_s:
            raise ValueError(f"start_s ({self.start_s}) must be < end_s ({self.end_s})")
        return self

    def sort_key(self):
        return (self.start_s, SPEAKER_ORDER[self.speaker], self.end_s)


class CallTranscript(BaseModel):
    call_id: str
    segments: List[TranscriptSegment] = Field(default_factory=list)

    def by_speaker(self, speaker: Speaker) -> List[TranscriptSegment]:
        return [s for s in self.segments if s.speaker == speaker]


class SegmentCleaning(BaseModel):
    segment_ref: int
    operators_applied: List[str] = Field(default_factory=list)
    dropped: bool = False
    drop_reason: Optional[Literal["hallucination", "empty_after_clean"]] = None

    @model_validator(mode="after")
    def _reason_when_dropped(self):
        if self.dropped and self.drop_reason is None:
            raise ValueError("dropped segment needs a drop_reason")
        return self


class CleaningReport(BaseModel):
    call_id: str
    segments: List[SegmentCleaning] = Field(default_factory=list)
    overlap_count: int = 0

    @property
    def dropped_count(self) -> int:
        return sum(1 for s in self.segments if s.dropped)


class NumeralLexicon(BaseModel):
    language: str
    values: Dict[str, int]
    multipliers: Dict[str, int] = Field(default_factory=dict)
    connectives: List[str] = Field(default_factory=list)
    ambiguous_singletons: List[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def _disjoint_words(self):
        overlap = set(self.values) & set(self.multipliers)
        if overlap:
            raise ValueError(f"words listed as both value and multiplier: {sorted(overlap)}")
        return self

    @property
    def digit_words(self) -> Dict[str, int]:
        return {w: v for w, v in self.values.items() if 0 <= v <= 9}

    def is_numeral(self, word: str) -> bool:
        return word in self.values or word in self.multipliers
