# [file name]: models/dataset_models.py
import math
import re
from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, Field, PrivateAttr, field_validator, model_validator

PiiCategory = Literal["NAME", "ACCOUNT_ID", "PHONE", "EMAIL", "DOC_ID", "ADDRESS"]
Persona = Literal["customer", "agent"]
Validity = Literal["valid", "invalid", "unchecked"]


# --- anonymization ---

class PiiRule(BaseModel):
    category: PiiCategory
    kind: Literal["pattern", "dict"]
    payload: str
    priority: int = 0
    words: List[str] = Field(default_factory=list)

    _regex: Optional[re.Pattern] = PrivateAttr(default=None)

    @property
    def regex(self) -> re.Pattern:
        if self._regex is None:
            if self.kind == "pattern":
                self._regex = re.compile(self.payload)
            else:
                # Longest alternatives first so "Ana Maria" wins over "Ana"
                alternatives = sorted({w for w in self.words if w}, key=len, reverse=True)
                body = "|".join(re.escape(w) for w in alternatives) or r"(?!x)x"
                self._regex = re.compile(rf"(?<![\w<])(?:{body})(?![\w>])", re.IGNORECASE)
        return self._regex


class PiiSpan(BaseModel):
    start: int = Field(ge=0)
    end: int
    category: PiiCategory
    original_digest: str
    priority: int = 0

    @model_validator(mode="after")
    def _ordered(self):
        if self.end <= self.start:
            raise ValueError("span end must be greater than start")
        return self


class RedactionReport(BaseModel):
    counts: Dict[str, int] = Field(default_factory=dict)
    digests: List[Dict[str, str]] = Field(default_factory=list)

    def merge(self, other: "RedactionReport") -> "RedactionReport":
        counts = dict(self.counts)
        for category, n in other.counts.items():
            counts[category] = counts.get(category, 0) + n
        return RedactionReport(counts=counts, digests=self.digests + other.digests)


class LeakViolation(BaseModel):
    record_index: int
    field: Literal["instruction", "input", "output"]
    category: PiiCategory


# --- llm gateway ---

class PromptTemplate(BaseModel):
    template_id: str
    task: str
    version: str
    system_text: str = ""
    user_text: str
    few_shot_examples: List[Tuple[str, str]] = Field(default_factory=list)
    mock_rule: str = "echo"
    placeholders: List[str] = Field(default_factory=list)


class EmbeddingVector(BaseModel):
    values: List[float]
    model_tag: str = "mock"

    @field_validator("values")
    @classmethod
    def _finite(cls, values: List[float]) -> List[float]:
        if not all(math.isfinite(v) for v in values):
            raise ValueError("embedding values must be finite")
        return values

    @property
    def dim(self) -> int:
        return len(self.values)


class ChatExchange(BaseModel):
    request_id: str
    template_id: str
    template_version: str
    rendered_messages: List[Dict[str, str]]
    text: str = ""
    latency_ms: float = 0.0
    attempt_count: int = 0
    error: Optional[str] = None


# --- vector store ---

class VectorEntry(BaseModel):
    entry_id: str
    text: str
    persona: Persona
    call_id: str
    embedding: EmbeddingVector


class SearchHit(BaseModel):
    entry_id: str
    score: float
    rank: int = Field(ge=1)


# --- qa generation ---

class Demand(BaseModel):
    demand_id: str
    call_id: str
    raw_utterances: str
    rewritten: str = ""
    validity: Validity = "unchecked"
    validity_reason: str = ""
    embedding: Optional[List[float]] = None

    @model_validator(mode="after")
    def _rewritten_when_usable(self):
        if self.validity == "valid" and not self.rewritten.strip():
            raise ValueError("rewritten demand must be non-empty unless flagged invalid")
        return self


class AgentResponse(BaseModel):
    response_id: str
    call_id: str
    text: str


class CandidateRef(BaseModel):
    entry_id: str
    call_id: str
    score: float


class QaPair(BaseModel):
    demand_id: str
    call_id: str
    question: str
    answer: str
    validity: Validity = "unchecked"
    candidate_refs: List[CandidateRef] = Field(default_factory=list)

    @model_validator(mode="after")
    def _scores_non_increasing(self):
        scores = [c.score for c in self.candidate_refs]
        if any(a < b for a, b in zip(scores, scores[1:])):
            raise ValueError("candidate scores must be non-increasing")
        return self


class InstructMeta(BaseModel):
    demand_id: str
    source_call_id: str
    candidate_call_ids: List[str] = Field(default_factory=list)
    template_id: str
    pipeline_version: str
    validity: Validity = "unchecked"
    candidate_entry_ids: List[str] = Field(default_factory=list)


class InstructRecord(BaseModel):
    instruction: str
    input: str
    output: str
    meta: InstructMeta

    @field_validator("instruction", "input", "output")
    @classmethod
    def _non_empty(cls, value: str, info) -> str:
        if not value.strip():
            raise ValueError(f"{info.field_name} is empty")
        return value


# --- validation ---

class CoherenceResult(BaseModel):
    record_index: int
    passed: bool
    reasons: List[str] = Field(default_factory=list)


class RedundantPair(BaseModel):
    first: int
    second: int
    similarity: float


class Completeness(BaseModel):
    demands_in: int = 0
    pairs_out: int = 0
    skipped_with_reason: Dict[str, int] = Field(default_factory=dict)

    @property
    def skipped(self) -> int:
        return sum(self.skipped_with_reason.values())

    @property
    def closed(self) -> bool:
        return self.pairs_out + self.skipped == self.demands_in


class ValidationReport(BaseModel):
    total_records: int = 0
    coherent: int = 0
    coherence_failures: List[CoherenceResult] = Field(default_factory=list)
    flagged_redundant: List[RedundantPair] = Field(default_factory=list)
    completeness: Completeness = Field(default_factory=Completeness)
    accounting_closed: bool = True
    leak_violations: int = 0
    leak_details: List[LeakViolation] = Field(default_factory=list)
    invalid_demand_count: int = 0
    invalid_demand_ratio: float = 0.0
    sample_path: Optional[str] = None
