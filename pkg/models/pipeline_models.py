# [file name]: models/pipeline_models.py
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class AudioConfig(_Section):
    agent_channel: Literal[0, 1] = 0
    gate_threshold_dbfs: float = Field(default=-40.0, le=0.0)
    gate_frame_s: float = Field(default=0.05, gt=0.0)
    denoiser_command: Optional[str] = None
    denoiser_timeout_s: float = Field(default=120.0, gt=0.0)

    @model_validator(mode="after")
    def _check_denoiser(self):
        if self.denoiser_command is not None:
            if "{in}" not in self.denoiser_command or "{out}" not in self.denoiser_command:
                raise ValueError("denoiser_command must contain {in} and {out} placeholders")
        return self


class IvrConfig(_Section):
    enabled: bool = True
    window_s: float = Field(default=1.0, gt=0.0)
    hop_s: float = Field(default=0.5, gt=0.0)
    k: int = Field(default=2, ge=2)
    consec_m: int = Field(default=5, ge=1)
    head_windows: int = Field(default=10, ge=1)
    seed: int = 0
    max_iter: int = Field(default=100, ge=1)
    tol: float = Field(default=1e-6, ge=0.0)

    @model_validator(mode="after")
    def _check_hop(self):
        if self.hop_s > self.window_s:
            raise ValueError("hop_s must not exceed window_s")
        return self


class AsrConfig(_Section):
    backend: Literal["mock", "external_command", "http"] = "mock"
    command: Optional[str] = None
    endpoint: Optional[str] = None
    fixtures: Optional[Path] = None
    timeout_s: float = Field(default=300.0, gt=0.0)
    max_attempts: int = Field(default=3, ge=1)


class LlmConfig(_Section):
    backend: Literal["mock", "http", "openai"] = "mock"
    endpoint: Optional[str] = None
    model: Optional[str] = None
    temperature: float = Field(default=0.0, ge=0.0)
    timeout_s: float = Field(default=60.0, gt=0.0)
    max_attempts: int = Field(default=4, ge=1)
    backoff_base_s: float = Field(default=1.0, ge=0.0)
    backoff_max_s: float = Field(default=30.0, ge=0.0)
    prompt_dir: Optional[Path] = None
    demand_template: str = "rewrite_demand.v2"
    refine_template: str = "refine_response.v2"
    synthesize_template: str = "synthesize_answer.v2"
    validity_template: str = "check_validity.v2"


class EmbedConfig(_Section):
    backend: Literal["mock", "http", "openai"] = "mock"
    endpoint: Optional[str] = None
    model: str = "text-embedding-ada-002"
    dim: int = Field(default=1536, ge=1)
    seed: int = 0


class SearchConfig(_Section):
    backend: Literal["local", "http"] = "local"
    endpoint: Optional[str] = None
    exclude_same_call: bool = False


class CleaningConfig(_Section):
    max_ngram: int = Field(default=3, ge=1)
    min_repeats: int = Field(default=2, ge=2)
    repetition_ratio_max: float = Field(default=0.3, gt=0.0, le=1.0)
    min_tokens: int = Field(default=5, ge=1)
    pause_gap_s: float = Field(default=1.0, ge=0.0)
    fillers: Optional[List[str]] = None
    replacements: Optional[Path] = None


class GenerationConfig(_Section):
    substantive_tokens: int = Field(default=8, ge=0)
    seed: int = 0


class ValidationConfig(_Section):
    min_output_tokens: int = Field(default=3, ge=0)
    sample_size: int = Field(default=25, ge=0)
    coherence_tolerance: float = Field(default=0.0, ge=0.0, le=1.0)
    drop_flagged: bool = False
    seed: int = 0


# sections whose seed defaults to the top-level seed
SEEDED_SECTIONS = ("ivr", "embed", "generation", "validation")


class PipelineConfig(_Section):
    """Validated run configuration; every section rejects unknown keys"""

    input_dir: Path
    workspace_dir: Path
    sample_rate_hz: int = Field(default=16000, gt=0)
    top_n: int = Field(default=3, ge=1)
    redundancy_threshold: float = Field(default=0.95, ge=0.0, le=1.0)
    pii_rules: Optional[Path] = None
    instruct_templates: Optional[Path] = None
    max_concurrent_calls: int = Field(default=4, ge=1)
    max_concurrent_requests: int = Field(default=8, ge=1)
    language: Literal["pt", "en"] = "pt"
    seed: int = 0

    audio: AudioConfig = Field(default_factory=AudioConfig)
    ivr: IvrConfig = Field(default_factory=IvrConfig)
    asr: AsrConfig = Field(default_factory=AsrConfig)
    llm: LlmConfig = Field(default_factory=LlmConfig)
    embed: EmbedConfig = Field(default_factory=EmbedConfig)
    search: SearchConfig = Field(default_factory=SearchConfig)
    cleaning: CleaningConfig = Field(default_factory=CleaningConfig)
    generation: GenerationConfig = Field(default_factory=GenerationConfig)
    validation: ValidationConfig = Field(default_factory=ValidationConfig)

    @model_validator(mode="before")
    @classmethod
    def _default_section_seeds(cls, data: Any) -> Any:
        """The top-level seed fills every section seed not set explicitly"""
        if not isinstance(data, dict) or type(data.get("seed")) is not int:
            return data
        data = dict(data)
        for name in SEEDED_SECTIONS:
            section = data.get(name)
            if section is None:
                data[name] = {"seed": data["seed"]}
            elif isinstance(section, dict):
                data[name] = {"seed": data["seed"], **section}
        return data


class StageRecord(BaseModel):
    stage_name: str
    input_digest: str
    output_paths: List[str] = Field(default_factory=list)
    completed_at: str
    tool_version: str
    work_items: int = 0


class WorkspaceManifest(BaseModel):
    stage_records: List[StageRecord] = Field(default_factory=list)

    @model_validator(mode="after")
    def _unique_names(self):
        names = [r.stage_name for r in self.stage_records]
        if len(names) != len(set(names)):
            raise ValueError("stage names in manifest must be unique")
        return self

    def get(self, stage_name: str) -> Optional[StageRecord]:
        for record in self.stage_records:
            if record.stage_name == stage_name:
                return record
        return None


class StageSummary(BaseModel):
    stage: str
    status: Literal["completed", "skipped", "failed", "not_run"]
    work_items: int = 0
    duration_s: float = 0.0
    warnings: List[str] = Field(default_factory=list)
    exclusions: List[Dict[str, str]] = Field(default_factory=list)
    error: Optional[str] = None


class RunReport(BaseModel):
    stages: List[StageSummary] = Field(default_factory=list)
    exit_code: int = 0
    tool_version: str = ""

    def summary(self, stage: str) -> Optional[StageSummary]:
        for item in self.stages:
            if item.stage == stage:
                return item
        return None
