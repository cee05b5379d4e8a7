# [file name]: models/audio_models.py
from typing import List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class AudioClip(BaseModel):
    """Single-channel float samples in [-1, 1]"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    samples: np.ndarray
    sample_rate_hz: int = Field(gt=0)
    channel_label: Literal["agent", "customer", "mono"] = "mono"

    @field_validator("samples", mode="before")
    @classmethod
    def _as_float_array(cls, value):
        arr = np.asarray(value, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if arr.size and (not np.all(np.isfinite(arr)) or np.max(np.abs(arr)) > 1.0):
            raise ValueError("samples must be finite and within [-1, 1]")
        return arr

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate_hz

    def with_samples(self, samples: np.ndarray, sample_rate_hz: int = None) -> "AudioClip":
        return AudioClip(
            samples=samples,
            sample_rate_hz=sample_rate_hz or self.sample_rate_hz,
            channel_label=self.channel_label,
        )


class StereoCall(BaseModel):
    call_id: str = Field(min_length=1)
    agent: AudioClip
    customer: AudioClip

    @model_validator(mode="after")
    def _shared_rate(self):
        if self.agent.sample_rate_hz != self.customer.sample_rate_hz:
            raise ValueError("agent and customer channels must share sample_rate_hz")
        return self

    @property
    def sample_rate_hz(self) -> int:
        return self.agent.sample_rate_hz

    @property
    def duration_s(self) -> float:
        return self.agent.duration_s


class FeatureWindow(BaseModel):
    index: int = Field(ge=0)
    start_s: float
    end_s: float
    # [log_rms, zcr_per_s, centroid_hz, flatness, band_0_300, band_300_1k, band_1k_3k, band_3k_nyq]
    features: List[float] = Field(min_length=8, max_length=8)


class ClusterModel(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    centroids: np.ndarray
    assignments: List[int]
    inertia: float = Field(ge=0.0)
    inertia_history: List[float] = Field(default_factory=list)
    iterations: int = 0

    @property
    def k(self) -> int:
        return int(self.centroids.shape[0])


class IvrDecision(BaseModel):
    call_id: str = ""
    boundary_window: Optional[int] = None
    boundary_s: Optional[float] = None
    ivr_cluster: int = 0
    trimmed: bool = False
    inertia: float = 0.0
    all_ivr: bool = False

    def to_record(self) -> dict:
        return {
            "call_id": self.call_id,
            "boundary_s": self.boundary_s,
            "trimmed": self.trimmed,
            "ivr_cluster": self.ivr_cluster,
            "inertia": self.inertia,
            "all_ivr": self.all_ivr,
        }
