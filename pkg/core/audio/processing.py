# [file name]: core/audio/processing.py
import logging

import numpy as np

from models.audio_models import AudioClip

logger = logging.getLogger(__name__)


def rms(samples: np.ndarray) -> float:
    if len(samples) == 0:
        return 0.0
    return float(np.sqrt(np.mean(np.square(samples, dtype=np.float64))))


def rms_dbfs(samples: np.ndarray) -> float:
    """RMS level in dBFS; silence is -inf"""
    value = rms(samples)
    return 20.0 * np.log10(value) if value > 0 else float("-inf")


def resample(clip: AudioClip, target_rate_hz: int) -> AudioClip:
    """Linear-interpolation resampler; identity (copy) at equal rates"""
    if target_rate_hz <= 0:
        raise ValueError("target_rate_hz must be positive")
    if target_rate_hz == clip.sample_rate_hz:
        return clip.with_samples(clip.samples.copy())

    n_in = len(clip.samples)
    n_out = int(round(n_in * target_rate_hz / clip.sample_rate_hz))
    t_in = np.arange(n_in) / clip.sample_rate_hz
    t_out = np.arange(n_out) / target_rate_hz
    samples = np.interp(t_out, t_in, clip.samples) if n_in else np.zeros(0)
    logger.debug(f"Resampled {n_in} samples at {clip.sample_rate_hz} Hz to {n_out} at {target_rate_hz} Hz")
    return clip.with_samples(samples, sample_rate_hz=target_rate_hz)


def noise_gate(clip: AudioClip, threshold_dbfs: float = -40.0, frame_s: float = 0.05) -> AudioClip:
    """Zero every frame whose RMS falls below the threshold; length is unchanged"""
    if threshold_dbfs > 0:
        raise ValueError("threshold_dbfs must be <= 0")
    if frame_s <= 0:
        raise ValueError("frame_s must be positive")

    samples = clip.samples.copy()
    frame_len = max(1, int(round(frame_s * clip.sample_rate_hz)))
    threshold_rms = 10.0 ** (threshold_dbfs / 20.0)
    gated = 0
    for start in range(0, len(samples), frame_len):
        frame = samples[start:start + frame_len]
        if rms(frame) < threshold_rms:
            if np.any(frame):
                gated += 1
            samples[start:start + frame_len] = 0.0
    if gated:
        logger.debug(f"Noise gate zeroed {gated} frame(s) below {threshold_dbfs} dBFS")
    return clip.with_samples(samples)
