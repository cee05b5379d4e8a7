# [file name]: core/ivr/features.py
import logging
from typing import List

import numpy as np

from core.errors import FeatureExtractionError
from models.audio_models import AudioClip, FeatureWindow

logger = logging.getLogger(__name__)

FEATURE_NAMES = [
    "log_rms_db",
    "zcr_per_s",
    "centroid_hz",
    "flatness",
    "band_0_300",
    "band_300_1k",
    "band_1k_3k",
    "band_3k_nyquist",
]
BAND_EDGES_HZ = (0.0, 300.0, 1000.0, 3000.0)
# Log energy floor for digital silence
LOG_RMS_FLOOR_DB = -100.0


def _window_features(frames: np.ndarray, sample_rate_hz: int) -> np.ndarray:
    """Compute the 8 acoustic features for a (n_windows, window_len) matrix"""
    n, win = frames.shape
    duration = win / sample_rate_hz

    rms = np.sqrt(np.mean(frames ** 2, axis=1))
    log_rms = np.where(rms > 0, 20.0 * np.log10(np.maximum(rms, 1e-300)), LOG_RMS_FLOOR_DB)
    log_rms = np.maximum(log_rms, LOG_RMS_FLOOR_DB)

    # strict sign changes only; exact zeros never count
    zcr = np.sum(frames[:, :-1] * frames[:, 1:] < 0, axis=1) / duration

    spectrum = np.abs(np.fft.rfft(frames * np.hanning(win), axis=1))
    power = spectrum ** 2
    freqs = np.fft.rfftfreq(win, d=1.0 / sample_rate_hz)

    mag_sum = spectrum.sum(axis=1)
    centroid = np.divide(spectrum @ freqs, mag_sum, out=np.zeros(n), where=mag_sum > 0)

    total = power.sum(axis=1)
    mean_power = total / power.shape[1]
    with np.errstate(divide="ignore"):
        geo_mean = np.exp(np.mean(np.log(power + 1e-30), axis=1))
    flatness = np.divide(geo_mean, mean_power, out=np.zeros(n), where=mean_power > 0)
    flatness = np.clip(flatness, 0.0, 1.0)

    edges = list(BAND_EDGES_HZ) + [np.inf]
    bands = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        mask = (freqs >= lo) & (freqs < hi) if np.isfinite(hi) else (freqs >= lo)
        bands.append(power[:, mask].sum(axis=1))
    bands = np.stack(bands, axis=1)
    ratios = np.divide(bands, total[:, None], out=np.zeros_like(bands), where=total[:, None] > 0)

    return np.column_stack([log_rms, zcr, centroid, flatness, ratios])


def extract_feature_windows(clip: AudioClip, window_s: float = 1.0, hop_s: float = 0.5) -> List[FeatureWindow]:
    """Slice a clip into fixed windows at stride hop_s and compute features.

    A trailing partial window is dropped. Silent windows get zero ZCR,
    centroid, flatness and band ratios, and the log-energy floor.
    """
    if window_s <= 0 or hop_s <= 0:
        raise FeatureExtractionError("window_s and hop_s must be positive")
    win = int(round(window_s * clip.sample_rate_hz))
    hop = int(round(hop_s * clip.sample_rate_hz))
    total = len(clip.samples)
    if win < 2 or total < win:
        raise FeatureExtractionError(
            f"Clip of {clip.duration_s:.3f}s is shorter than one {window_s}s window"
        )

    n_windows = (total - win) // hop + 1
    frames = np.lib.stride_tricks.sliding_window_view(clip.samples, win)[::hop][:n_windows]
    features = _window_features(np.asarray(frames, dtype=np.float64), clip.sample_rate_hz)

    windows = [
        FeatureWindow(
            index=i,
            start_s=i * hop / clip.sample_rate_hz,
            end_s=(i * hop + win) / clip.sample_rate_hz,
            features=features[i].tolist(),
        )
        for i in range(n_windows)
    ]
    logger.debug(f"Extracted {n_windows} feature windows ({window_s}s / {hop_s}s)")
    return windows


def feature_matrix(windows: List[FeatureWindow]) -> np.ndarray:
    return np.array([w.features for w in windows], dtype=np.float64)
