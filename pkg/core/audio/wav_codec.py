# [file name]: core/audio/wav_codec.py
import io
import logging
import struct
from pathlib import Path
from typing import Union

import numpy as np
import soundfile as sf

from core.errors import AudioDecodeError
from models.audio_models import AudioClip, StereoCall
from utils.helpers import atomic_write_bytes

logger = logging.getLogger(__name__)

SUPPORTED_SUBTYPES = {"PCM_U8", "PCM_16", "PCM_24", "FLOAT"}
_INT32_SCALE = float(2 ** 31)


def _check_riff(data: bytes) -> None:
    """Validate the RIFF/WAVE container and that the data chunk is complete"""
    if not data:
        raise AudioDecodeError("Zero-length stream")
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise AudioDecodeError("Not a RIFF/WAVE container")

    offset = 12
    while offset + 8 <= len(data):
        chunk_id = data[offset:offset + 4]
        (chunk_size,) = struct.unpack("<I", data[offset + 4:offset + 8])
        body = offset + 8
        if chunk_id == b"data":
            if chunk_size == 0:
                raise AudioDecodeError("Zero-length data chunk")
            available = len(data) - body
            if available < chunk_size:
                raise AudioDecodeError(
                    f"Truncated data: chunk declares {chunk_size} bytes, {available} present"
                )
            return
        offset = body + chunk_size + (chunk_size & 1)
    raise AudioDecodeError("Truncated data: no data chunk found")


def decode_wav(
    data: bytes,
    call_id: str = "call",
    agent_channel: int = 0,
) -> Union[StereoCall, AudioClip]:
    """Decode a WAV byte stream to a StereoCall (two channels) or a mono AudioClip.

    Integer PCM is scaled by 2**(bits-1) so 16-bit 32767 decodes to 32767/32768.
    Channel `agent_channel` becomes the agent side, the other one the customer.
    """
    _check_riff(data)
    try:
        info = sf.info(io.BytesIO(data))
    except (RuntimeError, sf.LibsndfileError) as e:
        raise AudioDecodeError(f"Unreadable WAV header: {e}")

    if info.subtype not in SUPPORTED_SUBTYPES:
        raise AudioDecodeError(f"Unsupported codec: {info.subtype}")
    if info.channels not in (1, 2):
        raise AudioDecodeError(f"Unsupported channel count: {info.channels}")
    if info.frames == 0:
        raise AudioDecodeError("Zero-length stream")

    try:
        if info.subtype == "FLOAT":
            frames, rate = sf.read(io.BytesIO(data), dtype="float64", always_2d=True)
            frames = np.clip(frames, -1.0, 1.0)
        else:
            raw, rate = sf.read(io.BytesIO(data), dtype="int32", always_2d=True)
            frames = raw.astype(np.float64) / _INT32_SCALE
    except (RuntimeError, sf.LibsndfileError) as e:
        raise AudioDecodeError(f"Failed to decode samples: {e}")

    if info.channels == 1:
        return AudioClip(samples=frames[:, 0], sample_rate_hz=rate, channel_label="mono")

    customer_channel = 1 - agent_channel
    return StereoCall(
        call_id=call_id,
        agent=AudioClip(samples=frames[:, agent_channel], sample_rate_hz=rate, channel_label="agent"),
        customer=AudioClip(samples=frames[:, customer_channel], sample_rate_hz=rate, channel_label="customer"),
    )


def read_wav_file(path: Union[str, Path], agent_channel: int = 0) -> Union[StereoCall, AudioClip]:
    path = Path(path)
    return decode_wav(path.read_bytes(), call_id=path.stem, agent_channel=agent_channel)


def _to_pcm16(samples: np.ndarray) -> np.ndarray:
    return np.clip(np.round(np.asarray(samples) * 32768.0), -32768, 32767).astype(np.int16)


def encode_wav(audio: Union[StereoCall, AudioClip], agent_channel: int = 0) -> bytes:
    """Encode as canonical PCM16 WAV; a StereoCall keeps its channel mapping"""
    if isinstance(audio, StereoCall):
        columns = [None, None]
        columns[agent_channel] = _to_pcm16(audio.agent.samples)
        columns[1 - agent_channel] = _to_pcm16(audio.customer.samples)
        frames = np.stack(columns, axis=1)
        rate = audio.sample_rate_hz
    else:
        frames = _to_pcm16(audio.samples)
        rate = audio.sample_rate_hz

    buf = io.BytesIO()
    sf.write(buf, frames, rate, subtype="PCM_16", format="WAV")
    return buf.getvalue()


def write_wav_file(path: Union[str, Path], audio: Union[StereoCall, AudioClip], agent_channel: int = 0) -> Path:
    return atomic_write_bytes(path, encode_wav(audio, agent_channel=agent_channel))

