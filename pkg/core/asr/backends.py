# [file name]: core/asr/backends.py
import json
import logging
import shlex
import subprocess
import tempfile
from pathlib import Path
from typing import Dict, List, Optional, Union

import requests

from core.audio.wav_codec import encode_wav
from core.errors import AsrBackendError
from models.audio_models import AudioClip
from utils.helpers import digest_bytes

logger = logging.getLogger(__name__)


def clip_digest(clip: AudioClip) -> str:
    """Content digest of the samples and rate; stable across re-runs of the same audio"""
    payload = clip.samples.astype("<f8").tobytes() + str(clip.sample_rate_hz).encode("ascii")
    return digest_bytes(payload)


class AsrBackend:
    """Contract: return the raw JSON segment array for one clip"""

    kind = "base"

    def recognize(self, clip: AudioClip, alias: Optional[str] = None) -> bytes:
        raise NotImplementedError


class MockAsrBackend(AsrBackend):
    """Serves fixture segments keyed by clip content digest, then by "call_id/speaker" alias"""

    kind = "mock"

    def __init__(self, fixtures: Optional[Dict[str, List[dict]]] = None):
        self.fixtures = fixtures or {}

    @classmethod
    def from_file(cls, path: Optional[Union[str, Path]]) -> "MockAsrBackend":
        if path is None:
            return cls({})
        with open(path, "r", encoding="utf-8") as f:
            return cls(json.load(f))

    def register(self, key: str, segments: List[dict]):
        self.fixtures[key] = segments

    def recognize(self, clip: AudioClip, alias: Optional[str] = None) -> bytes:
        digest = clip_digest(clip)
        if digest in self.fixtures:
            entries = self.fixtures[digest]
        elif alias is not None and alias in self.fixtures:
            entries = self.fixtures[alias]
        else:
            logger.warning(f"⚠️ No mock ASR fixture for {alias or digest[:12]}; returning no segments")
            entries = []
        return json.dumps(entries, ensure_ascii=False).encode("utf-8")


class ExternalCommandAsrBackend(AsrBackend):
    """Runs `<cmd> --audio {wav_path}` and reads the segment array from stdout"""

    kind = "external_command"

    def __init__(self, command: str, timeout_s: float = 300.0):
        self.command = command
        self.timeout_s = timeout_s

    def _args(self, wav_path: Path) -> List[str]:
        tokens = shlex.split(self.command)
        if any("{wav_path}" in t for t in tokens):
            return [t.replace("{wav_path}", str(wav_path)) for t in tokens]
        return tokens + ["--audio", str(wav_path)]

    def recognize(self, clip: AudioClip, alias: Optional[str] = None) -> bytes:
        with tempfile.TemporaryDirectory(prefix="asr_") as tmp:
            wav_path = Path(tmp) / "clip.wav"
            wav_path.write_bytes(encode_wav(clip))
            try:
                result = subprocess.run(self._args(wav_path), capture_output=True, timeout=self.timeout_s)
            except subprocess.TimeoutExpired:
                raise AsrBackendError(f"ASR command timed out after {self.timeout_s}s")
            except OSError as e:
                raise AsrBackendError(f"ASR command could not be started: {e}")
        if result.returncode != 0:
            stderr = result.stderr.decode("utf-8", "replace").strip()
            raise AsrBackendError(f"ASR command exited with status {result.returncode}: {stderr}")
        return result.stdout


class HttpAsrBackend(AsrBackend):
    """POSTs WAV bytes, expects the JSON segment array back"""

    kind = "http"

    def __init__(self, endpoint: str, timeout_s: float = 300.0, headers: Optional[Dict[str, str]] = None):
        self.endpoint = endpoint
        self.timeout_s = timeout_s
        self.headers = headers or {}

    def recognize(self, clip: AudioClip, alias: Optional[str] = None) -> bytes:
        headers = {"Content-Type": "audio/wav", **self.headers}
        try:
            response = requests.post(self.endpoint, data=encode_wav(clip), headers=headers, timeout=self.timeout_s)
        except requests.RequestException as e:
            raise AsrBackendError(f"ASR endpoint unreachable: {e}")
        if response.status_code != 200:
            raise AsrBackendError(f"ASR endpoint returned HTTP {response.status_code}")
        return response.content
