# [file name]: core/audio/denoiser.py
import logging
import shlex
import subprocess
import tempfile
from pathlib import Path
from typing import Callable, Optional

from core.audio.processing import resample
from core.audio.wav_codec import decode_wav, encode_wav
from core.errors import AudioDecodeError, DenoiserError
from models.audio_models import AudioClip, StereoCall

logger = logging.getLogger(__name__)


def build_denoiser_args(command: str, in_path: Path, out_path: Path):
    if "{in}" not in command or "{out}" not in command:
        raise DenoiserError("Denoiser command needs {in} and {out} placeholders")
    return [
        token.replace("{in}", str(in_path)).replace("{out}", str(out_path))
        for token in shlex.split(command)
    ]


def apply_external_denoiser(
    clip: AudioClip,
    command: str,
    timeout_s: float = 120.0,
    on_warning: Optional[Callable[[str], None]] = None,
) -> AudioClip:
    """Round-trip a clip through an external denoiser subprocess.

    The clip is written as PCM16 WAV to `{in}`; the tool must write its result
    to `{out}` and exit 0. A result whose duration differs from the input by
    more than 1% is returned anyway, with a warning.
    """
    with tempfile.TemporaryDirectory(prefix="denoise_") as tmp:
        in_path = Path(tmp) / "in.wav"
        out_path = Path(tmp) / "out.wav"
        in_path.write_bytes(encode_wav(clip))
        args = build_denoiser_args(command, in_path, out_path)

        try:
            result = subprocess.run(args, capture_output=True, timeout=timeout_s)
        except subprocess.TimeoutExpired as e:
            raise DenoiserError(f"Denoiser timed out after {timeout_s}s", (e.stderr or b"").decode("utf-8", "replace"))
        except OSError as e:
            raise DenoiserError(f"Denoiser could not be started: {e}")

        stderr = result.stderr.decode("utf-8", "replace")
        if result.returncode != 0:
            logger.error(f"❌ Denoiser exited with status {result.returncode}")
            raise DenoiserError(f"Denoiser exited with status {result.returncode}", stderr)
        if not out_path.exists():
            raise DenoiserError("Denoiser produced no output file", stderr)

        try:
            decoded = decode_wav(out_path.read_bytes())
        except AudioDecodeError as e:
            raise DenoiserError(f"Denoiser output unreadable: {e}", stderr)

    if isinstance(decoded, StereoCall):
        decoded = decoded.agent
    denoised = AudioClip(
        samples=decoded.samples,
        sample_rate_hz=decoded.sample_rate_hz,
        channel_label=clip.channel_label,
    )
    if denoised.sample_rate_hz != clip.sample_rate_hz:
        denoised = resample(denoised, clip.sample_rate_hz)

    if clip.duration_s > 0 and abs(denoised.duration_s - clip.duration_s) > 0.01 * clip.duration_s:
        message = (
            f"Denoiser changed duration of {clip.channel_label} channel: "
            f"{clip.duration_s:.3f}s -> {denoised.duration_s:.3f}s"
        )
        logger.warning(f"⚠️ {message}")
        if on_warning is not None:
            on_warning(message)
    return denoised
