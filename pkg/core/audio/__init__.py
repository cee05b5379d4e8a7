from .wav_codec import decode_wav, encode_wav, read_wav_file, write_wav_file
from .processing import resample, noise_gate, rms_dbfs
from .denoiser import apply_external_denoiser

__all__ = [
    "decode_wav",
    "encode_wav",
    "read_wav_file",
    "write_wav_file",
    "resample",
    "noise_gate",
    "rms_dbfs",
    "apply_external_denoiser",
]
