from .backends import AsrBackend, MockAsrBackend, ExternalCommandAsrBackend, HttpAsrBackend, clip_digest
from .adapter import transcribe, parse_external_asr_output, merge_channels

__all__ = [
    "AsrBackend",
    "MockAsrBackend",
    "ExternalCommandAsrBackend",
    "HttpAsrBackend",
    "clip_digest",
    "transcribe",
    "parse_external_asr_output",
    "merge_channels",
]
