from .extraction import (
    demand_id_for,
    extract_demand_utterances,
    extract_response_utterances,
    first_substantive_agent_index,
    response_id_for,
)
from .generator import GenerationResult, build_pairs, format_instruct
from .instruct_codec import decode_instruct_jsonl, encode_instruct_jsonl

__all__ = [
    "demand_id_for",
    "extract_demand_utterances",
    "extract_response_utterances",
    "first_substantive_agent_index",
    "response_id_for",
    "GenerationResult",
    "build_pairs",
    "format_instruct",
    "decode_instruct_jsonl",
    "encode_instruct_jsonl",
]
