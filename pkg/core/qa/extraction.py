# [file name]: core/qa/extraction.py
import logging
from typing import Optional

from core.errors import ExtractionError
from models.transcript_models import CallTranscript
from utils.helpers import tokenize

logger = logging.getLogger(__name__)


def demand_id_for(call_id: str) -> str:
    return f"{call_id}:d0"


def response_id_for(call_id: str) -> str:
    return f"{call_id}:r0"


def first_substantive_agent_index(transcript: CallTranscript, substantive_tokens: int = 8) -> Optional[int]:
    """Index of the first agent segment longer than substantive_tokens that
    comes after some customer speech; agent greetings before the customer
    has spoken never close the demand window."""
    customer_seen = False
    for index, segment in enumerate(transcript.segments):
        if segment.speaker == "customer":
            customer_seen = True
        elif customer_seen and len(tokenize(segment.text)) > substantive_tokens:
            return index
    return None


def extract_demand_utterances(transcript: CallTranscript, substantive_tokens: int = 8) -> str:
    customer = transcript.by_speaker("customer")
    if not customer:
        raise ExtractionError(transcript.call_id, "no_customer_speech")

    boundary = first_substantive_agent_index(transcript, substantive_tokens)
    if boundary is None:
        window = customer
    else:
        window = [s for s in transcript.segments[:boundary] if s.speaker == "customer"]
    return " ".join(s.text.strip() for s in window)


def extract_response_utterances(transcript: CallTranscript, substantive_tokens: int = 8) -> Optional[str]:
    """Agent speech from the first substantive agent segment on, or None"""
    boundary = first_substantive_agent_index(transcript, substantive_tokens)
    if boundary is None:
        logger.info(f"ℹ️ {transcript.call_id}: no substantive agent response")
        return None
    agent = [s for s in transcript.segments[boundary:] if s.speaker == "agent"]
    return " ".join(s.text.strip() for s in agent)
