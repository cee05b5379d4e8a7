# [file name]: core/qa/instruct_codec.py
import json
import logging
from typing import List, Optional, Sequence, Tuple

from pydantic import ValidationError

from core.errors import InstructDecodeError, RecordInvariantError
from models.dataset_models import InstructRecord

logger = logging.getLogger(__name__)

RECORD_KEYS = ("instruction", "input", "output", "meta")


def check_record(record: InstructRecord, top_n: Optional[int] = None):
    if top_n is not None and len(record.meta.candidate_call_ids) > top_n:
        raise RecordInvariantError(
            f"Record {record.meta.demand_id} lists {len(record.meta.candidate_call_ids)} candidates, max {top_n}"
        )


def encode_instruct_jsonl(records: Sequence[InstructRecord], top_n: Optional[int] = None) -> bytes:
    """One UTF-8 JSON object per line with keys instruction, input, output, meta"""
    lines = []
    for record in records:
        check_record(record, top_n)
        payload = record.model_dump()
        lines.append(json.dumps({key: payload[key] for key in RECORD_KEYS}, ensure_ascii=False))
    return "".join(line + "\n" for line in lines).encode("utf-8")


def decode_instruct_jsonl(data: bytes, top_n: Optional[int] = None) -> List[InstructRecord]:
    """Decode every line, collecting (line number, message) for each bad one.

    Raises InstructDecodeError listing all failures; nothing is returned
    for a partially valid stream.
    """
    records: List[InstructRecord] = []
    errors: List[Tuple[int, str]] = []
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise InstructDecodeError([(text_line_of(data, e.start), f"invalid UTF-8: {e.reason}")])

    for line_no, line in enumerate(text.split("\n"), start=1):
        if not line.strip():
            continue
        try:
            payload = json.loads(line)
        except json.JSONDecodeError as e:
            errors.append((line_no, f"invalid JSON: {e.msg}"))
            continue
        if not isinstance(payload, dict) or set(payload) != set(RECORD_KEYS):
            keys = sorted(payload) if isinstance(payload, dict) else type(payload).__name__
            errors.append((line_no, f"expected keys {list(RECORD_KEYS)}, got {keys}"))
            continue
        try:
            record = InstructRecord.model_validate(payload)
            check_record(record, top_n)
        except ValidationError as e:
            first = e.errors()[0]
            field = ".".join(str(p) for p in first["loc"])
            errors.append((line_no, f"{field}: {first['msg']}"))
            continue
        except RecordInvariantError as e:
            errors.append((line_no, str(e)))
            continue
        records.append(record)

    if errors:
        raise InstructDecodeError(errors)
    return records


def text_line_of(data: bytes, offset: int) -> int:
    return data[:offset].count(b"\n") + 1
