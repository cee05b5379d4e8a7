import json
import random

import pytest

from core.errors import InstructDecodeError, RecordInvariantError
from core.qa import decode_instruct_jsonl, encode_instruct_jsonl
from models.dataset_models import InstructMeta, InstructRecord

ALPHABET = "abcdefghijklmnopqrstuvwxyz áéíóúãõç?!.,\"'\\\t{}[]😀\u2028\u2029\u0085\x1c\r"


def random_text(rng, low=1, high=40):
    text = "".join(rng.choice(ALPHABET) for _ in range(rng.randint(low, high)))
    return text if text.strip() else text + "x"


def random_record(rng):
    calls = [f"call_{rng.randint(0, 999):03d}" for _ in range(rng.randint(0, 3))]
    return InstructRecord(
        instruction=random_text(rng),
        input=random_text(rng),
        output=random_text(rng),
        meta=InstructMeta(
            demand_id=f"call_{rng.randint(0, 999):03d}:d0",
            source_call_id="src",
            candidate_call_ids=calls,
            candidate_entry_ids=[f"{c}:r0" for c in calls],
            template_id=rng.choice(["ask", "solve", "rec"]),
            pipeline_version="0.1.0",
            validity=rng.choice(["valid", "invalid", "unchecked"]),
        ),
    )


def line(**overrides):
    payload = {
        "instruction": "Qual foi a solução?",
        "input": "Quero o boleto.",
        "output": "O boleto foi reenviado.",
        "meta": {"demand_id": "c1:d0", "source_call_id": "c1", "template_id": "ask", "pipeline_version": "1"},
    }
    payload.update(overrides)
    return json.dumps(payload, ensure_ascii=False)


def test_thousand_random_records_survive():
    rng = random.Random(5)
    records = [random_record(rng) for _ in range(1000)]
    data = encode_instruct_jsonl(records, top_n=3)
    assert data.count(b"\n") == 1000
    assert decode_instruct_jsonl(data, top_n=3) == records


def test_unicode_line_separators_inside_fields():
    record = InstructRecord.model_validate(json.loads(line(output="O boleto foi reenviado. \u0085")))
    data = encode_instruct_jsonl([record, record])
    assert data.count(b"\n") == 2
    assert decode_instruct_jsonl(data) == [record, record]


def test_encoding_is_utf8_with_fixed_keys():
    data = encode_instruct_jsonl([random_record(random.Random(1))])
    payload = json.loads(data.decode("utf-8"))
    assert list(payload) == ["instruction", "input", "output", "meta"]
    assert data.endswith(b"\n")


def test_empty_output_reported_with_line_number():
    data = "\n".join([line(), line(), line(output="")]).encode("utf-8")
    with pytest.raises(InstructDecodeError) as excinfo:
        decode_instruct_jsonl(data)
    assert [n for n, _ in excinfo.value.errors] == [3]
    assert "output" in excinfo.value.errors[0][1]


def test_every_bad_line_collected():
    extra = json.loads(line())
    extra["score"] = 1
    data = "\n".join([
        "{not json",
        line(),
        json.dumps(extra),
        "[1, 2]",
    ]).encode("utf-8")
    with pytest.raises(InstructDecodeError) as excinfo:
        decode_instruct_jsonl(data)
    assert [n for n, _ in excinfo.value.errors] == [1, 3, 4]


def test_candidate_count_above_top_n():
    meta = {
        "demand_id": "c1:d0",
        "source_call_id": "c1",
        "template_id": "ask",
        "pipeline_version": "1",
        "candidate_call_ids": ["a", "b", "c", "d"],
    }
    data = line(meta=meta).encode("utf-8")
    with pytest.raises(InstructDecodeError):
        decode_instruct_jsonl(data, top_n=3)
    assert len(decode_instruct_jsonl(data)) == 1


def test_encode_refuses_too_many_candidates():
    record = InstructRecord.model_validate(json.loads(line()))
    record.meta.candidate_call_ids = ["a", "b", "c", "d"]
    with pytest.raises(RecordInvariantError):
        encode_instruct_jsonl([record], top_n=3)


def test_invalid_utf8_names_line():
    data = line().encode("utf-8") + b"\n" + b'{"instruction": "\xff"}\n'
    with pytest.raises(InstructDecodeError) as excinfo:
        decode_instruct_jsonl(data)
    assert excinfo.value.errors[0][0] == 2


def test_blank_lines_skipped():
    data = ("\n" + line() + "\n\n   \n" + line() + "\n").encode("utf-8")
    assert len(decode_instruct_jsonl(data)) == 2


def test_empty_stream():
    assert decode_instruct_jsonl(b"") == []
    assert encode_instruct_jsonl([]) == b""
