import json

import numpy as np
import pytest

from core.errors import PipelineError
from core.validation import check_coherence, check_redundancy, compile_report, count_skips, curate, review_sample
from models.dataset_models import InstructMeta, InstructRecord, LeakViolation


def record(i=0, instruction="Qual foi a solução?", input_text="Quero o boleto.", output="O boleto foi reenviado hoje."):
    meta = InstructMeta(demand_id=f"c{i}:d0", source_call_id=f"c{i}", template_id="ask", pipeline_version="1")
    return InstructRecord(instruction=instruction, input=input_text, output=output, meta=meta)


# --- coherence ---

def test_well_formed_record_passes():
    (result,) = check_coherence([record()])
    assert result.passed
    assert result.reasons == []


def test_echo_fails():
    (result,) = check_coherence([record(input_text="Quero o boleto.", output="Quero o boleto.")])
    assert not result.passed
    assert "echo" in result.reasons


def test_short_output_fails():
    (result,) = check_coherence([record(output="Pronto.")], min_output_tokens=3)
    assert result.reasons == ["too_short"]


def test_empty_field_reported():
    broken = InstructRecord.model_construct(
        instruction="", input="Quero o boleto.", output="O boleto foi reenviado hoje.", meta=record().meta
    )
    (result,) = check_coherence([broken])
    assert result.reasons == ["empty_instruction"]


# --- redundancy ---

def test_identical_questions_all_flagged():
    records = [record(i) for i in range(4)]
    pairs = check_redundancy(records, np.ones((4, 8)))
    assert [(p.first, p.second) for p in pairs] == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    assert all(p.similarity == pytest.approx(1.0) for p in pairs)


def test_unreachable_threshold():
    records = [record(i) for i in range(3)]
    assert check_redundancy(records, np.ones((3, 8)), threshold=1.01) == []


def test_random_questions_not_flagged():
    rng = np.random.default_rng(0)
    records = [record(i) for i in range(50)]
    assert check_redundancy(records, rng.standard_normal((50, 256))) == []


def test_zero_vectors_never_flagged():
    assert check_redundancy([record(0), record(1)], np.zeros((2, 4))) == []


def test_fewer_than_two_records():
    assert check_redundancy([record()], [[1.0, 0.0]]) == []
    assert check_redundancy([], []) == []


def test_row_count_mismatch():
    with pytest.raises(PipelineError):
        check_redundancy([record(0), record(1)], np.ones((3, 4)))


# --- report ---

def test_skip_counts_merge_ledgers():
    counts = count_skips(
        [{"reason": "no_customer_speech"}, {"reason": "all_ivr"}],
        [{"reason": "gateway_error"}, {"reason": "all_ivr"}],
    )
    assert counts == {"all_ivr": 2, "gateway_error": 1, "no_customer_speech": 1}


def test_zero_records(tmp_path):
    report, sample = compile_report([], 0, [], [], [], [], 0, sample_path=tmp_path / "review.jsonl")
    assert report.total_records == 0
    assert report.invalid_demand_ratio == 0.0
    assert report.accounting_closed
    assert sample == []
    assert (tmp_path / "review.jsonl").read_text(encoding="utf-8") == ""


def test_invalid_ratio_over_3120_demands():
    records = [record(i) for i in range(3120)]
    report, sample = compile_report(records, 3120, [], check_coherence(records), [], [], 2)
    assert report.invalid_demand_ratio == pytest.approx(2 / 3120)
    assert report.invalid_demand_ratio == pytest.approx(0.00064, abs=1e-5)
    assert report.coherent == 3120
    assert len(sample) == 25


def test_accounting_closure_reported():
    records = [record(i) for i in range(18)]
    ledger = [{"reason": "all_ivr"}, {"reason": "gateway_error"}]
    report, _ = compile_report(records, 20, [ledger], [], [], [], 0)
    assert report.completeness.pairs_out + report.completeness.skipped == 20
    assert report.accounting_closed

    report, _ = compile_report(records, 21, [ledger], [], [], [], 0)
    assert not report.accounting_closed


def test_leaks_counted():
    leaks = [LeakViolation(record_index=0, field="output", category="PHONE")]
    report, _ = compile_report([record()], 1, [], [], [], leaks, 0)
    assert report.leak_violations == 1
    assert report.leak_details == leaks


def test_review_sample_is_seeded(tmp_path):
    records = [record(i) for i in range(100)]
    first = review_sample(records, 25, seed=3)
    assert first == review_sample(records, 25, seed=3)
    assert len(first) == 25
    assert len({r.meta.demand_id for r in first}) == 25
    assert review_sample(records[:4], 25, seed=3) == records[:4]

    compile_report(records, 100, [], [], [], [], 0, seed=3, sample_path=tmp_path / "review.jsonl")
    lines = (tmp_path / "review.jsonl").read_text(encoding="utf-8").splitlines()
    assert [json.loads(l)["meta"]["demand_id"] for l in lines] == [r.meta.demand_id for r in first]


def test_report_does_not_touch_records():
    records = [record(i) for i in range(5)]
    snapshot = [r.model_copy(deep=True) for r in records]
    compile_report(records, 5, [], check_coherence(records), [], [], 0)
    assert records == snapshot


# --- curation ---

def test_curate_drops_failures_and_later_duplicates():
    records = [record(0), record(1, output="Ok."), record(2), record(3)]
    coherence = check_coherence(records)
    redundant = check_redundancy(records, [[1, 0], [0, 1], [1, 0], [-1, 0]])
    curated = curate(records, coherence, redundant)
    assert [r.meta.demand_id for r in curated] == ["c0:d0", "c3:d0"]
