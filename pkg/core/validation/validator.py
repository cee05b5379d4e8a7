# [file name]: core/validation/validator.py
import logging
import random
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from core.errors import PipelineError
from models.dataset_models import (
    Completeness,
    CoherenceResult,
    InstructRecord,
    LeakViolation,
    RedundantPair,
    ValidationReport,
)
from utils.helpers import tokenize, write_jsonl

logger = logging.getLogger(__name__)


def check_coherence(records: Sequence[InstructRecord], min_output_tokens: int = 3) -> List[CoherenceResult]:
    results = []
    for index, record in enumerate(records):
        reasons = []
        for field in ("instruction", "input", "output"):
            if not getattr(record, field).strip():
                reasons.append(f"empty_{field}")
        if record.output.strip() and len(tokenize(record.output)) < min_output_tokens:
            reasons.append("too_short")
        if record.input.strip() and record.input == record.output:
            reasons.append("echo")
        results.append(CoherenceResult(record_index=index, passed=not reasons, reasons=reasons))
    return results


def check_redundancy(
    records: Sequence[InstructRecord],
    embeddings: Union[np.ndarray, Sequence[Sequence[float]]],
    threshold: float = 0.95,
) -> List[RedundantPair]:
    """Exact pairwise cosine over question embeddings; flags pairs above threshold"""
    if len(records) < 2:
        return []
    matrix = np.asarray(embeddings, dtype=np.float64)
    if matrix.shape[0] != len(records):
        raise PipelineError(f"Got {matrix.shape[0]} embedding(s) for {len(records)} record(s)")

    norms = np.linalg.norm(matrix, axis=1)
    safe = np.where(norms > 0, norms, 1.0)
    unit = matrix / safe[:, None]
    similarity = np.clip(unit @ unit.T, -1.0, 1.0)

    first, second = np.triu_indices(len(records), k=1)
    scores = similarity[first, second]
    mask = scores > threshold
    return [
        RedundantPair(first=int(i), second=int(j), similarity=float(s))
        for i, j, s in zip(first[mask], second[mask], scores[mask])
    ]


def count_skips(*ledgers: Sequence[Dict[str, str]]) -> Dict[str, int]:
    counts: Dict[str, int] = {}
    for ledger in ledgers:
        for row in ledger:
            reason = row.get("reason", "unknown")
            counts[reason] = counts.get(reason, 0) + 1
    return dict(sorted(counts.items()))


def review_sample(records: Sequence[InstructRecord], sample_size: int, seed: int) -> List[InstructRecord]:
    size = min(sample_size, len(records))
    if size == 0:
        return []
    chosen = sorted(random.Random(seed).sample(range(len(records)), size))
    return [records[i] for i in chosen]


def compile_report(
    records: Sequence[InstructRecord],
    demands_in: int,
    skipped_ledgers: Sequence[Sequence[Dict[str, str]]],
    coherence: Sequence[CoherenceResult],
    redundant: Sequence[RedundantPair],
    leaks: Sequence[LeakViolation],
    invalid_demand_count: int,
    sample_size: int = 25,
    seed: int = 0,
    sample_path: Optional[Union[str, Path]] = None,
) -> Tuple[ValidationReport, List[InstructRecord]]:
    """Assemble the report and the seeded human-review sample.

    Validation only reads the dataset; the sample is written when sample_path is given.
    """
    completeness = Completeness(
        demands_in=demands_in,
        pairs_out=len(records),
        skipped_with_reason=count_skips(*skipped_ledgers),
    )
    if not completeness.closed:
        logger.warning(
            f"⚠️ Accounting does not close: {completeness.pairs_out} out + "
            f"{completeness.skipped} skipped != {demands_in} in"
        )

    sample = review_sample(records, sample_size, seed)
    if sample_path is not None:
        write_jsonl(sample_path, [r.model_dump() for r in sample])

    report = ValidationReport(
        total_records=len(records),
        coherent=sum(1 for c in coherence if c.passed),
        coherence_failures=[c for c in coherence if not c.passed],
        flagged_redundant=list(redundant),
        completeness=completeness,
        accounting_closed=completeness.closed,
        leak_violations=len(leaks),
        leak_details=list(leaks),
        invalid_demand_count=invalid_demand_count,
        invalid_demand_ratio=invalid_demand_count / demands_in if demands_in else 0.0,
        sample_path=str(sample_path) if sample_path is not None else None,
    )
    return report, sample


def curate(
    records: Sequence[InstructRecord],
    coherence: Sequence[CoherenceResult],
    redundant: Sequence[RedundantPair],
) -> List[InstructRecord]:
    """Drop coherence failures and the later record of every redundant pair"""
    dropped = {c.record_index for c in coherence if not c.passed}
    dropped.update(pair.second for pair in redundant)
    return [r for i, r in enumerate(records) if i not in dropped]
