# [file name]: core/anonymize/redactor.py
import logging
from typing import List, Sequence, Tuple

from config.constants import PLACEHOLDER_TOKENS
from core.errors import RedactionError
from models.dataset_models import InstructRecord, LeakViolation, PiiRule, PiiSpan, RedactionReport
from utils.helpers import digest_text

logger = logging.getLogger(__name__)

# Upper bound on detect/redact rounds; one round is normally enough
MAX_REDACTION_ROUNDS = 5


def detect_pii(text: str, rules: Sequence[PiiRule]) -> List[PiiSpan]:
    """Match every rule, then keep a non-overlapping set of spans.

    Overlaps resolve by longest match, then higher priority, then leftmost.
    A pattern with a named group `pii` contributes only that group.
    """
    candidates: List[Tuple[int, int, PiiRule]] = []
    for rule in rules:
        regex = rule.regex
        use_group = "pii" in regex.groupindex
        for match in regex.finditer(text):
            if use_group and match.group("pii") is not None:
                start, end = match.span("pii")
            else:
                start, end = match.span()
            if end > start:
                candidates.append((start, end, rule))

    candidates.sort(key=lambda c: (-(c[1] - c[0]), -c[2].priority, c[0]))
    taken: List[Tuple[int, int]] = []
    spans = []
    for start, end, rule in candidates:
        if any(start < t_end and t_start < end for t_start, t_end in taken):
            continue
        taken.append((start, end))
        spans.append(
            PiiSpan(
                start=start,
                end=end,
                category=rule.category,
                original_digest=digest_text(text[start:end]),
                priority=rule.priority,
            )
        )
    return sorted(spans, key=lambda s: s.start)


def redact(text: str, spans: Sequence[PiiSpan]) -> Tuple[str, RedactionReport]:
    """Replace each span by its placeholder, right to left so offsets stay valid"""
    ordered = sorted(spans, key=lambda s: s.start)
    for span in ordered:
        if span.start < 0 or span.end > len(text) or span.start >= span.end:
            raise RedactionError(f"Span {span.start}-{span.end} out of bounds for text of length {len(text)}")
    for prev, nxt in zip(ordered, ordered[1:]):
        if nxt.start < prev.end:
            raise RedactionError(f"Spans {prev.start}-{prev.end} and {nxt.start}-{nxt.end} overlap")

    counts = {}
    digests = []
    for span in reversed(ordered):
        text = text[:span.start] + PLACEHOLDER_TOKENS[span.category] + text[span.end:]
        counts[span.category] = counts.get(span.category, 0) + 1
        digests.append({"category": span.category, "digest": span.original_digest})
    digests.reverse()
    return text, RedactionReport(counts=counts, digests=digests)


def anonymize_text(text: str, rules: Sequence[PiiRule]) -> Tuple[str, RedactionReport]:
    """detect + redact until no rule matches"""
    report = RedactionReport()
    for _ in range(MAX_REDACTION_ROUNDS):
        spans = detect_pii(text, rules)
        if not spans:
            return text, report
        text, round_report = redact(text, spans)
        report = report.merge(round_report)
    if detect_pii(text, rules):
        raise RedactionError(f"Text still matches PII rules after {MAX_REDACTION_ROUNDS} rounds")
    return text, report


def leak_scan(records: Sequence[InstructRecord], rules: Sequence[PiiRule]) -> List[LeakViolation]:
    violations = []
    for index, record in enumerate(records):
        for field in ("instruction", "input", "output"):
            for span in detect_pii(getattr(record, field), rules):
                violations.append(LeakViolation(record_index=index, field=field, category=span.category))
    if violations:
        logger.error(f"❌ Leak scan found {len(violations)} PII match(es) in the dataset")
    return violations
