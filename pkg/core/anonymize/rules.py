# [file name]: core/anonymize/rules.py
import logging
import re
from pathlib import Path
from typing import List, Optional, Union

from config.constants import DEFAULT_NAME_DICTIONARY, DEFAULT_PII_RULES, PLACEHOLDER_TOKENS
from core.errors import PiiRuleError
from models.dataset_models import PiiRule

logger = logging.getLogger(__name__)


def _dictionary_words(payload: str, base_dir: Optional[Path], line_no: Optional[int]) -> List[str]:
    if payload == "@builtin":
        return list(DEFAULT_NAME_DICTIONARY)
    if payload.startswith("@"):
        path = Path(payload[1:])
        if not path.is_absolute() and base_dir is not None:
            path = base_dir / path
        if not path.is_file():
            raise PiiRuleError(f"Dictionary file not found: {path}", line_no)
        with open(path, "r", encoding="utf-8") as f:
            return [w.strip() for w in f if w.strip() and not w.startswith("#")]
    return [w.strip() for w in payload.split(",") if w.strip()]


def build_rule(
    category: str,
    kind: str,
    payload: str,
    priority: Union[int, str],
    line_no: Optional[int] = None,
    base_dir: Optional[Path] = None,
) -> PiiRule:
    if category not in PLACEHOLDER_TOKENS:
        raise PiiRuleError(f"Unknown category '{category}'", line_no)
    if kind not in ("pattern", "dict"):
        raise PiiRuleError(f"Unknown rule kind '{kind}'", line_no)
    try:
        priority = int(priority)
    except (TypeError, ValueError):
        raise PiiRuleError(f"Priority must be an integer, got '{priority}'", line_no)

    if kind == "pattern":
        try:
            re.compile(payload)
        except re.error as e:
            raise PiiRuleError(f"Invalid pattern for {category}: {e}", line_no)
        return PiiRule(category=category, kind=kind, payload=payload, priority=priority)

    words = _dictionary_words(payload, base_dir, line_no)
    if not words:
        raise PiiRuleError(f"Empty dictionary for {category}", line_no)
    return PiiRule(category=category, kind=kind, payload=payload, priority=priority, words=words)


def default_rules() -> List[PiiRule]:
    return [build_rule(*row) for row in DEFAULT_PII_RULES]


def load_rules(path: Optional[Union[str, Path]] = None) -> List[PiiRule]:
    """Load `category<TAB>kind<TAB>payload<TAB>priority` lines; built-ins when path is None"""
    if path is None:
        return default_rules()

    path = Path(path)
    rules = []
    with open(path, "r", encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 4:
                raise PiiRuleError(f"Expected 4 tab-separated fields, got {len(fields)}", line_no)
            rules.append(build_rule(*fields, line_no=line_no, base_dir=path.parent))

    logger.info(f"🔐 Loaded {len(rules)} PII rule(s) from {path}")
    return rules
