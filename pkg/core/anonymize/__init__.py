from .rules import load_rules, default_rules, build_rule
from .redactor import detect_pii, redact, anonymize_text, leak_scan

__all__ = [
    "load_rules",
    "default_rules",
    "build_rule",
    "detect_pii",
    "redact",
    "anonymize_text",
    "leak_scan",
]
