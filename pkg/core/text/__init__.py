from .numerals import lexicon_for, normalize_numbers, parse_cardinal
from .cleaning import (
    TranscriptCleaner,
    apply_replacements,
    collapse_repetitions,
    filter_hallucination,
    load_replacements,
    remove_fillers,
    restore_sentences,
)

__all__ = [
    "lexicon_for",
    "normalize_numbers",
    "parse_cardinal",
    "TranscriptCleaner",
    "apply_replacements",
    "collapse_repetitions",
    "filter_hallucination",
    "load_replacements",
    "remove_fillers",
    "restore_sentences",
]
