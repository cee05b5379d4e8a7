# [file name]: core/text/numerals.py
import logging
import re
from typing import List, Optional, Tuple

from config.constants import NUMERAL_LEXICONS
from models.transcript_models import NumeralLexicon

logger = logging.getLogger(__name__)

_WORD_RE = re.compile(r"[^\W\d_]+")


def lexicon_for(language: str) -> NumeralLexicon:
    if language not in NUMERAL_LEXICONS:
        raise ValueError(f"No numeral lexicon for language '{language}'")
    return NumeralLexicon(language=language, **NUMERAL_LEXICONS[language])


def parse_cardinal(words: List[str], lexicon: NumeralLexicon) -> Optional[int]:
    """Evaluate a compositional cardinal ("two hundred", "dois mil e vinte").

    Components must appear in descending magnitude: thousands, hundreds,
    tens, units. Returns None when the words do not form one number.
    """
    words = [w for w in words if w not in lexicon.connectives]
    if not words:
        return None
    if len(words) == 1 and lexicon.values.get(words[0]) == 0:
        return 0

    total = 0
    group = 0
    last = None  # magnitude class of the previous component in this group
    seen_thousand = False
    for word in words:
        if word in lexicon.multipliers:
            multiplier = lexicon.multipliers[word]
            if multiplier == 100:
                if last != "unit" or group >= 10:
                    return None
                group *= 100
                last = "hundred"
            else:
                if seen_thousand:
                    return None
                total = max(group, 1) * multiplier
                group = 0
                last = "thousand"
                seen_thousand = True
            continue

        value = lexicon.values.get(word)
        if value is None or value == 0:
            return None
        if value >= 100:
            if last not in (None, "thousand"):
                return None
            group = value
            last = "hundred"
        elif value >= 20:
            if last not in (None, "thousand", "hundred"):
                return None
            group += value
            last = "tens"
        elif value >= 10:
            if last not in (None, "thousand", "hundred"):
                return None
            group += value
            last = "teen"
        else:
            if last not in (None, "thousand", "hundred", "tens"):
                return None
            group += value
            last = "unit"
    return total + group


def evaluate_run(words: List[str], lexicon: NumeralLexicon) -> Optional[str]:
    """Digit string for a numeral run, or None when it cannot be read"""
    value = parse_cardinal(words, lexicon)
    if value is not None:
        return str(value)
    digits = lexicon.digit_words
    if len(words) >= 2 and all(w in digits for w in words):
        # "zero zero sete" reads positionally, leading zeros kept
        return "".join(str(digits[w]) for w in words)
    return None


def _numeral_runs(text: str, lexicon: NumeralLexicon) -> List[Tuple[int, int, List[str]]]:
    """Maximal whitespace-separated runs of numeral words with interior connectives"""
    runs = []
    current: List[Tuple[int, int, str]] = []

    def close():
        while current and current[-1][2] in lexicon.connectives:
            current.pop()
        if current:
            runs.append((current[0][0], current[-1][1], [w for _, _, w in current]))
        current.clear()

    for match in _WORD_RE.finditer(text):
        word = match.group().casefold()
        joined = current and not text[current[-1][1]:match.start()].strip()
        if lexicon.is_numeral(word):
            if not joined:
                close()
            current.append((match.start(), match.end(), word))
        elif word in lexicon.connectives and joined and current[-1][2] not in lexicon.connectives:
            current.append((match.start(), match.end(), word))
        else:
            close()
    close()
    return runs


def normalize_numbers(text: str, lexicon: NumeralLexicon) -> str:
    """Rewrite spelled-out numbers as digit strings.

    "two hundred" and "two zero zero" both become "200". A lone ambiguous
    singleton ("um", "one") stays as written, as does any unreadable run.
    """
    pieces = []
    cursor = 0
    for start, end, words in _numeral_runs(text, lexicon):
        if len(words) == 1 and words[0] in lexicon.ambiguous_singletons:
            continue
        digits = evaluate_run(words, lexicon)
        if digits is None:
            logger.debug(f"Unparseable numeral run left verbatim: '{text[start:end]}'")
            continue
        pieces.append(text[cursor:start])
        pieces.append(digits)
        cursor = end
    pieces.append(text[cursor:])
    return "".join(pieces)
