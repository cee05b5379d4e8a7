# [file name]: core/llm/mock_rules.py
"""Deterministic text rules standing in for the hosted chat model offline."""
import re
from typing import List, Tuple

from config.constants import INTENT_MARKERS, STOPWORDS
from utils.helpers import split_sentences, tokenize

_CLAUSE_SPLIT_RE = re.compile(r"[.?!…,;]+")
_TOKEN_RE = re.compile(r"\S+")


def _alpha_tokens(text: str) -> List[str]:
    return [t for t in tokenize(text) if any(ch.isalpha() for ch in t)]


def intent_sentence(utterances: str, language: str = "pt") -> str:
    """First clause carrying an intent marker, rebuilt as one direct sentence.

    "eu queria a segunda via da fatura" -> "Quero a segunda via da fatura."
    Falls back to the first clause with at least two words.
    """
    markers = INTENT_MARKERS.get(language, {})
    clauses = [c.strip() for c in _CLAUSE_SPLIT_RE.split(utterances) if c.strip()]

    for clause in clauses:
        words = _TOKEN_RE.findall(clause)
        for position, word in enumerate(words):
            key = word.casefold()
            if key not in markers:
                continue
            rest = " ".join(words[position + 1:]).strip()
            if not _alpha_tokens(rest):
                continue
            opening, terminal = markers[key]
            return f"{opening} {rest}{terminal}"

    for clause in clauses:
        if len(_alpha_tokens(clause)) >= 2:
            return clause[0].upper() + clause[1:] + "."
    return ""


def _content_words(text: str, language: str) -> set:
    stop = set(STOPWORDS.get(language, []))
    return {t for t in tokenize(text) if len(t) >= 3 and t not in stop and not t.isdigit()}


def content_overlap(response: str, demand: str, language: str = "pt") -> str:
    """Keep the response sentences sharing a content word with the demand"""
    demand_words = _content_words(demand, language)
    sentences = split_sentences(response)
    kept = [s for s in sentences if _content_words(s, language) & demand_words]
    if not kept:
        return response.strip()
    return " ".join(kept)


def sentence_union(candidates: List[str]) -> str:
    """Order-preserving union of candidate sentences, duplicates emitted once"""
    if len(candidates) == 1:
        return candidates[0].strip()
    seen = set()
    merged = []
    for candidate in candidates:
        for sentence in split_sentences(candidate):
            key = " ".join(tokenize(sentence))
            if key in seen:
                continue
            seen.add(key)
            merged.append(sentence)
    return " ".join(merged)


def token_guard(demand: str) -> Tuple[str, str]:
    """invalid when fewer than 3 tokens or no alphabetic token"""
    tokens = tokenize(demand)
    if len(tokens) < 3:
        return "invalid", "fewer than 3 tokens"
    if not any(any(ch.isalpha() for ch in t) for t in tokens):
        return "invalid", "no alphabetic token"
    return "valid", ""
