import random
import re

import pytest

from config.constants import DEFAULT_NAME_DICTIONARY
from core.anonymize import anonymize_text, build_rule, detect_pii, leak_scan, load_rules, redact
from core.errors import PiiRuleError, RedactionError
from models.dataset_models import InstructMeta, InstructRecord, PiiSpan


@pytest.fixture(scope="module")
def rules():
    return load_rules()


def record(instruction="Qual foi a solução?", input_text="Quero a segunda via.", output="Enviamos a fatura."):
    meta = InstructMeta(demand_id="c:d0", source_call_id="c", template_id="t", pipeline_version="test")
    return InstructRecord(instruction=instruction, input=input_text, output=output, meta=meta)


# --- detection ---

def test_email_detected_as_one_span(rules):
    text = "meu email é joao@mail.com"
    spans = detect_pii(text, rules)
    assert [(s.category, text[s.start:s.end]) for s in spans] == [("EMAIL", "joao@mail.com")]


def test_no_matches(rules):
    assert detect_pii("quero cancelar o plano", rules) == []


def test_account_and_name_are_disjoint(rules):
    text = "conta 12345678 do João"
    spans = detect_pii(text, rules)
    assert [(s.category, text[s.start:s.end]) for s in spans] == [("ACCOUNT_ID", "12345678"), ("NAME", "João")]


def test_longest_match_wins_over_priority():
    short = build_rule("NAME", "dict", "Ana", 99)
    long = build_rule("NAME", "dict", "Ana Maria", 1)
    text = "falei com Ana Maria ontem"
    (span,) = detect_pii(text, [short, long])
    assert text[span.start:span.end] == "Ana Maria"


def test_equal_length_resolves_by_priority():
    low = build_rule("ACCOUNT_ID", "pattern", r"\d{6}", 10)
    high = build_rule("DOC_ID", "pattern", r"\d{6}", 20)
    (span,) = detect_pii("numero 123456", [low, high])
    assert span.category == "DOC_ID"


def test_original_text_never_stored(rules):
    spans = detect_pii("ligue 99999-1234", rules)
    assert "99999-1234" not in spans[0].model_dump_json()


# --- redaction ---

def test_empty_span_list_leaves_text():
    text, report = redact("nada a mascarar", [])
    assert text == "nada a mascarar"
    assert report.counts == {}


def test_phone_span_becomes_one_placeholder(rules):
    text = "o número é 99999-1234, obrigado"
    redacted, report = redact(text, detect_pii(text, rules))
    assert redacted == "o número é <PHONE>, obrigado"
    assert report.counts == {"PHONE": 1}


def test_redaction_is_idempotent(rules):
    text = "Sou a Maria Silva, conta 12345678, email maria@exemplo.com.br"
    once, _ = anonymize_text(text, rules)
    twice, report = anonymize_text(once, rules)
    assert twice == once
    assert report.counts == {}


def test_out_of_bounds_span_rejected():
    span = PiiSpan(start=5, end=50, category="NAME", original_digest="x")
    with pytest.raises(RedactionError):
        redact("curto", [span])


def test_non_span_characters_preserved(rules):
    text = "antes Pedro depois"
    redacted, _ = anonymize_text(text, rules)
    assert redacted == "antes <NAME> depois"


@pytest.mark.parametrize("text", ["falo com maria amanhã", "falo com MARIA amanhã", "falo com mAria amanhã"])
def test_dictionary_names_match_any_case(rules, text):
    redacted, report = anonymize_text(text, rules)
    assert redacted == "falo com <NAME> amanhã"
    assert report.counts == {"NAME": 1}


def test_dictionary_names_match_whole_words(rules):
    assert anonymize_text("a mariana ligou", rules)[0] == "a <NAME> ligou"
    assert anonymize_text("anagrama", rules)[0] == "anagrama"


# --- seeded corpus ---

def _seeded_items(rng):
    streets = ["Rua das Flores", "Avenida Paulista", "Rua Augusta", "Travessa do Comércio"]
    return {
        "NAME": rng.choice(DEFAULT_NAME_DICTIONARY),
        "EMAIL": f"{rng.choice(['ana', 'joao', 'cliente', 'contato'])}{rng.randint(1, 999)}@exemplo.com.br",
        "PHONE": f"(11) 9{rng.randint(1000, 9999)}-{rng.randint(1000, 9999)}",
        "DOC_ID": f"{rng.randint(100, 999)}.{rng.randint(100, 999)}.{rng.randint(100, 999)}-{rng.randint(10, 99)}",
        "ACCOUNT_ID": str(rng.randint(10_000_000, 99_999_999)),
        "ADDRESS": f"{rng.choice(streets)}, {rng.randint(1, 2000)}",
    }


SNIPPETS = {
    "NAME": "meu nome é {}",
    "EMAIL": "meu email é {}",
    "PHONE": "o telefone é {}",
    "DOC_ID": "o CPF é {}",
    "ACCOUNT_ID": "conta {}",
    "ADDRESS": "moro na {}",
}


def test_two_hundred_seeded_items_never_leak(rules):
    rng = random.Random(21)
    records = []
    injected = 0
    total_counts = {}
    for _ in range(50):
        items = _seeded_items(rng)
        chosen = rng.sample(sorted(items), 4)
        text = "Olá, " + ", ".join(SNIPPETS[c].format(items[c]) for c in chosen) + "."
        redacted, report = anonymize_text(text, rules)
        injected += len(chosen)
        for category, n in report.counts.items():
            total_counts[category] = total_counts.get(category, 0) + n

        for category in chosen:
            original = items[category]
            assert re.search(rf"(?<!\w){re.escape(original)}(?!\w)", redacted) is None, (category, redacted)
            assert f"<{category}>" in redacted
        records.append(record(input_text=redacted, output=f"Atendimento para {redacted}"))

    assert injected == 200
    assert sum(total_counts.values()) == 200
    assert leak_scan(records, rules) == []


# --- leak scan ---

def test_leak_scan_flags_phone(rules):
    records = [record(), record(output="Ligue para 999-1234 amanhã.")]
    violations = leak_scan(records, rules)
    assert [(v.record_index, v.field, v.category) for v in violations] == [(1, "output", "PHONE")]


def test_leak_scan_of_empty_dataset(rules):
    assert leak_scan([], rules) == []


# --- rule files ---

def test_rule_file_with_dictionary(tmp_path):
    (tmp_path / "names.txt").write_text("Zuleica\nJandira\n", encoding="utf-8")
    path = tmp_path / "rules.tsv"
    path.write_text(
        "# category\tkind\tpayload\tpriority\n"
        "NAME\tdict\t@names.txt\t50\n"
        "ACCOUNT_ID\tpattern\tCC-\\d{4}\t40\n",
        encoding="utf-8",
    )
    loaded = load_rules(path)
    text = "a Zuleica tem a CC-1234"
    redacted, report = anonymize_text(text, loaded)
    assert redacted == "a <NAME> tem a <ACCOUNT_ID>"
    assert report.counts == {"NAME": 1, "ACCOUNT_ID": 1}


def test_invalid_pattern_names_line(tmp_path):
    path = tmp_path / "rules.tsv"
    path.write_text("EMAIL\tpattern\t[a-z\t10\n", encoding="utf-8")
    with pytest.raises(PiiRuleError) as excinfo:
        load_rules(path)
    assert excinfo.value.line == 1


def test_unknown_category_rejected():
    with pytest.raises(PiiRuleError):
        build_rule("SSN", "pattern", r"\d+", 1)
