import asyncio
from collections import Counter

import pytest

from core.errors import BackendUnavailableError, ExtractionError, RecordInvariantError, VectorStoreError
from core.llm import ChatBackend, LlmGateway, MockChatBackend, MockEmbeddingBackend
from core.prompts import PromptTemplates
from core.qa import (
    build_pairs,
    demand_id_for,
    extract_demand_utterances,
    extract_response_utterances,
    first_substantive_agent_index,
    format_instruct,
)
from database.vector_store import VectorIndex
from models.dataset_models import CandidateRef, Demand, EmbeddingVector, QaPair, VectorEntry
from models.pipeline_models import EmbedConfig, LlmConfig
from models.transcript_models import CallTranscript, TranscriptSegment

DIM = 32
REPLY = "Claro, vou verificar agora mesmo a segunda via da sua fatura no sistema para você"


def transcript(*turns, call_id="c1"):
    segments = [
        TranscriptSegment(start_s=float(i), end_s=i + 0.9, speaker=speaker, text=text)
        for i, (speaker, text) in enumerate(turns)
    ]
    return CallTranscript(call_id=call_id, segments=segments)


class DownChat(ChatBackend):
    kind = "down"

    def complete(self, messages, template, values):
        raise BackendUnavailableError("timeout")


def make_gateway(chat=None):
    return LlmGateway(
        chat or MockChatBackend("pt"),
        MockEmbeddingBackend(dim=DIM),
        PromptTemplates.load(),
        LlmConfig(backoff_base_s=0.0, max_attempts=2),
        EmbedConfig(dim=DIM),
        max_concurrent_requests=4,
        top_n=3,
    )


def embed(gateway, text):
    return asyncio.run(gateway.embed(text)).values


def store_with(gateway, responses):
    index = VectorIndex(DIM)
    for call_id, text in responses:
        index.insert(VectorEntry(
            entry_id=f"{call_id}:r0",
            text=text,
            persona="agent",
            call_id=call_id,
            embedding=EmbeddingVector(values=embed(gateway, text)),
        ))
    return index


def demand(gateway, call_id, question, validity="valid"):
    return Demand(
        demand_id=demand_id_for(call_id),
        call_id=call_id,
        raw_utterances=question,
        rewritten=question,
        validity=validity,
        embedding=embed(gateway, question) if question else None,
    )


# --- extraction ---

def test_demand_window_joins_customer_turns_before_reply():
    call = transcript(
        ("agent", "Central de atendimento, bom dia"),
        ("customer", "Oi, bom dia"),
        ("customer", "eu queria a segunda via da fatura"),
        ("agent", REPLY),
        ("customer", "obrigada"),
    )
    assert first_substantive_agent_index(call) == 3
    assert extract_demand_utterances(call) == "Oi, bom dia eu queria a segunda via da fatura"
    assert extract_response_utterances(call) == REPLY


def test_response_joins_every_agent_turn_after_boundary():
    call = transcript(
        ("customer", "quero cancelar"),
        ("agent", REPLY),
        ("customer", "certo"),
        ("agent", "Pronto, cancelado."),
        ("agent", "Mais alguma coisa?"),
    )
    assert extract_response_utterances(call) == f"{REPLY} Pronto, cancelado. Mais alguma coisa?"


def test_call_without_customer_speech():
    call = transcript(("agent", REPLY))
    with pytest.raises(ExtractionError) as excinfo:
        extract_demand_utterances(call)
    assert excinfo.value.reason == "no_customer_speech"


def test_short_acknowledgements_keep_window_open():
    call = transcript(
        ("customer", "eu queria mudar meu plano"),
        ("agent", "uhum"),
        ("customer", "para o de cem megas"),
        ("agent", "certo, entendi"),
    )
    assert first_substantive_agent_index(call) is None
    assert extract_demand_utterances(call) == "eu queria mudar meu plano para o de cem megas"
    assert extract_response_utterances(call) is None


def test_greeting_before_customer_never_closes_window():
    call = transcript(("agent", REPLY), ("customer", "quero ajuda com a conta"))
    assert first_substantive_agent_index(call) is None


def test_threshold_is_configurable():
    call = transcript(("customer", "quero cancelar"), ("agent", "vou cancelar agora"))
    assert first_substantive_agent_index(call, substantive_tokens=2) == 1
    assert first_substantive_agent_index(call, substantive_tokens=3) is None


# --- build_pairs ---

def test_fewer_hits_than_n():
    gateway = make_gateway()
    index = store_with(gateway, [("a1", "A segunda via da fatura foi enviada para o seu email.")])
    result = asyncio.run(build_pairs([demand(gateway, "c1", "Quero a segunda via da fatura.")], index, gateway, n=3))
    (pair,) = result.pairs
    assert [c.entry_id for c in pair.candidate_refs] == ["a1:r0"]
    assert pair.answer == "A segunda via da fatura foi enviada para o seu email."
    assert result.skipped == []


def test_candidate_scores_match_store():
    gateway = make_gateway()
    index = store_with(gateway, [
        ("a1", "A fatura foi enviada."),
        ("a2", "O plano foi cancelado."),
        ("a3", "A senha foi redefinida."),
        ("a4", "O chip foi bloqueado."),
    ])
    d = demand(gateway, "c1", "Quero a segunda via da fatura.")
    (pair,) = asyncio.run(build_pairs([d], index, gateway, n=3)).pairs
    hits = index.search(d.embedding, k=3, persona_filter="agent")
    assert [(c.entry_id, c.score) for c in pair.candidate_refs] == [(h.entry_id, h.score) for h in hits]
    assert [c.call_id for c in pair.candidate_refs] == [h.entry_id.split(":")[0] for h in hits]


def test_empty_store():
    gateway = make_gateway()
    with pytest.raises(VectorStoreError):
        asyncio.run(build_pairs([demand(gateway, "c1", "Quero ajuda.")], VectorIndex(DIM), gateway, n=3))


def test_n_must_be_positive():
    gateway = make_gateway()
    index = store_with(gateway, [("a1", "Pronto.")])
    with pytest.raises(ValueError):
        asyncio.run(build_pairs([], index, gateway, n=0))


def test_invalid_demand_still_paired_with_tag():
    gateway = make_gateway()
    index = store_with(gateway, [("a1", "Posso ajudar em algo mais?")])
    d = demand(gateway, "c1", "uhum", validity="invalid")
    (pair,) = asyncio.run(build_pairs([d], index, gateway, n=3)).pairs
    assert pair.validity == "invalid"


def test_skip_reasons_and_order():
    gateway = make_gateway()
    index = store_with(gateway, [("a1", "A fatura foi enviada."), ("a2", "O plano foi cancelado.")])
    demands = [
        demand(gateway, "c1", "Quero a fatura."),
        Demand(demand_id="c2:d0", call_id="c2", raw_utterances="uhum", validity="invalid"),
        demand(gateway, "c3", "Quero cancelar o plano."),
    ]
    result = asyncio.run(build_pairs(demands, index, gateway, n=2))
    assert [p.demand_id for p in result.pairs] == ["c1:d0", "c3:d0"]
    assert result.skipped == [{"demand_id": "c2:d0", "call_id": "c2", "reason": "not_embedded", "detail": ""}]
    assert [row["demand_id"] for row in result.audit] == ["c1:d0", "c2:d0", "c3:d0"]


def test_no_hits_when_only_candidate_is_same_call():
    gateway = make_gateway()
    index = store_with(gateway, [("c1", "A fatura foi enviada.")])
    d = demand(gateway, "c1", "Quero a fatura.")
    result = asyncio.run(build_pairs([d], index, gateway, n=3, exclude_same_call=True))
    assert result.pairs == []
    assert result.skipped[0]["reason"] == "no_hits"


def test_gateway_failure_skips_pair_and_continues():
    gateway = make_gateway(chat=DownChat())
    index = store_with(gateway, [("a1", "A fatura foi enviada.")])
    demands = [demand(gateway, f"c{i}", "Quero a fatura.") for i in range(3)]
    result = asyncio.run(build_pairs(demands, index, gateway, n=1))
    assert result.pairs == []
    assert [s["reason"] for s in result.skipped] == ["gateway_error"] * 3
    assert all(s["detail"] for s in result.skipped)


class FixedSearcher:
    def __init__(self, hits):
        self.hits = hits
        self.calls = []

    def search(self, query, k, persona_filter=None, exclude_call_id=None):
        self.calls.append((k, persona_filter, exclude_call_id))
        return self.hits[:k]


def test_external_searcher_resolved_against_local_index():
    gateway = make_gateway()
    index = store_with(gateway, [("a1", "A fatura foi enviada."), ("a2", "O boleto foi reenviado.")])
    searcher = FixedSearcher(index.search(embed(gateway, "O boleto foi reenviado."), k=2))
    d = demand(gateway, "c1", "Quero o boleto.")
    (pair,) = asyncio.run(build_pairs([d], index, gateway, n=2, searcher=searcher)).pairs
    assert searcher.calls == [(2, "agent", None)]
    assert pair.candidate_refs[0].entry_id == "a2:r0"


class FailingSearcher(FixedSearcher):
    def __init__(self, hits, failing_call):
        super().__init__(hits)
        self.failing_call = failing_call

    def search(self, query, k, persona_filter=None, exclude_call_id=None):
        if exclude_call_id == self.failing_call:
            raise VectorStoreError("Search service at http://search.local failed: 503")
        return super().search(query, k, persona_filter, exclude_call_id)


def test_search_failure_skips_pair_and_continues():
    gateway = make_gateway()
    index = store_with(gateway, [("a1", "O boleto foi reenviado.")])
    searcher = FailingSearcher(index.search(embed(gateway, "O boleto foi reenviado."), k=1), failing_call="c1")
    demands = [demand(gateway, f"c{i}", "Quero o boleto.") for i in range(3)]
    result = asyncio.run(build_pairs(demands, index, gateway, n=1, searcher=searcher, exclude_same_call=True))
    assert [p.demand_id for p in result.pairs] == ["c0:d0", "c2:d0"]
    assert [(s["demand_id"], s["reason"]) for s in result.skipped] == [("c1:d0", "search_error")]
    assert "503" in result.skipped[0]["detail"]


def test_hit_missing_from_local_index_skips_pair():
    gateway = make_gateway()
    index = store_with(gateway, [("a1", "O boleto foi reenviado.")])
    stale = index.search(embed(gateway, "O boleto foi reenviado."), k=1)[0].model_copy(update={"entry_id": "gone:r0"})
    d = demand(gateway, "c1", "Quero o boleto.")
    result = asyncio.run(build_pairs([d], index, gateway, n=1, searcher=FixedSearcher([stale])))
    assert result.pairs == []
    assert result.skipped[0]["reason"] == "search_error"


# --- format_instruct ---

TEMPLATES = [("ask", "What did the customer ask?"), ("solve", "What was the solution?"), ("rec", "What was recommended?")]


def pair(i=0, answer="O boleto foi reenviado.", question="Quero o boleto."):
    return QaPair(
        demand_id=f"c{i}:d0",
        call_id=f"c{i}",
        question=question,
        answer=answer,
        validity="valid",
        candidate_refs=[CandidateRef(entry_id="a1:r0", call_id="a1", score=0.9), CandidateRef(entry_id="a2:r0", call_id="a2", score=0.4)],
    )


def test_single_template_always_chosen():
    records = [format_instruct(pair(i), TEMPLATES[:1], seed=7, position=i, pipeline_version="1") for i in range(5)]
    assert {r.meta.template_id for r in records} == {"ask"}


def test_rotation_uses_each_template_equally():
    first = [format_instruct(pair(i), TEMPLATES, seed=11, position=i, pipeline_version="1").meta.template_id for i in range(9)]
    again = [format_instruct(pair(i), TEMPLATES, seed=11, position=i, pipeline_version="1").meta.template_id for i in range(9)]
    assert first == again
    assert Counter(first) == {"ask": 3, "solve": 3, "rec": 3}
    assert first[:3] == ["rec", "ask", "solve"]


def test_record_carries_pair_and_provenance():
    record = format_instruct(pair(4), TEMPLATES, seed=0, position=0, pipeline_version="0.3.0")
    assert (record.instruction, record.input, record.output) == ("What did the customer ask?", "Quero o boleto.", "O boleto foi reenviado.")
    assert record.meta.demand_id == "c4:d0"
    assert record.meta.source_call_id == "c4"
    assert record.meta.candidate_call_ids == ["a1", "a2"]
    assert record.meta.candidate_entry_ids == ["a1:r0", "a2:r0"]
    assert record.meta.pipeline_version == "0.3.0"
    assert record.meta.validity == "valid"


def test_empty_template_set():
    with pytest.raises(RecordInvariantError):
        format_instruct(pair(), [], seed=0, position=0, pipeline_version="1")


def test_empty_answer_guard():
    with pytest.raises(RecordInvariantError):
        format_instruct(pair(answer="  "), TEMPLATES, seed=0, position=0, pipeline_version="1")
