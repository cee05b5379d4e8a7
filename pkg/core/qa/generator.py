# [file name]: core/qa/generator.py
import asyncio
import functools
import logging
from typing import Any, Dict, List, Optional, Protocol, Sequence, Tuple

from core.errors import EmptyOutputError, GatewayError, RecordInvariantError, VectorStoreError
from core.llm.gateway import LlmGateway
from database.vector_store import QueryVector, VectorIndex
from models.dataset_models import CandidateRef, Demand, InstructMeta, InstructRecord, QaPair, SearchHit

logger = logging.getLogger(__name__)


class Searcher(Protocol):
    def search(
        self,
        query: QueryVector,
        k: int,
        persona_filter: Optional[str] = None,
        exclude_call_id: Optional[str] = None,
    ) -> List[SearchHit]:
        ...


class GenerationResult:
    """Pairs in demand order plus the audit rows and the skip ledger"""

    def __init__(self):
        self.pairs: List[QaPair] = []
        self.audit: List[Dict[str, Any]] = []
        self.skipped: List[Dict[str, str]] = []

    def skip(self, demand: Demand, reason: str, detail: str = ""):
        self.skipped.append({"demand_id": demand.demand_id, "call_id": demand.call_id, "reason": reason, "detail": detail})
        self.audit.append({"demand_id": demand.demand_id, "hits": [], "refined_lengths": [], "skipped": reason})


async def _pair_for(
    demand: Demand,
    index: VectorIndex,
    searcher: Searcher,
    gateway: LlmGateway,
    n: int,
    exclude_same_call: bool,
) -> Tuple[Optional[QaPair], Dict[str, Any], Optional[str], str]:
    if demand.embedding is None or not demand.rewritten.strip():
        return None, {}, "not_embedded", ""

    search = functools.partial(
        searcher.search,
        demand.embedding,
        k=n,
        persona_filter="agent",
        exclude_call_id=demand.call_id if exclude_same_call else None,
    )
    try:
        hits = await asyncio.get_running_loop().run_in_executor(None, search)
        if not hits:
            return None, {}, "no_hits", ""
        entries = [index.get(hit.entry_id) for hit in hits]
    except VectorStoreError as e:
        logger.warning(f"⚠️ {demand.demand_id}: skipped after search failure: {e}")
        return None, {}, "search_error", str(e)

    try:
        refined = await asyncio.gather(
            *(gateway.refine_response(entry.text, demand.rewritten) for entry in entries)
        )
        answer = await gateway.synthesize_answer(refined, demand.rewritten)
    except (GatewayError, EmptyOutputError) as e:
        logger.warning(f"⚠️ {demand.demand_id}: skipped after gateway failure: {e}")
        return None, {}, "gateway_error", str(e)

    pair = QaPair(
        demand_id=demand.demand_id,
        call_id=demand.call_id,
        question=demand.rewritten,
        answer=answer,
        validity=demand.validity,
        candidate_refs=[
            CandidateRef(entry_id=hit.entry_id, call_id=entry.call_id, score=hit.score)
            for hit, entry in zip(hits, entries)
        ],
    )
    audit = {
        "demand_id": demand.demand_id,
        "hits": [{"entry_id": h.entry_id, "score": h.score, "rank": h.rank} for h in hits],
        "refined_lengths": [len(r) for r in refined],
    }
    return pair, audit, None, ""


async def build_pairs(
    demands: Sequence[Demand],
    index: VectorIndex,
    gateway: LlmGateway,
    n: int,
    searcher: Optional[Searcher] = None,
    exclude_same_call: bool = False,
    max_concurrent_calls: int = 4,
) -> GenerationResult:
    """Retrieve, refine and synthesize one answer per demand.

    The local index always resolves hit metadata; searcher defaults to it.
    Invalid demands are processed and keep their tag.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    searcher = searcher or index
    if index.count() == 0:
        raise VectorStoreError("Vector store is empty; run the index stage first")

    semaphore = asyncio.Semaphore(max_concurrent_calls)

    async def _bounded(demand: Demand):
        async with semaphore:
            return await _pair_for(demand, index, searcher, gateway, n, exclude_same_call)

    outcomes = await asyncio.gather(*(_bounded(d) for d in demands))

    result = GenerationResult()
    for demand, (pair, audit, reason, detail) in zip(demands, outcomes):
        if pair is None:
            result.skip(demand, reason, detail)
            continue
        result.pairs.append(pair)
        result.audit.append(audit)

    logger.info(f"✅ Built {len(result.pairs)} pair(s), skipped {len(result.skipped)}")
    return result


def format_instruct(
    pair: QaPair,
    templates: Sequence[Tuple[str, str]],
    seed: int,
    position: int,
    pipeline_version: str,
) -> InstructRecord:
    """Pick the instruction by seeded rotation: template (seed + position) mod size"""
    if not templates:
        raise RecordInvariantError("Instruction template set is empty")
    if not pair.answer.strip():
        raise RecordInvariantError(f"Pair {pair.demand_id} has an empty answer")
    if not pair.question.strip():
        raise RecordInvariantError(f"Pair {pair.demand_id} has an empty question")

    template_id, text = templates[(seed % len(templates) + position) % len(templates)]
    return InstructRecord(
        instruction=text,
        input=pair.question,
        output=pair.answer,
        meta=InstructMeta(
            demand_id=pair.demand_id,
            source_call_id=pair.call_id,
            candidate_call_ids=[c.call_id for c in pair.candidate_refs],
            template_id=template_id,
            pipeline_version=pipeline_version,
            validity=pair.validity,
            candidate_entry_ids=[c.entry_id for c in pair.candidate_refs],
        ),
    )
