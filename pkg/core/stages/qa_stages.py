# [file name]: core/stages/qa_stages.py
import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from config.constants import DATASET_FILE, INDEX_FILE
from config.settings import settings
from core.errors import EmptyOutputError, ExtractionError, GatewayError, RecordInvariantError
from core.qa import (
    build_pairs,
    demand_id_for,
    encode_instruct_jsonl,
    extract_demand_utterances,
    extract_response_utterances,
    format_instruct,
    response_id_for,
)
from core.stages.base_stage import BaseStage, StageOutcome
from core.stages.text_stages import TRANSCRIPT_SUFFIX, read_transcript
from database.vector_store import VectorIndex
from models.dataset_models import AgentResponse, Demand, EmbeddingVector, VectorEntry
from utils.helpers import atomic_write_bytes, read_jsonl, write_jsonl

logger = logging.getLogger(__name__)

DEMANDS_FILE = "demands.jsonl"
RESPONSES_FILE = "responses.jsonl"
VECTORS_FILE = "vectors.jsonl"
SKIPPED_FILE = "skipped.jsonl"
AUDIT_FILE = "audit.jsonl"


def skip_row(demand_id: str, call_id: str, reason: str, detail: str = "") -> Dict[str, str]:
    return {"demand_id": demand_id, "call_id": call_id, "reason": reason, "detail": detail}


class ExtractStage(BaseStage):
    """One demand and at most one response per call; demands are rewritten and
    checked for validity here so later stages only see objective questions."""

    name = "extract"
    reads = ("anonymize",)
    config_keys = ("generation", "llm", "language")

    def extra_input_files(self) -> List[Path]:
        prompt_dir = self.config.llm.prompt_dir
        if not prompt_dir:
            return []
        return sorted(p for p in Path(prompt_dir).glob("*.yaml"))

    async def _process(self, path: Path) -> Tuple[Optional[Demand], Optional[AgentResponse], Optional[Dict[str, str]]]:
        transcript = read_transcript(path)
        call_id = transcript.call_id
        demand_id = demand_id_for(call_id)
        threshold = self.config.generation.substantive_tokens
        gateway = self.system.gateway

        try:
            raw = extract_demand_utterances(transcript, threshold)
        except ExtractionError as e:
            self.exclude(call_id, e.reason)
            return None, None, skip_row(demand_id, call_id, e.reason)

        response = None
        response_text = extract_response_utterances(transcript, threshold)
        if response_text:
            response = AgentResponse(response_id=response_id_for(call_id), call_id=call_id, text=response_text)
        else:
            self.warn(f"{call_id}: no agent response to index")

        try:
            rewritten = await gateway.rewrite_demand(raw)
        except (GatewayError, EmptyOutputError) as e:
            self.exclude(call_id, "rewrite_failed", str(e))
            return None, response, skip_row(demand_id, call_id, "rewrite_failed", str(e))

        validity, reason = await gateway.check_demand_validity(rewritten)
        if validity == "invalid":
            logger.info(f"ℹ️ {demand_id} flagged invalid: {reason}")
        demand = Demand(
            demand_id=demand_id,
            call_id=call_id,
            raw_utterances=raw,
            rewritten=rewritten,
            validity=validity,
            validity_reason=reason,
        )
        return demand, response, None

    async def run(self) -> StageOutcome:
        inputs = self.upstream_paths("anonymize", TRANSCRIPT_SUFFIX)
        logger.info(f"🔍 Extracting demands from {len(inputs)} call(s)")
        results = await self.for_each_call(inputs, self._process)

        demands = [d.model_dump(exclude={"embedding"}) for d, _, _ in results if d is not None]
        responses = [r.model_dump() for _, r, _ in results if r is not None]
        skipped = [s for _, _, s in results if s is not None]

        outputs = [
            write_jsonl(self.stage_dir / DEMANDS_FILE, demands),
            write_jsonl(self.stage_dir / RESPONSES_FILE, responses),
            write_jsonl(self.stage_dir / SKIPPED_FILE, skipped),
        ]
        invalid = sum(1 for d in demands if d["validity"] == "invalid")
        logger.info(f"✅ {len(demands)} demand(s), {len(responses)} response(s), {invalid} flagged invalid")
        return StageOutcome(work_items=len(inputs), output_paths=[self.relative(p) for p in outputs])


class EmbedStage(BaseStage):
    """Embed rewritten demands (customer persona) and agent responses (agent persona)"""

    name = "embed"
    reads = ("extract",)
    config_keys = ("embed",)

    async def run(self) -> StageOutcome:
        demands = [Demand(**row) for row in read_jsonl(self.upstream_file("extract", DEMANDS_FILE))]
        responses = [AgentResponse(**row) for row in read_jsonl(self.upstream_file("extract", RESPONSES_FILE))]
        gateway = self.system.gateway

        jobs: List[Tuple[str, str, str, str]] = [(d.demand_id, "customer", d.call_id, d.rewritten) for d in demands]
        jobs += [(r.response_id, "agent", r.call_id, r.text) for r in responses]
        logger.info(f"🔢 Embedding {len(demands)} demand(s) and {len(responses)} response(s)")

        async def _one(job: Tuple[str, str, str, str]):
            entry_id, persona, call_id, text = job
            try:
                vector = await gateway.embed(text)
            except GatewayError as e:
                return job, None, str(e)
            return job, vector, ""

        rows, skipped = [], []
        for (entry_id, persona, call_id, text), vector, error in await self.for_each_call(jobs, _one):
            if vector is None:
                self.exclude(call_id, "embed_failed", f"{entry_id}: {error}")
                if persona == "customer":
                    skipped.append(skip_row(entry_id, call_id, "embed_failed", error))
                continue
            rows.append(
                {
                    "entry_id": entry_id,
                    "persona": persona,
                    "call_id": call_id,
                    "text": text,
                    "values": vector.values,
                    "model_tag": vector.model_tag,
                }
            )

        outputs = [
            write_jsonl(self.stage_dir / VECTORS_FILE, rows),
            write_jsonl(self.stage_dir / SKIPPED_FILE, skipped),
        ]
        return StageOutcome(work_items=len(jobs), output_paths=[self.relative(p) for p in outputs])


def vector_entries(path: Path) -> List[VectorEntry]:
    return [
        VectorEntry(
            entry_id=row["entry_id"],
            text=row["text"],
            persona=row["persona"],
            call_id=row["call_id"],
            embedding=EmbeddingVector(values=row["values"], model_tag=row["model_tag"]),
        )
        for row in read_jsonl(path)
    ]


class IndexStage(BaseStage):
    """Load every embedded entry into the exact cosine index and persist it"""

    name = "index"
    reads = ("embed",)
    config_keys = ("embed",)

    async def run(self) -> StageOutcome:
        entries = sorted(vector_entries(self.upstream_file("embed", VECTORS_FILE)), key=lambda e: e.entry_id)
        index = VectorIndex(self.config.embed.dim)
        for entry in entries:
            index.insert(entry)
        path = index.persist(self.stage_dir / INDEX_FILE)
        return StageOutcome(work_items=len(entries), output_paths=[self.relative(path)])


class GenerateStage(BaseStage):
    """Retrieve top-N agent responses per demand, refine, synthesize, format"""

    name = "generate"
    reads = ("extract", "embed", "index")
    config_keys = ("top_n", "generation", "llm", "search", "instruct_templates")

    def extra_input_files(self) -> List[Path]:
        return [Path(self.config.instruct_templates)] if self.config.instruct_templates else []

    def load_demands(self) -> List[Demand]:
        vectors = {
            row["entry_id"]: row["values"]
            for row in read_jsonl(self.upstream_file("embed", VECTORS_FILE))
            if row["persona"] == "customer"
        }
        demands = []
        for row in read_jsonl(self.upstream_file("extract", DEMANDS_FILE)):
            demand = Demand(**row)
            # demands without a vector are already in the embed skip ledger
            if demand.demand_id in vectors:
                demands.append(demand.model_copy(update={"embedding": vectors[demand.demand_id]}))
        return sorted(demands, key=lambda d: d.demand_id)

    async def run(self) -> StageOutcome:
        index = VectorIndex.load(self.upstream_file("index", INDEX_FILE), expected_dim=self.config.embed.dim)
        demands = self.load_demands()
        logger.info(f"🔍 Generating pairs for {len(demands)} demand(s), N={self.config.top_n}")

        result = await build_pairs(
            demands,
            index,
            self.system.gateway,
            self.config.top_n,
            searcher=self.system.searcher,
            exclude_same_call=self.config.search.exclude_same_call,
            max_concurrent_calls=self.config.max_concurrent_calls,
        )

        records, skipped = [], list(result.skipped)
        templates = self.system.instruction_templates
        for pair in result.pairs:
            try:
                records.append(
                    format_instruct(pair, templates, self.config.generation.seed, len(records), settings.PIPELINE_VERSION)
                )
            except RecordInvariantError as e:
                skipped.append(skip_row(pair.demand_id, pair.call_id, "record_invariant", str(e)))
        for row in skipped:
            self.exclude(row["call_id"], row["reason"], row.get("detail", ""))

        outputs = [
            atomic_write_bytes(self.stage_dir / DATASET_FILE, encode_instruct_jsonl(records, self.config.top_n)),
            write_jsonl(self.stage_dir / AUDIT_FILE, result.audit),
            write_jsonl(self.stage_dir / SKIPPED_FILE, skipped),
        ]
        logger.info(f"💾 Wrote {len(records)} instruct record(s)")
        return StageOutcome(work_items=len(demands), output_paths=[self.relative(p) for p in outputs])
