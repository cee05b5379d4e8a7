# [file name]: core/stages/validation_stage.py
import logging
from typing import List

from config.constants import DATASET_FILE
from core.anonymize import leak_scan
from core.errors import ReleaseGateError
from core.qa import decode_instruct_jsonl, encode_instruct_jsonl
from core.stages.base_stage import BaseStage, StageOutcome
from core.stages.qa_stages import DEMANDS_FILE, SKIPPED_FILE, VECTORS_FILE
from core.validation import check_coherence, check_redundancy, compile_report, curate
from models.dataset_models import InstructRecord
from utils.helpers import atomic_write_bytes, atomic_write_text, read_jsonl

logger = logging.getLogger(__name__)

REPORT_FILE = "report.json"
SAMPLE_FILE = "review_sample.jsonl"
CURATED_FILE = "curated.jsonl"


class ValidateStage(BaseStage):
    """Coherence, redundancy, completeness and leak gates over the final dataset.

    Never rewrites the dataset; curation goes to a separate file.
    """

    name = "validate"
    reads = ("extract", "embed", "generate")
    config_keys = ("validation", "redundancy_threshold", "top_n", "pii_rules")

    async def _question_vectors(self, records: List[InstructRecord]) -> List[List[float]]:
        stored = {
            row["entry_id"]: row["values"]
            for row in read_jsonl(self.upstream_file("embed", VECTORS_FILE))
            if row["persona"] == "customer"
        }
        vectors = []
        for record in records:
            values = stored.get(record.meta.demand_id)
            if values is None:
                values = (await self.system.gateway.embed(record.input)).values
            vectors.append(values)
        return vectors

    async def run(self) -> StageOutcome:
        settings = self.config.validation
        dataset_path = self.upstream_file("generate", DATASET_FILE)
        records = decode_instruct_jsonl(dataset_path.read_bytes(), self.config.top_n)
        logger.info(f"🔍 Validating {len(records)} record(s)")

        demands = read_jsonl(self.upstream_file("extract", DEMANDS_FILE))
        extract_skipped = read_jsonl(self.upstream_file("extract", SKIPPED_FILE))
        ledgers = [
            extract_skipped,
            read_jsonl(self.upstream_file("embed", SKIPPED_FILE)),
            read_jsonl(self.upstream_file("generate", SKIPPED_FILE)),
        ]

        coherence = check_coherence(records, settings.min_output_tokens)
        redundant = check_redundancy(records, await self._question_vectors(records), self.config.redundancy_threshold)
        leaks = leak_scan(records, self.system.pii_rules)

        sample_path = self.stage_dir / SAMPLE_FILE
        report, _ = compile_report(
            records,
            demands_in=len(demands) + len(extract_skipped),
            skipped_ledgers=ledgers,
            coherence=coherence,
            redundant=redundant,
            leaks=leaks,
            invalid_demand_count=sum(1 for d in demands if d.get("validity") == "invalid"),
            sample_size=settings.sample_size,
            seed=settings.seed,
            sample_path=sample_path,
        )
        report = report.model_copy(update={"sample_path": self.relative(sample_path)})
        report_path = atomic_write_text(self.stage_dir / REPORT_FILE, report.model_dump_json(indent=2) + "\n")
        outputs = [report_path, sample_path]

        if settings.drop_flagged:
            kept = curate(records, coherence, redundant)
            outputs.append(atomic_write_bytes(self.stage_dir / CURATED_FILE, encode_instruct_jsonl(kept)))
            logger.info(f"🧹 Curated dataset keeps {len(kept)} of {len(records)} record(s)")

        logger.info(
            f"📊 coherent {report.coherent}/{report.total_records}, redundant pairs {len(report.flagged_redundant)}, "
            f"leaks {report.leak_violations}, invalid demands {report.invalid_demand_count}"
        )
        if report.leak_violations:
            raise ReleaseGateError(3, f"{report.leak_violations} PII leak(s) in the dataset")
        failures = len(report.coherence_failures)
        if report.total_records and failures / report.total_records > settings.coherence_tolerance:
            raise ReleaseGateError(
                4,
                f"{failures} of {report.total_records} record(s) failed coherence "
                f"(tolerance {settings.coherence_tolerance:.2%})",
            )
        return StageOutcome(work_items=len(records), output_paths=[self.relative(p) for p in outputs])
