import logging
from typing import Dict, List, Optional

logger = logging.getLogger(__name__)


class RunMonitor:
    """Per-stage warnings, errors and exclusions collected for the run report"""

    def __init__(self):
        self.warnings: Dict[str, List[str]] = {}
        self.exclusions: Dict[str, List[Dict[str, str]]] = {}
        self.error_log: List[Dict[str, str]] = []

    def begin_stage(self, stage: str):
        self.warnings[stage] = []
        self.exclusions[stage] = []

    def warn(self, stage: str, message: str):
        self.warnings.setdefault(stage, []).append(message)

    def exclude(self, stage: str, call_id: str, reason: str, detail: str = ""):
        """Record a call dropped from this stage onward"""
        entry = {"call_id": call_id, "reason": reason}
        if detail:
            entry["detail"] = detail
        self.exclusions.setdefault(stage, []).append(entry)
        logger.warning(f"⚠️ [{stage}] excluding {call_id}: {reason}{f' ({detail})' if detail else ''}")

    def log_error(self, stage: str, error_type: str, message: str):
        self.error_log.append({"stage": stage, "type": error_type, "message": message})
        logger.error(f"❌ [{stage}] {error_type}: {message}")

    def stage_warnings(self, stage: str) -> List[str]:
        return list(self.warnings.get(stage, []))

    def stage_exclusions(self, stage: str) -> List[Dict[str, str]]:
        return sorted(self.exclusions.get(stage, []), key=lambda e: (e["call_id"], e["reason"]))

    def get_health_report(self, stage: Optional[str] = None) -> Dict:
        stages = [stage] if stage else sorted(set(self.warnings) | set(self.exclusions))
        return {
            "error_count": len(self.error_log),
            "recent_errors": self.error_log[-5:],
            "warnings": {s: len(self.warnings.get(s, [])) for s in stages},
            "exclusions": {s: len(self.exclusions.get(s, [])) for s in stages},
        }
