# [file name]: core/system_initializer.py
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from config.settings import settings
from core.anonymize import load_rules
from core.asr import AsrBackend, ExternalCommandAsrBackend, HttpAsrBackend, MockAsrBackend
from core.errors import ConfigError, PipelineError
from core.llm import (
    ChatBackend,
    EmbeddingBackend,
    HttpChatBackend,
    HttpEmbeddingBackend,
    LlmGateway,
    MockChatBackend,
    MockEmbeddingBackend,
    OpenAIChatBackend,
    OpenAIEmbeddingBackend,
)
from core.prompts import PromptTemplates, load_instruction_templates
from core.text import TranscriptCleaner
from database.search_client import HttpSearchClient
from database.workspace_manifest import ManifestStore
from interfaces.monitoring import RunMonitor
from models.dataset_models import PiiRule
from models.pipeline_models import PipelineConfig

logger = logging.getLogger(__name__)

# llm config key -> task its template must serve
TEMPLATE_TASKS = {
    "demand_template": "rewrite_demand",
    "refine_template": "refine_response",
    "synthesize_template": "synthesize_answer",
    "validity_template": "check_validity",
}


class PipelineSystem:
    """Wires backends, gateway, rules and stores for one workspace"""

    def __init__(self, config: PipelineConfig):
        self.config = config
        self.workspace_dir = Path(config.workspace_dir)
        self.monitor = RunMonitor()
        self.manifest = ManifestStore(self.workspace_dir)

        self.asr_backend: Optional[AsrBackend] = None
        self.chat_backend: Optional[ChatBackend] = None
        self.embed_backend: Optional[EmbeddingBackend] = None
        self.templates: Optional[PromptTemplates] = None
        self.gateway: Optional[LlmGateway] = None
        self.searcher: Optional[HttpSearchClient] = None
        self.pii_rules: List[PiiRule] = []
        self.cleaner: Optional[TranscriptCleaner] = None
        self.instruction_templates: List[Tuple[str, str]] = []
        self.initialized = False

    def _build_asr_backend(self) -> AsrBackend:
        asr = self.config.asr
        if asr.backend == "external_command":
            return ExternalCommandAsrBackend(asr.command, asr.timeout_s)
        if asr.backend == "http":
            return HttpAsrBackend(asr.endpoint, asr.timeout_s, settings.auth_headers())
        return MockAsrBackend.from_file(asr.fixtures)

    def _build_chat_backend(self) -> ChatBackend:
        llm = self.config.llm
        if llm.backend == "http":
            return HttpChatBackend(llm.endpoint, llm.model, llm.temperature, llm.timeout_s, settings.auth_headers())
        if llm.backend == "openai":
            return OpenAIChatBackend(
                llm.model or settings.CHAT_MODEL, settings.API_KEY, llm.endpoint, llm.temperature, llm.timeout_s
            )
        return MockChatBackend(self.config.language)

    def _build_embed_backend(self) -> EmbeddingBackend:
        embed = self.config.embed
        if embed.backend == "http":
            return HttpEmbeddingBackend(embed.endpoint, embed.model, self.config.llm.timeout_s, settings.auth_headers())
        if embed.backend == "openai":
            return OpenAIEmbeddingBackend(embed.model or settings.EMBEDDING_MODEL, settings.API_KEY, embed.endpoint)
        return MockEmbeddingBackend(embed.dim, embed.seed)

    async def initialize(self) -> bool:
        """Build every component; configuration problems raise ConfigError"""
        try:
            settings.validate(self.config)
            self.workspace_dir.mkdir(parents=True, exist_ok=True)

            self.asr_backend = self._build_asr_backend()
            self.chat_backend = self._build_chat_backend()
            self.embed_backend = self._build_embed_backend()

            self.templates = PromptTemplates.load(self.config.llm.prompt_dir)
            for key, task in TEMPLATE_TASKS.items():
                template = self.templates.get(getattr(self.config.llm, key))
                if template.task != task:
                    raise ConfigError(f"llm.{key}", f"Template {template.template_id} is a {template.task} template, expected {task}")

            self.gateway = LlmGateway(
                self.chat_backend,
                self.embed_backend,
                self.templates,
                self.config.llm,
                self.config.embed,
                max_concurrent_requests=self.config.max_concurrent_requests,
                top_n=self.config.top_n,
            )
            if self.config.search.backend == "http":
                self.searcher = HttpSearchClient(
                    self.config.search.endpoint, self.config.embed.dim, headers=settings.auth_headers()
                )

            self.pii_rules = load_rules(self.config.pii_rules)
            self.cleaner = TranscriptCleaner(self.config.cleaning, self.config.language)
            self.instruction_templates = load_instruction_templates(self.config.instruct_templates)
        except PipelineError as e:
            logger.error(f"❌ Pipeline initialization failed: {e}")
            if isinstance(e, ConfigError):
                raise
            raise ConfigError("config", str(e))

        self.initialized = True
        logger.info(
            f"✅ Pipeline ready: asr={self.asr_backend.kind}, llm={self.chat_backend.kind}, "
            f"embed={self.embed_backend.kind}, search={self.config.search.backend}"
        )
        return True

    def _workspace_writable(self) -> bool:
        try:
            self.workspace_dir.mkdir(parents=True, exist_ok=True)
            fd, marker = tempfile.mkstemp(dir=self.workspace_dir, prefix=".write_check_")
            os.close(fd)
            os.unlink(marker)
            return True
        except OSError:
            return False

    async def health_check(self) -> Dict[str, Any]:
        manifest_status: Dict[str, Any]
        try:
            manifest = self.manifest.load()
            manifest_status = {
                "ok": True,
                "completed_stages": self.manifest.completed_stages(),
                "records": len(manifest.stage_records),
            }
        except PipelineError as e:
            manifest_status = {"ok": False, "error": str(e)}

        return {
            "initialized": self.initialized,
            "tool_version": settings.PIPELINE_VERSION,
            "backends": {
                "asr": self.config.asr.backend,
                "llm": self.config.llm.backend,
                "embed": self.config.embed.backend,
                "search": self.config.search.backend,
            },
            "workspace": {"path": str(self.workspace_dir), "writable": self._workspace_writable()},
            "manifest": manifest_status,
            "monitor": self.monitor.get_health_report(),
        }

    async def cleanup(self):
        if self.gateway is not None and self.gateway.exchanges:
            logger.debug(f"🧹 {len(self.gateway.exchanges)} chat exchange(s) this run")
        self.initialized = False
