# [file name]: core/llm/gateway.py
import asyncio
import logging
import math
import time
from typing import Any, Dict, List, Optional, Sequence, Tuple

import backoff

from core.errors import BackendUnavailableError, DimensionError, EmptyOutputError, GatewayError
from core.llm import mock_rules
from core.llm.backends import ChatBackend, EmbeddingBackend
from core.prompts.prompt_templates import PromptTemplates
from models.dataset_models import ChatExchange, EmbeddingVector, PromptTemplate
from models.pipeline_models import EmbedConfig, LlmConfig
from utils.helpers import canonical_json, digest_text, message_obj_to_dict

logger = logging.getLogger(__name__)

_QUOTES = "\"'“”‘’«»`"


def _strip_output(text: str) -> str:
    text = (text or "").strip()
    while len(text) >= 2 and text[0] in _QUOTES and text[-1] in _QUOTES:
        text = text[1:-1].strip()
    return text


class LlmGateway:
    """Shared client for chat and embedding backends.

    Every call goes through a request semaphore and exponential backoff with
    full jitter; each chat call is recorded as a ChatExchange for provenance.
    """

    def __init__(
        self,
        chat_backend: ChatBackend,
        embed_backend: EmbeddingBackend,
        templates: PromptTemplates,
        llm_settings: LlmConfig,
        embed_settings: EmbedConfig,
        max_concurrent_requests: int = 8,
        top_n: int = 3,
    ):
        self.chat_backend = chat_backend
        self.embed_backend = embed_backend
        self.templates = templates
        self.llm_settings = llm_settings
        self.embed_settings = embed_settings
        self.max_concurrent_requests = max_concurrent_requests
        self.top_n = top_n
        self.exchanges: List[ChatExchange] = []
        self._semaphores: Dict[int, asyncio.Semaphore] = {}

    def _semaphore(self) -> asyncio.Semaphore:
        loop_id = id(asyncio.get_running_loop())
        if loop_id not in self._semaphores:
            self._semaphores[loop_id] = asyncio.Semaphore(self.max_concurrent_requests)
        return self._semaphores[loop_id]

    def _template(self, template: Optional[PromptTemplate], configured_id: str) -> PromptTemplate:
        return template if template is not None else self.templates.get(configured_id)

    async def _with_retries(self, label: str, func, *args):
        """Run a blocking backend call in the executor with bounded retries.

        Returns (result, attempts). Raises GatewayError carrying the last error.
        """
        attempts = 0
        loop = asyncio.get_running_loop()
        settings = self.llm_settings

        @backoff.on_exception(
            backoff.expo,
            BackendUnavailableError,
            max_tries=settings.max_attempts,
            factor=settings.backoff_base_s,
            max_value=settings.backoff_max_s,
            jitter=backoff.full_jitter,
            on_backoff=lambda d: logger.warning(
                f"⚠️ {label}: attempt {d['tries']} failed, retrying in {d['wait']:.2f}s"
            ),
        )
        async def _call():
            nonlocal attempts
            attempts += 1
            async with self._semaphore():
                return await loop.run_in_executor(None, func, *args)

        try:
            return await _call(), attempts
        except BackendUnavailableError as e:
            logger.error(f"❌ {label}: giving up after {attempts} attempt(s): {e}")
            raise GatewayError(label, attempts, e)

    async def complete(
        self,
        template: PromptTemplate,
        values: Dict[str, Any],
        rendered_values: Optional[Dict[str, str]] = None,
        request_id: Optional[str] = None,
    ) -> ChatExchange:
        rendered_values = rendered_values or {k: str(v) for k, v in values.items()}
        messages = PromptTemplates.render(template, **rendered_values)
        wire = [message_obj_to_dict(m) for m in messages]
        request_id = request_id or f"{template.template_id}:{digest_text(canonical_json(wire))[:16]}"

        started = time.perf_counter()
        exchange = ChatExchange(
            request_id=request_id,
            template_id=template.template_id,
            template_version=template.version,
            rendered_messages=wire,
        )
        try:
            text, attempts = await self._with_retries(
                template.template_id, self.chat_backend.complete, messages, template, values
            )
        except GatewayError as e:
            exchange.attempt_count = e.attempts
            exchange.error = str(e.last_error)
            exchange.latency_ms = (time.perf_counter() - started) * 1000.0
            self.exchanges.append(exchange)
            raise

        exchange.text = _strip_output(text)
        exchange.attempt_count = attempts
        exchange.latency_ms = (time.perf_counter() - started) * 1000.0
        self.exchanges.append(exchange)
        if not exchange.text:
            raise EmptyOutputError(f"{template.template_id} returned empty output")
        return exchange

    async def rewrite_demand(self, customer_utterances: str, template: Optional[PromptTemplate] = None) -> str:
        if not customer_utterances or not customer_utterances.strip():
            raise ValueError("rewrite_demand needs non-empty customer utterances")
        template = self._template(template, self.llm_settings.demand_template)
        exchange = await self.complete(template, {"utterances": customer_utterances.strip()})
        return exchange.text

    async def refine_response(self, agent_response: str, demand: str, template: Optional[PromptTemplate] = None) -> str:
        if not agent_response.strip() or not demand.strip():
            raise ValueError("refine_response needs a non-empty response and demand")
        template = self._template(template, self.llm_settings.refine_template)
        exchange = await self.complete(template, {"response": agent_response.strip(), "demand": demand.strip()})
        return exchange.text

    async def synthesize_answer(
        self,
        candidates: Sequence[str],
        demand: str,
        template: Optional[PromptTemplate] = None,
    ) -> str:
        if not candidates:
            raise ValueError("synthesize_answer needs at least one candidate")
        if len(candidates) > self.top_n:
            raise ValueError(f"synthesize_answer takes at most {self.top_n} candidates, got {len(candidates)}")
        template = self._template(template, self.llm_settings.synthesize_template)
        numbered = "\n".join(f"{i}. {c}" for i, c in enumerate(candidates, start=1))
        exchange = await self.complete(
            template,
            {"candidates": list(candidates), "demand": demand},
            rendered_values={"candidates": numbered, "demand": demand},
        )
        return exchange.text

    async def check_demand_validity(self, demand: str, template: Optional[PromptTemplate] = None) -> Tuple[str, str]:
        """Flag, never drop. Falls back to the token heuristic when the backend fails."""
        template = self._template(template, self.llm_settings.validity_template)
        try:
            exchange = await self.complete(template, {"demand": demand})
        except (GatewayError, EmptyOutputError) as e:
            logger.warning(f"⚠️ Validity check fell back to heuristic: {e}")
            return mock_rules.token_guard(demand)

        text = exchange.text
        head = text.split(":", 1)
        verdict = head[0].strip().casefold()
        reason = head[1].strip() if len(head) > 1 else ""
        if verdict.startswith("invalid"):
            return "invalid", reason or "flagged by model"
        return "valid", ""

    async def embed(self, text: str) -> EmbeddingVector:
        if not text or not text.strip():
            raise ValueError("embed needs non-empty text")
        values, _ = await self._with_retries("embed", self.embed_backend.embed, text)
        if len(values) != self.embed_settings.dim:
            raise DimensionError(self.embed_settings.dim, len(values))
        if not all(math.isfinite(v) for v in values):
            raise DimensionError(self.embed_settings.dim, len(values))
        return EmbeddingVector(values=values, model_tag=self.embed_backend.model_tag)

    def provenance(self) -> List[Dict[str, Any]]:
        return [
            {"template_id": e.template_id, "version": e.template_version, "attempts": e.attempt_count}
            for e in self.exchanges
        ]
