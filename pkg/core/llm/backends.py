# [file name]: core/llm/backends.py
import hashlib
import logging
from functools import lru_cache
from typing import Any, Dict, List, Optional

import numpy as np
import requests
from langchain_core.messages import BaseMessage
from langchain_openai import ChatOpenAI, OpenAIEmbeddings

from core.errors import BackendUnavailableError
from core.llm import mock_rules
from models.dataset_models import PromptTemplate
from utils.helpers import message_obj_to_dict, tokenize

logger = logging.getLogger(__name__)


# --- chat ---

class ChatBackend:
    kind = "base"

    def complete(self, messages: List[BaseMessage], template: PromptTemplate, values: Dict[str, Any]) -> str:
        raise NotImplementedError


class MockChatBackend(ChatBackend):
    """Rule-based offline model; the rule comes from the template's mock_rule"""

    kind = "mock"

    def __init__(self, language: str = "pt"):
        self.language = language

    def complete(self, messages: List[BaseMessage], template: PromptTemplate, values: Dict[str, Any]) -> str:
        rule = template.mock_rule
        if rule == "intent_sentence":
            return mock_rules.intent_sentence(values["utterances"], self.language)
        if rule == "content_overlap":
            return mock_rules.content_overlap(values["response"], values["demand"], self.language)
        if rule == "identity":
            return values["response"]
        if rule == "sentence_union":
            return mock_rules.sentence_union(list(values["candidates"]))
        if rule == "first_candidate":
            return list(values["candidates"])[0]
        if rule == "token_guard":
            validity, reason = mock_rules.token_guard(values["demand"])
            return f"{validity}: {reason}" if reason else validity
        if rule == "echo":
            first = template.placeholders[0] if template.placeholders else None
            return str(values.get(first, "")) if first else messages[-1].content
        raise BackendUnavailableError(f"Unknown mock rule '{rule}'")


class HttpChatBackend(ChatBackend):
    """POST {model, messages} -> {text}"""

    kind = "http"

    def __init__(self, endpoint: str, model: Optional[str], temperature: float = 0.0,
                 timeout_s: float = 60.0, headers: Optional[Dict[str, str]] = None):
        self.endpoint = endpoint
        self.model = model
        self.temperature = temperature
        self.timeout_s = timeout_s
        self.headers = headers or {}

    def complete(self, messages: List[BaseMessage], template: PromptTemplate, values: Dict[str, Any]) -> str:
        payload = {
            "model": self.model,
            "messages": [message_obj_to_dict(m) for m in messages],
            "temperature": self.temperature,
        }
        data = _post_json(self.endpoint, payload, self.headers, self.timeout_s)
        if not isinstance(data.get("text"), str):
            raise BackendUnavailableError("Chat endpoint response lacks 'text'")
        return data["text"]


class OpenAIChatBackend(ChatBackend):
    """OpenAI-compatible endpoint through langchain's ChatOpenAI"""

    kind = "openai"

    def __init__(self, model: str, api_key: Optional[str], endpoint: Optional[str] = None,
                 temperature: float = 0.0, timeout_s: float = 60.0):
        self.llm = ChatOpenAI(
            model=model,
            temperature=temperature,
            openai_api_key=api_key,
            openai_api_base=endpoint,
            request_timeout=timeout_s,
            max_retries=0,
        )

    def complete(self, messages: List[BaseMessage], template: PromptTemplate, values: Dict[str, Any]) -> str:
        try:
            return self.llm.invoke(messages).content
        except Exception as e:
            raise BackendUnavailableError(f"OpenAI chat call failed: {e}")


# --- embeddings ---

class EmbeddingBackend:
    kind = "base"
    model_tag = "base"

    def embed(self, text: str) -> List[float]:
        raise NotImplementedError


@lru_cache(maxsize=65536)
def _hashed_unit(seed: int, key: str, dim: int) -> np.ndarray:
    digest = hashlib.sha256(f"{seed}:{key}".encode("utf-8")).digest()
    rng = np.random.default_rng(int.from_bytes(digest[:8], "little"))
    vector = rng.standard_normal(dim)
    vector.setflags(write=False)
    return vector


class MockEmbeddingBackend(EmbeddingBackend):
    """Seeded hash expander: shared words pull vectors together, identical text
    gives identical vectors, values scaled into [-1, 1]."""

    kind = "mock"

    def __init__(self, dim: int = 1536, seed: int = 0):
        self.dim = dim
        self.seed = seed
        self.model_tag = f"mock-hash-{dim}"

    def embed(self, text: str) -> List[float]:
        vector = 0.1 * _hashed_unit(self.seed, "text:" + text, self.dim)
        for token in tokenize(text):
            vector = vector + _hashed_unit(self.seed, "tok:" + token, self.dim)
        peak = float(np.max(np.abs(vector)))
        if peak > 0:
            vector = vector / peak
        return vector.tolist()


class HttpEmbeddingBackend(EmbeddingBackend):
    """POST {model, input} -> {values}"""

    kind = "http"

    def __init__(self, endpoint: str, model: str, timeout_s: float = 60.0,
                 headers: Optional[Dict[str, str]] = None):
        self.endpoint = endpoint
        self.model = model
        self.model_tag = model
        self.timeout_s = timeout_s
        self.headers = headers or {}

    def embed(self, text: str) -> List[float]:
        data = _post_json(self.endpoint, {"model": self.model, "input": text}, self.headers, self.timeout_s)
        values = data.get("values")
        if not isinstance(values, list):
            raise BackendUnavailableError("Embedding endpoint response lacks 'values'")
        return [float(v) for v in values]


class OpenAIEmbeddingBackend(EmbeddingBackend):
    kind = "openai"

    def __init__(self, model: str, api_key: Optional[str], endpoint: Optional[str] = None):
        self.model_tag = model
        self.embeddings = OpenAIEmbeddings(
            model=model,
            openai_api_key=api_key,
            openai_api_base=endpoint,
            max_retries=0,
        )

    def embed(self, text: str) -> List[float]:
        try:
            return self.embeddings.embed_query(text)
        except Exception as e:
            raise BackendUnavailableError(f"OpenAI embedding call failed: {e}")


def _post_json(endpoint: str, payload: Dict[str, Any], headers: Dict[str, str], timeout_s: float) -> Dict[str, Any]:
    try:
        response = requests.post(endpoint, json=payload, headers=headers, timeout=timeout_s)
    except requests.RequestException as e:
        raise BackendUnavailableError(f"{endpoint} unreachable: {e}")
    if response.status_code != 200:
        raise BackendUnavailableError(f"{endpoint} returned HTTP {response.status_code}")
    try:
        data = response.json()
    except ValueError as e:
        raise BackendUnavailableError(f"{endpoint} returned invalid JSON: {e}")
    if not isinstance(data, dict):
        raise BackendUnavailableError(f"{endpoint} returned a non-object body")
    return data
