from .backends import (
    ChatBackend,
    EmbeddingBackend,
    HttpChatBackend,
    HttpEmbeddingBackend,
    MockChatBackend,
    MockEmbeddingBackend,
    OpenAIChatBackend,
    OpenAIEmbeddingBackend,
)
from .gateway import LlmGateway

__all__ = [
    "ChatBackend",
    "EmbeddingBackend",
    "HttpChatBackend",
    "HttpEmbeddingBackend",
    "MockChatBackend",
    "MockEmbeddingBackend",
    "OpenAIChatBackend",
    "OpenAIEmbeddingBackend",
    "LlmGateway",
]
