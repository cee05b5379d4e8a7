# config/__init__.py
from .settings import settings
from .constants import (
    STAGE_ORDER,
    STAGE_COMMANDS,
    PLACEHOLDER_TOKENS,
    DEFAULT_FILLERS,
    NUMERAL_LEXICONS,
    DEFAULT_PII_RULES,
    DEFAULT_INSTRUCTION_TEMPLATES,
)

__all__ = [
    'settings',
    'STAGE_ORDER',
    'STAGE_COMMANDS',
    'PLACEHOLDER_TOKENS',
    'DEFAULT_FILLERS',
    'NUMERAL_LEXICONS',
    'DEFAULT_PII_RULES',
    'DEFAULT_INSTRUCTION_TEMPLATES',
]
