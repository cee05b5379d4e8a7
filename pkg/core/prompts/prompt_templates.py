# [file name]: core/prompts/prompt_templates.py
import logging
import string
from pathlib import Path
from typing import Any, Dict, List, Optional, Set, Tuple, Union

import yaml
from langchain_core.messages import AIMessage, BaseMessage, HumanMessage, SystemMessage

from config.constants import DEFAULT_INSTRUCTION_TEMPLATES
from core.errors import ConfigError, TemplateError
from models.dataset_models import PromptTemplate

logger = logging.getLogger(__name__)

BUILTIN_TEMPLATE_DIR = Path(__file__).parent / "templates"
# placeholders each task may use; rendering supplies exactly these
TASK_PLACEHOLDERS: Dict[str, Set[str]] = {
    "rewrite_demand": {"utterances"},
    "refine_response": {"response", "demand"},
    "synthesize_answer": {"candidates", "demand"},
    "check_validity": {"demand"},
}


def _placeholders(text: str) -> List[str]:
    return [name for _, name, _, _ in string.Formatter().parse(text) if name]


class PromptTemplates:
    """Registry of versioned chat prompt templates, keyed `<task>.<version>`"""

    def __init__(self, templates: Dict[str, PromptTemplate]):
        self.templates = templates

    @staticmethod
    def parse_template(template_id: str, data: Dict[str, Any]) -> PromptTemplate:
        system_text = data.get("system", "") or ""
        user_text = data.get("user", "") or ""
        if not user_text.strip():
            raise TemplateError(template_id, ["user"])

        task = str(data.get("task", template_id.rsplit(".", 1)[0]))
        if task not in TASK_PLACEHOLDERS:
            raise ConfigError("llm.prompt_dir", f"Template {template_id} names unknown task '{task}'")
        names = _placeholders(system_text) + _placeholders(user_text)
        unknown = sorted(set(names) - TASK_PLACEHOLDERS[task])
        if unknown:
            raise TemplateError(template_id, unknown)

        few_shot = [(str(ex["input"]), str(ex["output"])) for ex in data.get("few_shot") or []]
        return PromptTemplate(
            template_id=template_id,
            task=task,
            version=str(data.get("version", template_id.rsplit(".", 1)[-1])),
            system_text=system_text,
            user_text=user_text,
            few_shot_examples=few_shot,
            mock_rule=data.get("mock_rule", "echo"),
            placeholders=sorted(set(names)),
        )

    @classmethod
    def load(cls, prompt_dir: Optional[Union[str, Path]] = None) -> "PromptTemplates":
        """Built-in templates, overridden by same-id files from prompt_dir"""
        templates: Dict[str, PromptTemplate] = {}
        directories = [BUILTIN_TEMPLATE_DIR] + ([Path(prompt_dir)] if prompt_dir else [])
        for directory in directories:
            for path in sorted(directory.glob("*.yaml")):
                template_id = path.name[: -len(".yaml")]
                with open(path, "r", encoding="utf-8") as f:
                    data = yaml.safe_load(f) or {}
                templates[template_id] = cls.parse_template(template_id, data)
        logger.debug(f"Loaded {len(templates)} prompt template(s)")
        return cls(templates)

    def get(self, template_id: str) -> PromptTemplate:
        if template_id not in self.templates:
            raise ConfigError("llm", f"Unknown prompt template '{template_id}'")
        return self.templates[template_id]

    @staticmethod
    def render(template: PromptTemplate, **values: str) -> List[BaseMessage]:
        """System text, few-shot turns, then the user turn"""
        missing = sorted(name for name in template.placeholders if name not in values)
        if missing:
            raise TemplateError(template.template_id, missing)

        messages: List[BaseMessage] = []
        if template.system_text.strip():
            messages.append(SystemMessage(content=template.system_text.format(**values).strip()))
        for example_input, example_output in template.few_shot_examples:
            messages.append(HumanMessage(content=example_input))
            messages.append(AIMessage(content=example_output))
        messages.append(HumanMessage(content=template.user_text.format(**values).strip()))
        return messages


def load_instruction_templates(path: Optional[Union[str, Path]] = None) -> List[Tuple[str, str]]:
    """Instruction phrasings as (template_id, text); YAML list of {id, text}"""
    if path is None:
        return list(DEFAULT_INSTRUCTION_TEMPLATES)
    with open(path, "r", encoding="utf-8") as f:
        data = yaml.safe_load(f) or []
    if not isinstance(data, list):
        raise ConfigError("instruct_templates", "Expected a list of {id, text} entries")
    templates = []
    for position, entry in enumerate(data):
        if not isinstance(entry, dict) or not entry.get("id") or not str(entry.get("text", "")).strip():
            raise ConfigError("instruct_templates", f"Entry {position} needs non-empty 'id' and 'text'")
        templates.append((str(entry["id"]), str(entry["text"]).strip()))
    return templates
