from .prompt_templates import PromptTemplates, load_instruction_templates

__all__ = ["PromptTemplates", "load_instruction_templates"]
