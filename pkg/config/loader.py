import logging
from pathlib import Path
from typing import Any, Dict, Union

import yaml
from pydantic import ValidationError

from core.errors import ConfigError
from models.pipeline_models import PipelineConfig

logger = logging.getLogger(__name__)

# Optional files checked for existence after path resolution
_OPTIONAL_FILES = (
    ("pii_rules",),
    ("instruct_templates",),
    ("asr", "fixtures"),
    ("cleaning", "replacements"),
)


def _dotted(loc) -> str:
    return ".".join(str(part) for part in loc)


def _resolve(base: Path, value: Any) -> Any:
    if value is None:
        return None
    path = Path(value).expanduser()
    return path if path.is_absolute() else (base / path).resolve()


def load_config(path: Union[str, Path]) -> PipelineConfig:
    """Load a YAML pipeline config, fill defaults and enforce every invariant.

    Relative paths resolve against the directory holding the config file.
    All failures surface as ConfigError naming the offending dotted key.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError("config", f"Config file not found: {path}")

    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    except yaml.YAMLError as e:
        raise ConfigError("config", f"Unparseable YAML: {e}")
    if not isinstance(raw, dict):
        raise ConfigError("config", "Top level must be a mapping of sections")

    try:
        config = PipelineConfig.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        key = _dotted(first["loc"]) or "config"
        if first["type"] == "extra_forbidden":
            message = f"Unknown key '{key}'"
        else:
            message = first["msg"]
        # model-level validators report the section, refine to the field
        if key == "ivr" and "hop_s" in message:
            key = "ivr.hop_s"
        elif key == "audio" and "denoiser_command" in message:
            key = "audio.denoiser_command"
        raise ConfigError(key, message)

    base = path.parent.resolve()
    updates: Dict[str, Any] = {
        "input_dir": _resolve(base, config.input_dir),
        "workspace_dir": _resolve(base, config.workspace_dir),
    }
    config = config.model_copy(update=updates)
    for dotted in _OPTIONAL_FILES:
        owner = config
        for part in dotted[:-1]:
            owner = getattr(owner, part)
        value = getattr(owner, dotted[-1])
        if value is None:
            continue
        resolved = _resolve(base, value)
        if not resolved.exists():
            raise ConfigError(".".join(dotted), f"Path does not exist: {resolved}")
        setattr(owner, dotted[-1], resolved)

    if config.llm.prompt_dir is not None:
        prompt_dir = _resolve(base, config.llm.prompt_dir)
        if not prompt_dir.is_dir():
            raise ConfigError("llm.prompt_dir", f"Directory does not exist: {prompt_dir}")
        config.llm.prompt_dir = prompt_dir

    if not config.input_dir.is_dir():
        raise ConfigError("input_dir", f"Directory does not exist: {config.input_dir}")

    logger.debug(f"🔍 Loaded config from {path}")
    return config
