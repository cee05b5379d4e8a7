import os
from dotenv import load_dotenv

try:
    load_dotenv(".env", override=False)
except Exception:
    pass  # no .env in CI or read-only checkouts


class Settings:
    # API Keys
    API_KEY = os.getenv("C2I_API_KEY")

    # Model Configurations
    CHAT_MODEL = os.getenv("C2I_CHAT_MODEL", "gpt-3.5-turbo")
    EMBEDDING_MODEL = os.getenv("C2I_EMBED_MODEL", "text-embedding-ada-002")

    # Logging
    LOG_DIR = os.getenv("C2I_LOG_DIR")
    LOG_LEVEL = os.getenv("C2I_LOG_LEVEL", "INFO")

    # Versioning stamped into manifests and dataset records
    PIPELINE_VERSION = "1.0.0"

    def auth_headers(self) -> dict:
        """Authorization header for HTTP backends, empty without a key"""
        if not self.API_KEY:
            return {}
        return {"Authorization": f"Bearer {self.API_KEY}"}

    def validate(self, config) -> None:
        """Check that every non-mock backend has what it needs to connect"""
        missing = []
        if config.asr.backend == "http" and not config.asr.endpoint:
            missing.append("asr.endpoint")
        if config.asr.backend == "external_command" and not config.asr.command:
            missing.append("asr.command")
        for section in ("llm", "embed"):
            sub = getattr(config, section)
            if sub.backend == "http" and not sub.endpoint:
                missing.append(f"{section}.endpoint")
            if sub.backend == "openai" and not self.API_KEY:
                missing.append("C2I_API_KEY")
        if config.search.backend == "http" and not config.search.endpoint:
            missing.append("search.endpoint")

        if missing:
            from core.errors import ConfigError
            raise ConfigError(missing[0], f"Missing settings: {', '.join(sorted(set(missing)))}")


settings = Settings()
