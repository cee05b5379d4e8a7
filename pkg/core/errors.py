# [file name]: core/errors.py
from typing import List, Optional, Tuple


class PipelineError(Exception):
    """Base class for every pipeline failure"""


class ConfigError(PipelineError):
    def __init__(self, key: str, message: str):
        self.key = key
        self.message = message
        super().__init__(f"{key}: {message}")


class AudioDecodeError(PipelineError):
    pass


class DenoiserError(PipelineError):
    def __init__(self, message: str, stderr: str = ""):
        self.stderr = stderr
        super().__init__(f"{message}: {stderr.strip()}" if stderr else message)


class FeatureExtractionError(PipelineError):
    pass


class ClusteringError(PipelineError):
    pass


class IvrError(PipelineError):
    pass


class AsrBackendError(PipelineError):
    """Backend unreachable, timed out or exited abnormally; retried"""


class AsrOutputError(PipelineError):
    def __init__(self, message: str, offset: Optional[int] = None, index: Optional[int] = None):
        self.offset = offset
        self.index = index
        super().__init__(message)


class TranscriptError(PipelineError):
    pass


class PiiRuleError(PipelineError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class RedactionError(PipelineError):
    pass


class BackendUnavailableError(PipelineError):
    """Transient chat/embedding backend failure; retried"""


class GatewayError(PipelineError):
    def __init__(self, template_id: str, attempts: int, last_error: Exception):
        self.template_id = template_id
        self.attempts = attempts
        self.last_error = last_error
        super().__init__(f"{template_id} failed after {attempts} attempt(s): {last_error}")


class EmptyOutputError(PipelineError):
    pass


class TemplateError(PipelineError):
    def __init__(self, template_id: str, missing: List[str]):
        self.template_id = template_id
        self.missing = missing
        super().__init__(f"Template {template_id} has unresolved placeholders: {', '.join(missing)}")


class DimensionError(PipelineError):
    def __init__(self, expected: int, actual: int):
        self.expected = expected
        self.actual = actual
        super().__init__(f"Expected vector of dimension {expected}, got {actual}")


class VectorStoreError(PipelineError):
    pass


class IndexFormatError(VectorStoreError):
    pass


class RecordInvariantError(PipelineError, ValueError):
    pass


class InstructDecodeError(PipelineError):
    def __init__(self, errors: List[Tuple[int, str]]):
        self.errors = errors
        summary = "; ".join(f"line {line_no}: {message}" for line_no, message in errors[:5])
        super().__init__(f"{len(errors)} malformed line(s): {summary}")


class ExtractionError(PipelineError):
    def __init__(self, call_id: str, reason: str):
        self.call_id = call_id
        self.reason = reason
        super().__init__(f"{call_id}: {reason}")


class StageDependencyError(PipelineError):
    def __init__(self, stage: str, missing: str):
        self.stage = stage
        self.missing = missing
        super().__init__(f"Stage '{stage}' requires '{missing}', which has not completed")


class StageFailedError(PipelineError):
    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"Stage '{stage}' failed: {cause}")


class ReleaseGateError(PipelineError):
    """Validation gate tripped; carries the CLI exit code"""

    def __init__(self, exit_code: int, message: str):
        self.exit_code = exit_code
        super().__init__(message)
