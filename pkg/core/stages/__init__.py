from .base_stage import BaseStage, StageOutcome
from .audio_stages import IngestStage, IvrStage
from .text_stages import AnonymizeStage, AsrStage, CleanStage
from .qa_stages import EmbedStage, ExtractStage, GenerateStage, IndexStage
from .validation_stage import ValidateStage

STAGE_CLASSES = {
    stage.name: stage
    for stage in (
        IngestStage,
        IvrStage,
        AsrStage,
        CleanStage,
        AnonymizeStage,
        ExtractStage,
        EmbedStage,
        IndexStage,
        GenerateStage,
        ValidateStage,
    )
}

__all__ = [
    "BaseStage",
    "StageOutcome",
    "IngestStage",
    "IvrStage",
    "AsrStage",
    "CleanStage",
    "AnonymizeStage",
    "ExtractStage",
    "EmbedStage",
    "IndexStage",
    "GenerateStage",
    "ValidateStage",
    "STAGE_CLASSES",
]
