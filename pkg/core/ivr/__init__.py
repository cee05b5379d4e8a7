from .features import extract_feature_windows, feature_matrix
from .kmeans import kmeans
from .detector import detect_ivr_boundary, trim_ivr, detect_call_ivr

__all__ = [
    "extract_feature_windows",
    "feature_matrix",
    "kmeans",
    "detect_ivr_boundary",
    "trim_ivr",
    "detect_call_ivr",
]
