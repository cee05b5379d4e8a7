# [file name]: core/ivr/detector.py
import logging
from typing import Callable, Optional

from core.errors import IvrError
from core.ivr.features import extract_feature_windows, feature_matrix
from core.ivr.kmeans import kmeans
from models.audio_models import AudioClip, ClusterModel, IvrDecision, StereoCall
from models.pipeline_models import IvrConfig

logger = logging.getLogger(__name__)


def detect_ivr_boundary(
    model: ClusterModel,
    head_windows: int = 10,
    consec_m: int = 5,
    hop_s: float = 0.5,
) -> IvrDecision:
    """Find the first run of consec_m non-IVR windows.

    The IVR cluster is the majority cluster of the first head_windows
    assignments (tie -> cluster 0). A run starting at window 0 means the
    call has no IVR head.
    """
    if model.k != 2:
        raise IvrError(f"Boundary detection needs k=2 clusters, got k={model.k}")
    assignments = model.assignments
    if not assignments:
        raise IvrError("Cluster model has no assignments")

    head = assignments[:head_windows]
    ones = sum(1 for a in head if a == 1)
    ivr_cluster = 1 if ones > len(head) - ones else 0

    boundary = None
    run = 0
    for t, cluster in enumerate(assignments):
        run = run + 1 if cluster != ivr_cluster else 0
        if run == consec_m:
            boundary = t - consec_m + 1
            break

    if boundary is None:
        return IvrDecision(ivr_cluster=ivr_cluster, inertia=model.inertia)
    return IvrDecision(
        boundary_window=boundary,
        boundary_s=boundary * hop_s,
        ivr_cluster=ivr_cluster,
        trimmed=boundary > 0,
        inertia=model.inertia,
    )


def trim_ivr(
    call: StereoCall,
    decision: IvrDecision,
    hop_s: float = 0.5,
    on_warning: Optional[Callable[[str], None]] = None,
) -> StereoCall:
    """Drop the same number of leading samples from both channels"""
    if decision.boundary_window is None:
        message = f"No IVR transition found for {call.call_id}; passing through untrimmed"
        logger.warning(f"⚠️ {message}")
        if on_warning is not None:
            on_warning(message)
        return call

    boundary_s = decision.boundary_s if decision.boundary_s is not None else decision.boundary_window * hop_s
    if boundary_s > call.duration_s:
        raise IvrError(
            f"Boundary {boundary_s:.3f}s lies beyond the {call.duration_s:.3f}s call {call.call_id}"
        )

    cut = int(round(boundary_s * call.sample_rate_hz))
    if cut == 0:
        return call
    logger.debug(f"✂️ Trimming {cut} samples ({boundary_s:.2f}s) from {call.call_id}")
    return StereoCall(
        call_id=call.call_id,
        agent=call.agent.with_samples(call.agent.samples[cut:]),
        customer=call.customer.with_samples(call.customer.samples[cut:]),
    )


def detect_call_ivr(clip: AudioClip, settings: IvrConfig, call_id: str = "") -> IvrDecision:
    """Full detection on one agent channel: windows, features, k-means, scan"""
    windows = extract_feature_windows(clip, settings.window_s, settings.hop_s)
    if len(windows) < settings.k:
        logger.debug(f"{call_id}: {len(windows)} window(s), too few to cluster")
        return IvrDecision(call_id=call_id)
    model = kmeans(
        feature_matrix(windows),
        k=settings.k,
        seed=settings.seed,
        max_iter=settings.max_iter,
        tol=settings.tol,
    )
    decision = detect_ivr_boundary(model, settings.head_windows, settings.consec_m, settings.hop_s)
    return decision.model_copy(update={"call_id": call_id})
