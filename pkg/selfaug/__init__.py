"""Selfaug: speaker-embedding self-augmentation for personal voice activity detection.

This package provides tools for:
- Keyframe selection from unlabeled segments by cosine similarity
- One-shot fusion and residual-anchored long-term adaptation of the reference
- A similarity-threshold personal VAD detector and its metrics
- A seeded synthetic session simulator, file formats and experiment sweeps
"""

__version__ = "0.1.0"

from selfaug.augmentation import (
    AdaptationState,
    AdaptationTrace,
    fixed_point,
    fuse_add,
    fuse_concat,
    long_term_update,
    naive_iterative_update,
    run_adaptation,
)
from selfaug.detector import DetectionResult, decide_frame, decide_segment
from selfaug.embedding import EmbeddingVector, cosine_similarity, l2_normalize
from selfaug.errors import SelfAugError
from selfaug.log import configure_default_logging
from selfaug.metrics import ConfusionMatrix, MetricsReport, average_precision, confusion, evaluate
from selfaug.models import (
    AdaptationConfig,
    DetectorConfig,
    FrameLabel,
    FusionKind,
    FusionRule,
    RunConfig,
    SelectionConfig,
    SimulationConfig,
)
from selfaug.segment import SegmentFrames
from selfaug.selection import SelectionResult, select_keyframe
from selfaug.simulate import SimulatedSession, generate_session

configure_default_logging()

__all__ = [
    "__version__",
    # Vectors and segments
    "EmbeddingVector",
    "SegmentFrames",
    "cosine_similarity",
    "l2_normalize",
    # Selection and augmentation
    "SelectionResult",
    "select_keyframe",
    "AdaptationState",
    "AdaptationTrace",
    "fixed_point",
    "fuse_add",
    "fuse_concat",
    "long_term_update",
    "naive_iterative_update",
    "run_adaptation",
    # Detection and metrics
    "DetectionResult",
    "decide_frame",
    "decide_segment",
    "ConfusionMatrix",
    "MetricsReport",
    "average_precision",
    "confusion",
    "evaluate",
    # Simulation
    "SimulatedSession",
    "generate_session",
    # Models
    "AdaptationConfig",
    "DetectorConfig",
    "FrameLabel",
    "FusionKind",
    "FusionRule",
    "RunConfig",
    "SelectionConfig",
    "SimulationConfig",
    # Errors
    "SelfAugError",
]
