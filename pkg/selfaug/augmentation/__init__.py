"""Keyframe fusion and long-term adaptation of the reference embedding."""

from selfaug.augmentation.adaptation import run_adaptation
from selfaug.augmentation.fusion import contraction_factor, fixed_point, fuse_add, fuse_concat
from selfaug.augmentation.state import (
    AdaptationState,
    AdaptationTrace,
    RecordStatus,
    TraceRecord,
)
from selfaug.augmentation.updates import (
    apply_rule,
    long_term_update,
    naive_iterative_update,
    one_shot_update,
)

__all__ = [
    "AdaptationState",
    "AdaptationTrace",
    "RecordStatus",
    "TraceRecord",
    "apply_rule",
    "contraction_factor",
    "fixed_point",
    "fuse_add",
    "fuse_concat",
    "long_term_update",
    "naive_iterative_update",
    "one_shot_update",
    "run_adaptation",
]
