"""Pydantic configuration models."""

from selfaug.models.detector import DetectorConfig
from selfaug.models.fusion import (
    DEFAULT_LAMBDA,
    LAMBDA_SWEEP,
    AdaptationConfig,
    FusionKind,
    FusionRule,
)
from selfaug.models.labels import LABEL_ORDER, FrameLabel
from selfaug.models.run import RunConfig, SweepConfig, load_run_config, validate_run_config
from selfaug.models.selection import SelectionConfig
from selfaug.models.simulation import ENROLL_TAGS, SimulationConfig

__all__ = [
    "AdaptationConfig",
    "DEFAULT_LAMBDA",
    "DetectorConfig",
    "ENROLL_TAGS",
    "FrameLabel",
    "FusionKind",
    "FusionRule",
    "LABEL_ORDER",
    "LAMBDA_SWEEP",
    "RunConfig",
    "SelectionConfig",
    "SimulationConfig",
    "SweepConfig",
    "load_run_config",
    "validate_run_config",
]
