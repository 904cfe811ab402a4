"""Pytest configuration and fixtures."""

import numpy as np
import pytest

from selfaug.embedding import EmbeddingVector
from selfaug.models.detector import DetectorConfig
from selfaug.models.run import RunConfig
from selfaug.models.selection import SelectionConfig
from selfaug.models.simulation import SimulationConfig
from selfaug.segment import SegmentFrames
from selfaug.simulate import SimulatedSession, generate_session


def make_segment(
    rows: list[list[float]] | np.ndarray,
    activity: list[float] | np.ndarray | None = None,
    labels: list[int] | np.ndarray | None = None,
    segment_id: int = 1,
) -> SegmentFrames:
    """Build a segment from explicit frame rows (activity defaults to all speech)."""
    emb = np.asarray(rows, dtype=np.float64)
    if activity is None:
        activity = np.ones(emb.shape[0])
    return SegmentFrames(embeddings=emb, activity=activity, labels=labels, segment_id=segment_id)


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator for randomized checks."""
    return np.random.default_rng(12345)


@pytest.fixture
def small_sim_config() -> SimulationConfig:
    """Small simulation config for fast tests."""
    return SimulationConfig(
        dim=16,
        num_segments=4,
        frames_per_segment=60,
        seed=3,
    )


@pytest.fixture
def small_session(small_sim_config) -> SimulatedSession:
    """Session generated from the small config."""
    return generate_session(small_sim_config)


@pytest.fixture
def unit_enroll() -> EmbeddingVector:
    """First basis vector in three dimensions."""
    return EmbeddingVector([1.0, 0.0, 0.0])


@pytest.fixture
def acceptance_config() -> RunConfig:
    """Operating point used by the experiment trend checks."""
    return RunConfig(
        selection=SelectionConfig(threshold=0.5),
        detector=DetectorConfig(speaker_threshold=0.6),
    )
