"""Keyframe selection against the current reference."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from selfaug.embedding import EmbeddingVector
from selfaug.errors import (
    DimensionMismatchError,
    EmptySegmentError,
    NoKeyframeError,
    ZeroVectorError,
)
from selfaug.models.selection import SelectionConfig
from selfaug.segment import SegmentFrames

# Score assigned to zero-norm frames; below every valid threshold.
UNSELECTABLE = float("-inf")


@dataclass(frozen=True)
class SelectionResult:
    """The keyframe chosen from one segment."""

    index: int
    similarity: float
    embedding: EmbeddingVector


def score_frames(segment: SegmentFrames, reference: EmbeddingVector) -> np.ndarray:
    """Cosine similarity of every frame to the reference.

    Args:
        segment: Frames to score
        reference: Reference embedding with the segment's dimension

    Returns:
        Array of shape (T,); zero-norm frames score ``-inf``

    Raises:
        DimensionMismatchError: If the reference dimension differs from the frames
        ZeroVectorError: If the reference is the zero vector
    """
    if reference.dim != segment.dim:
        raise DimensionMismatchError(segment.dim, reference.dim, what="reference")
    ref_norm = reference.norm
    if ref_norm == 0.0:
        raise ZeroVectorError("reference embedding has zero norm")

    scores = np.full(segment.num_frames, UNSELECTABLE)
    if segment.num_frames == 0:
        return scores
    norms = np.linalg.norm(segment.embeddings, axis=1)
    live = norms > 0
    dots = segment.embeddings[live] @ reference.values
    scores[live] = np.clip(dots / (norms[live] * ref_norm), -1.0, 1.0)
    return scores


def pick_keyframe(scores: np.ndarray, threshold: float) -> int | None:
    """Index of the best score at or above threshold, earliest on ties."""
    eligible = scores >= threshold
    if not np.any(eligible):
        return None
    masked = np.where(eligible, scores, UNSELECTABLE)
    # argmax returns the first maximal element
    return int(np.argmax(masked))


def select_keyframe(
    segment: SegmentFrames,
    reference: EmbeddingVector,
    cfg: SelectionConfig | None = None,
) -> SelectionResult:
    """Select the single frame most similar to the reference.

    Args:
        segment: Segment to search
        reference: Current reference embedding
        cfg: Selection threshold (inclusive) and tie-break rule

    Returns:
        SelectionResult with the frame index, its similarity and a copy of its embedding

    Raises:
        EmptySegmentError: If the segment has no frames
        NoKeyframeError: If no frame reaches the threshold
    """
    cfg = cfg or SelectionConfig()
    if segment.num_frames == 0:
        raise EmptySegmentError(f"segment {segment.segment_id} has no frames")

    scores = score_frames(segment, reference)
    index = pick_keyframe(scores, cfg.threshold)
    if index is None:
        raise NoKeyframeError(cfg.threshold, float(np.max(scores)))
    return SelectionResult(
        index=index,
        similarity=float(scores[index]),
        embedding=segment.frame(index),
    )
