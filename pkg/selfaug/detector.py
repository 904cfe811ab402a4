"""Similarity-threshold reference detector.

A deterministic stand-in for a trained personal VAD head: a frame is
non-speech when its activity is below the VAD gate, otherwise it is target
speech when its cosine similarity to the reference reaches the speaker
threshold and non-target speech when it does not.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from selfaug.embedding import EmbeddingVector
from selfaug.errors import DimensionMismatchError, EmptySegmentError
from selfaug.models.detector import DetectorConfig
from selfaug.models.labels import FrameLabel
from selfaug.segment import SegmentFrames

# Score reported when the similarity is undefined (zero-norm frame or reference).
UNDEFINED_SCORE = -1.0


@dataclass(frozen=True)
class DetectionResult:
    """Per-frame decisions and scores for one segment.

    Attributes:
        decisions: Label codes (0=NS, 1=NTSS, 2=TSS), shape (T,)
        scores: Similarity used for the decision, shape (T,)
        activity: Activity scores the gate was applied to, shape (T,)
    """

    decisions: np.ndarray
    scores: np.ndarray
    activity: np.ndarray

    def __len__(self) -> int:
        return int(self.decisions.shape[0])

    def labels(self) -> list[FrameLabel]:
        """Decisions as FrameLabel values."""
        return [FrameLabel(int(v)) for v in self.decisions]

    def to_frame(self) -> pd.DataFrame:
        """Table with columns frame_index, label, score."""
        return pd.DataFrame(
            {
                "frame_index": np.arange(len(self)),
                "label": [FrameLabel(int(v)).name for v in self.decisions],
                "score": self.scores,
            }
        )


def _cosine_rows(matrix: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Row-wise cosine to one vector; NaN where either norm is zero."""
    out = np.full(matrix.shape[0], np.nan)
    ref_norm = float(np.linalg.norm(reference))
    if ref_norm == 0.0:
        return out
    norms = np.linalg.norm(matrix, axis=1)
    live = norms > 0
    out[live] = np.clip((matrix[live] @ reference) / (norms[live] * ref_norm), -1.0, 1.0)
    return out


def _concat_rows(matrix: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Split-and-average similarity against a stacked [enroll; keyframe] reference."""
    dim = matrix.shape[1]
    norms = np.linalg.norm(matrix, axis=1)
    total = np.zeros(matrix.shape[0])
    for half in (reference[:dim], reference[dim:]):
        # zero-norm halves contribute 0
        cos = _cosine_rows(matrix, half)
        total += np.where(np.isnan(cos), 0.0, cos)
    out = 0.5 * total
    out[norms == 0] = np.nan
    return out


def _similarities(
    matrix: np.ndarray, reference: EmbeddingVector, cfg: DetectorConfig
) -> np.ndarray:
    dim = matrix.shape[1]
    if reference.dim == dim:
        return _cosine_rows(matrix, reference.values)
    if reference.dim == 2 * dim and cfg.concat_split_average:
        return _concat_rows(matrix, reference.values)
    raise DimensionMismatchError(dim, reference.dim, what="reference")


def _decide(
    similarity: np.ndarray, activity: np.ndarray, cfg: DetectorConfig
) -> tuple[np.ndarray, np.ndarray]:
    defined = ~np.isnan(similarity)
    scores = np.where(defined, similarity, UNDEFINED_SCORE)
    decisions = np.full(similarity.shape[0], int(FrameLabel.NTSS), dtype=np.int64)
    decisions[defined & (scores >= cfg.speaker_threshold)] = int(FrameLabel.TSS)
    decisions[activity < cfg.vad_threshold] = int(FrameLabel.NS)
    return decisions, scores


def score_against_concat(frame: EmbeddingVector, reference: EmbeddingVector) -> float:
    """Average cosine of a frame to both halves of a concatenated reference.

    Args:
        frame: Frame embedding of dimension D
        reference: Concatenated reference of dimension 2D

    Returns:
        0.5 * (cos(frame, first half) + cos(frame, second half)), zero-norm halves
        contributing 0

    Raises:
        DimensionMismatchError: If the reference dimension is not 2D
    """
    if reference.dim != 2 * frame.dim:
        raise DimensionMismatchError(2 * frame.dim, reference.dim, what="concatenated reference")
    value = _concat_rows(frame.values[np.newaxis, :], reference.values)[0]
    return 0.0 if np.isnan(value) else float(value)


def decide_frame(
    embedding: EmbeddingVector,
    activity: float,
    reference: EmbeddingVector,
    cfg: DetectorConfig | None = None,
) -> tuple[FrameLabel, float]:
    """Classify one frame.

    Returns:
        Tuple of (label, score). The score is the similarity to the reference,
        or -1 when it is undefined; it is reported for non-speech frames too.
    """
    cfg = cfg or DetectorConfig()
    similarity = _similarities(embedding.values[np.newaxis, :], reference, cfg)
    decisions, scores = _decide(similarity, np.array([float(activity)]), cfg)
    return FrameLabel(int(decisions[0])), float(scores[0])


def decide_segment(
    segment: SegmentFrames,
    reference: EmbeddingVector,
    cfg: DetectorConfig | None = None,
) -> DetectionResult:
    """Classify every frame of a segment, preserving frame order.

    Raises:
        EmptySegmentError: If the segment has no frames
        DimensionMismatchError: If the reference is neither D nor 2D dimensional
    """
    cfg = cfg or DetectorConfig()
    if segment.num_frames == 0:
        raise EmptySegmentError(f"segment {segment.segment_id} has no frames")
    similarity = _similarities(segment.embeddings, reference, cfg)
    decisions, scores = _decide(similarity, segment.activity, cfg)
    return DetectionResult(decisions=decisions, scores=scores, activity=segment.activity.copy())
