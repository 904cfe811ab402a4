"""Mixed-speech segment container."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from selfaug.embedding import EmbeddingVector
from selfaug.errors import InvalidSegmentError, NonFiniteError


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SegmentFrames:
    """One segment of long-window frame embeddings.

    Each row of ``embeddings`` is the embedding of one analysis window
    (``window_seconds`` long, hopped by ``hop_seconds``). Rows may be zero.

    Attributes:
        embeddings: Array of shape (T, D)
        activity: Per-frame speech activity in [0, 1], shape (T,)
        labels: Optional ground-truth label codes (0=NS, 1=NTSS, 2=TSS), shape (T,)
        hop_seconds: Hop between consecutive windows
        window_seconds: Window length
        segment_id: Position of the segment in its session (1-based by convention)
    """

    embeddings: np.ndarray
    activity: np.ndarray
    labels: np.ndarray | None = None
    hop_seconds: float = 0.2
    window_seconds: float = 1.0
    segment_id: int = 1

    def __post_init__(self) -> None:
        emb = np.array(self.embeddings, dtype=np.float64, copy=True)
        if emb.ndim != 2 or emb.shape[1] < 1:
            raise InvalidSegmentError(
                f"embeddings must have shape (T, D) with D >= 1, got {emb.shape}"
            )
        if not np.all(np.isfinite(emb)):
            raise NonFiniteError("segment embeddings contain NaN or infinite values")
        n = emb.shape[0]

        act = np.array(self.activity, dtype=np.float64, copy=True).reshape(-1)
        if act.shape[0] != n:
            raise InvalidSegmentError(f"activity has {act.shape[0]} entries for {n} frames")
        if not np.all(np.isfinite(act)) or np.any((act < 0) | (act > 1)):
            raise InvalidSegmentError("activity scores must lie in [0, 1]")

        labels = None
        if self.labels is not None:
            labels = np.array(self.labels, dtype=np.int64, copy=True).reshape(-1)
            if labels.shape[0] != n:
                raise InvalidSegmentError(f"labels has {labels.shape[0]} entries for {n} frames")
            if np.any((labels < 0) | (labels > 2)):
                raise InvalidSegmentError("labels must be 0 (NS), 1 (NTSS) or 2 (TSS)")
            labels = _readonly(labels)

        if not (self.hop_seconds > 0 and self.window_seconds > 0):
            raise InvalidSegmentError("hop_seconds and window_seconds must be positive")
        if self.hop_seconds > self.window_seconds:
            raise InvalidSegmentError("hop_seconds must not exceed window_seconds")

        object.__setattr__(self, "embeddings", _readonly(emb))
        object.__setattr__(self, "activity", _readonly(act))
        object.__setattr__(self, "labels", labels)

    @property
    def num_frames(self) -> int:
        """Number of frames T."""
        return int(self.embeddings.shape[0])

    @property
    def dim(self) -> int:
        """Embedding dimension D."""
        return int(self.embeddings.shape[1])

    @property
    def has_labels(self) -> bool:
        """Whether ground truth is attached."""
        return self.labels is not None

    def frame(self, index: int) -> EmbeddingVector:
        """Embedding of one frame as an EmbeddingVector."""
        return EmbeddingVector(self.embeddings[index])

    def __len__(self) -> int:
        return self.num_frames
