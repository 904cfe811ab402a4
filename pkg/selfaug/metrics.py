"""Frame-level classification metrics."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, Field

from selfaug.detector import DetectionResult
from selfaug.errors import (
    EmptyInputError,
    EmptyMatrixError,
    LengthMismatchError,
    NoGroundTruthError,
    NoPositivesError,
)
from selfaug.models.labels import LABEL_ORDER, FrameLabel

NUM_CLASSES = len(LABEL_ORDER)

SCORE_CONVENTIONS = {
    "TSS": "similarity",
    "NS": "1 - activity",
    "NTSS": "activity * (1 - max(similarity, 0))",
}


@dataclass(frozen=True)
class ConfusionMatrix:
    """3x3 counts indexed [true class][predicted class] in (NS, NTSS, TSS) order."""

    counts: np.ndarray

    def __post_init__(self) -> None:
        counts = np.array(self.counts, dtype=np.int64, copy=True)
        if counts.shape != (NUM_CLASSES, NUM_CLASSES) or np.any(counts < 0):
            raise ValueError("confusion counts must be a non-negative 3x3 matrix")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> int:
        """Number of scored frames."""
        return int(self.counts.sum())

    def __add__(self, other: ConfusionMatrix) -> ConfusionMatrix:
        return ConfusionMatrix(self.counts + other.counts)

    def to_list(self) -> list[list[int]]:
        """Counts as nested lists."""
        return [[int(v) for v in row] for row in self.counts]


class MetricsReport(BaseModel):
    """Accuracy, headline (target speech) and macro rates, class-wise AP, confusion."""

    accuracy: float = Field(ge=0, le=1)
    recall: float = Field(ge=0, le=1, description="Target speech recall")
    precision: float = Field(ge=0, le=1, description="Target speech precision")
    f1: float = Field(ge=0, le=1, description="Target speech F1")
    per_class_recall: list[float]
    per_class_precision: list[float]
    per_class_f1: list[float]
    macro_recall: float = Field(ge=0, le=1)
    macro_precision: float = Field(ge=0, le=1)
    macro_f1: float = Field(ge=0, le=1)
    per_class_ap: list[float | None] | None = Field(
        default=None,
        description="Average precision for [NS, NTSS, TSS]; None where a class has no positives",
    )
    confusion: list[list[int]]
    frame_count: int = Field(ge=0)

    @property
    def mean_ap(self) -> float | None:
        """Mean of the defined class-wise APs."""
        if not self.per_class_ap:
            return None
        defined = [ap for ap in self.per_class_ap if ap is not None]
        return float(np.mean(defined)) if defined else None


def _codes(labels: Sequence[FrameLabel | int] | np.ndarray) -> np.ndarray:
    return np.asarray([int(v) for v in labels], dtype=np.int64)


def confusion(
    labels: Sequence[FrameLabel | int] | np.ndarray,
    predictions: Sequence[FrameLabel | int] | np.ndarray,
) -> ConfusionMatrix:
    """Tally ground truth against predictions.

    Raises:
        LengthMismatchError: If the sequences differ in length
        EmptyInputError: If they are empty
    """
    truth = _codes(labels)
    pred = _codes(predictions)
    if truth.shape[0] != pred.shape[0]:
        raise LengthMismatchError(f"{truth.shape[0]} labels vs {pred.shape[0]} predictions")
    if truth.shape[0] == 0:
        raise EmptyInputError("no frames to score")
    counts = np.zeros((NUM_CLASSES, NUM_CLASSES), dtype=np.int64)
    np.add.at(counts, (truth, pred), 1)
    return ConfusionMatrix(counts)


def _ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    # 0/0 counts as 0
    out = np.zeros(num.shape[0])
    nz = den > 0
    out[nz] = num[nz] / den[nz]
    return out


def summary(cm: ConfusionMatrix) -> MetricsReport:
    """Rates from a confusion matrix, without average precision.

    Raises:
        EmptyMatrixError: If the matrix has no counts
    """
    total = cm.total
    if total == 0:
        raise EmptyMatrixError("confusion matrix is empty")
    counts = cm.counts.astype(np.float64)
    diag = np.diag(counts)
    recall = _ratio(diag, counts.sum(axis=1))
    precision = _ratio(diag, counts.sum(axis=0))
    f1 = np.minimum(_ratio(2 * precision * recall, precision + recall), 1.0)
    tss = int(FrameLabel.TSS)
    return MetricsReport(
        accuracy=float(diag.sum() / total),
        recall=float(recall[tss]),
        precision=float(precision[tss]),
        f1=float(f1[tss]),
        per_class_recall=recall.tolist(),
        per_class_precision=precision.tolist(),
        per_class_f1=f1.tolist(),
        macro_recall=float(recall.mean()),
        macro_precision=float(precision.mean()),
        macro_f1=float(f1.mean()),
        confusion=cm.to_list(),
        frame_count=total,
    )


def average_precision(
    scores: Sequence[float] | np.ndarray,
    positives: Sequence[bool] | np.ndarray,
) -> float:
    """Interpolation-free average precision.

    Items are ranked by score descending, ties in original order; AP is the
    mean over positive items of the precision at their rank.

    Raises:
        LengthMismatchError: If the sequences differ in length
        NoPositivesError: If no item is positive
    """
    s = np.asarray(scores, dtype=np.float64)
    p = np.asarray(positives, dtype=bool)
    if s.shape[0] != p.shape[0]:
        raise LengthMismatchError(f"{s.shape[0]} scores vs {p.shape[0]} positives")
    if not np.any(p):
        raise NoPositivesError("average precision needs at least one positive")
    order = np.argsort(-s, kind="stable")
    hits = p[order]
    ranks = np.arange(1, hits.shape[0] + 1)
    cum_hits = np.cumsum(hits)
    return float(np.mean(cum_hits[hits] / ranks[hits]))


def class_scores(detection: DetectionResult) -> np.ndarray:
    """Per-class ranking scores, shape (T, 3) in (NS, NTSS, TSS) order."""
    sim = detection.scores
    act = detection.activity
    return np.column_stack(
        [
            1.0 - act,
            act * (1.0 - np.maximum(sim, 0.0)),
            sim,
        ]
    )


def evaluate(
    labels: Sequence[FrameLabel | int] | np.ndarray | None,
    detection: DetectionResult,
) -> MetricsReport:
    """Full metric row for one set of frames.

    Args:
        labels: Ground truth aligned with the detection
        detection: Decisions, similarity scores and activity

    Returns:
        MetricsReport including class-wise AP (None for classes without positives)

    Raises:
        NoGroundTruthError: If labels are missing
        LengthMismatchError: If lengths differ
    """
    if labels is None:
        raise NoGroundTruthError("evaluation needs ground-truth labels")
    truth = _codes(labels)
    report = summary(confusion(truth, detection.decisions))
    scores = class_scores(detection)
    aps: list[float | None] = []
    for cls in LABEL_ORDER:
        positives = truth == int(cls)
        aps.append(average_precision(scores[:, int(cls)], positives) if positives.any() else None)
    return report.model_copy(update={"per_class_ap": aps})


def concat_detections(results: Sequence[DetectionResult]) -> DetectionResult:
    """Join detections of several segments in order."""
    if not results:
        raise EmptyInputError("no detections to join")
    return DetectionResult(
        decisions=np.concatenate([r.decisions for r in results]),
        scores=np.concatenate([r.scores for r in results]),
        activity=np.concatenate([r.activity for r in results]),
    )
