"""Adaptation state and per-segment trace."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
import pandas as pd

from selfaug.embedding import EmbeddingVector
from selfaug.errors import InvalidSegmentError
from selfaug.models.fusion import AdaptationConfig, FusionRule
from selfaug.models.selection import SelectionConfig


@dataclass(frozen=True)
class AdaptationState:
    """The evolving reference of one session.

    ``current`` is the reference used to select the next keyframe. Before the
    first successful update (n == 1) it is the enrollment itself.
    """

    enroll: EmbeddingVector
    current: EmbeddingVector
    n: int = 1
    rule: FusionRule = field(default_factory=FusionRule)
    selection: SelectionConfig = field(default_factory=SelectionConfig)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"iteration counter must be >= 1, got {self.n}")
        if self.n == 1 and self.current != self.enroll:
            raise ValueError("before the first update the reference must equal the enrollment")

    @classmethod
    def initial(
        cls,
        enroll: EmbeddingVector,
        rule: FusionRule | None = None,
        selection: SelectionConfig | None = None,
    ) -> AdaptationState:
        """Start a session from the enrollment embedding."""
        return cls(
            enroll=enroll,
            current=enroll,
            n=1,
            rule=rule or FusionRule(),
            selection=selection or SelectionConfig(),
        )

    def advanced(self, current: EmbeddingVector) -> AdaptationState:
        """Next state after one successful update."""
        return replace(self, current=current, n=self.n + 1)


class RecordStatus(str, Enum):
    """What happened to the reference on one segment."""

    FUSED = "fused"  # keyframe selected and reference updated
    HELD = "held"  # keyframe selected, rule keeps the reference
    NO_KEYFRAME = "no_keyframe"
    EMPTY = "empty"


@dataclass(frozen=True)
class TraceRecord:
    """Outcome of processing one segment."""

    segment_id: int
    n: int
    selected_index: int  # -1 without a keyframe
    similarity: float  # NaN without a keyframe
    current: EmbeddingVector
    status: RecordStatus

    @property
    def has_keyframe(self) -> bool:
        """Whether a keyframe was selected."""
        return self.selected_index >= 0

    @property
    def reference_norm(self) -> float:
        """Norm of the reference after this segment."""
        return self.current.norm


@dataclass
class AdaptationTrace:
    """Audit trail of a run, one record per segment in segment order."""

    enroll: EmbeddingVector
    config: AdaptationConfig
    records: list[TraceRecord] = field(default_factory=list)

    def append(self, record: TraceRecord) -> None:
        """Add a record, keeping segment ids strictly increasing."""
        if self.records and record.segment_id <= self.records[-1].segment_id:
            raise InvalidSegmentError(
                f"segment ids must increase: {record.segment_id} after "
                f"{self.records[-1].segment_id}"
            )
        self.records.append(record)

    @property
    def final(self) -> EmbeddingVector:
        """Reference after the last segment (the enrollment when empty)."""
        return self.records[-1].current if self.records else self.enroll

    @property
    def initial_reference(self) -> EmbeddingVector:
        """Reference in effect before the first segment."""
        return self.enroll

    def reference_before(self, position: int) -> EmbeddingVector:
        """Reference used to score the segment at a 0-based position."""
        if position == 0:
            return self.initial_reference
        return self.records[position - 1].current

    @property
    def dim(self) -> int:
        """Dimension of the stored references."""
        return self.final.dim

    def __len__(self) -> int:
        return len(self.records)

    def to_frame(self) -> pd.DataFrame:
        """Trace as a table: segment_id, n, selected_index, similarity, e0..e{D-1}.

        All records must share one dimension.
        """
        dim = self.dim
        base = pd.DataFrame(
            {
                "segment_id": [r.segment_id for r in self.records],
                "n": [r.n for r in self.records],
                "selected_index": [r.selected_index for r in self.records],
                "similarity": [r.similarity for r in self.records],
            }
        )
        if self.records:
            values = np.vstack([r.current.values for r in self.records])
        else:
            values = np.empty((0, dim))
        components = pd.DataFrame(values, columns=[f"e{i}" for i in range(dim)])
        return pd.concat([base, components], axis=1)

    def summary(self) -> dict[str, object]:
        """Small dictionary of headline facts."""
        fused = sum(r.status == RecordStatus.FUSED for r in self.records)
        return {
            "segments": len(self.records),
            "fused": fused,
            "no_keyframe": sum(not r.has_keyframe for r in self.records),
            "final_n": self.records[-1].n if self.records else 1,
            "final_norm": self.final.norm,
            "rule": self.config.rule.name,
        }

