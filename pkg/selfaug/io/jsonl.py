"""JSON-lines text alternative to the binary containers.

One frame per line: ``{"e": [...], "a": 0.93, "y": "TSS"}``. ``a`` and ``y``
are optional but must be present on every line or on none. An enrollment is a
single line with only ``e``.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from selfaug.embedding import EmbeddingVector
from selfaug.errors import BadRecordError, SizeMismatchError
from selfaug.models.labels import FrameLabel
from selfaug.segment import SegmentFrames


class FrameRecord(BaseModel):
    """One JSONL line."""

    model_config = ConfigDict(extra="forbid")

    e: list[float] = Field(min_length=1)
    a: float | None = Field(default=None, ge=0, le=1, allow_inf_nan=False)
    y: str | None = None

    @field_validator("e")
    @classmethod
    def validate_finite(cls, v: list[float]) -> list[float]:
        """Embedding components must be finite."""
        if not np.all(np.isfinite(v)):
            raise ValueError("embedding components must be finite")
        return v

    @field_validator("y")
    @classmethod
    def validate_label(cls, v: str | None) -> str | None:
        """Labels are NS, NTSS or TSS."""
        if v is not None:
            FrameLabel.parse(v)
        return v


def _records(data: bytes) -> list[tuple[int, FrameRecord]]:
    out = []
    offset = 0
    for raw in data.splitlines(keepends=True):
        line = raw.strip()
        if line:
            try:
                out.append((offset, FrameRecord.model_validate_json(line)))
            except ValidationError as exc:
                first = exc.errors()[0]
                loc = ".".join(str(p) for p in first["loc"]) or "line"
                raise BadRecordError(f"{loc}: {first['msg']}", offset=offset) from exc
        offset += len(raw)
    return out


def decode_segment_jsonl(data: bytes, segment_id: int = 1) -> SegmentFrames:
    """Parse JSONL frames into a segment (hop 0.2s, window 1s).

    Raises:
        BadRecordError: If a line is malformed or inconsistent with the first line
        SizeMismatchError: If there are no frames
    """
    records = _records(data)
    if not records:
        raise SizeMismatchError("no frame records", offset=0)
    first = records[0][1]
    dim = len(first.e)
    for offset, rec in records:
        if len(rec.e) != dim:
            raise BadRecordError(f"frame has {len(rec.e)} components, expected {dim}", offset)
        if (rec.a is None) != (first.a is None) or (rec.y is None) != (first.y is None):
            raise BadRecordError("'a' and 'y' must appear on every line or on none", offset)

    embeddings = np.array([rec.e for _, rec in records], dtype=np.float64)
    if first.a is None:
        activity = np.ones(len(records))
    else:
        activity = np.array([rec.a for _, rec in records], dtype=np.float64)
    labels = None
    if first.y is not None:
        labels = np.array([int(FrameLabel.parse(rec.y or "")) for _, rec in records])
    return SegmentFrames(
        embeddings=embeddings, activity=activity, labels=labels, segment_id=segment_id
    )


def encode_segment_jsonl(segment: SegmentFrames) -> bytes:
    """Serialize a segment as JSONL."""
    lines = []
    for i in range(segment.num_frames):
        rec = FrameRecord(
            e=segment.embeddings[i].tolist(),
            a=float(segment.activity[i]),
            y=FrameLabel(int(segment.labels[i])).name if segment.labels is not None else None,
        )
        lines.append(rec.model_dump_json(exclude_none=True))
    return ("\n".join(lines) + "\n").encode("utf-8") if lines else b""


def decode_enrollment_jsonl(data: bytes) -> EmbeddingVector:
    """Parse a one-line JSON enrollment.

    Raises:
        BadRecordError: If there is not exactly one record
    """
    records = _records(data)
    if len(records) != 1:
        raise BadRecordError(f"expected one enrollment record, got {len(records)}", offset=0)
    return EmbeddingVector(np.array(records[0][1].e))


def read_segment_jsonl(path: str | Path, segment_id: int = 1) -> SegmentFrames:
    """Read a JSONL segment file."""
    return decode_segment_jsonl(Path(path).read_bytes(), segment_id=segment_id)


def write_segment_jsonl(segment: SegmentFrames, path: str | Path) -> Path:
    """Write a JSONL segment file."""
    path = Path(path)
    path.write_bytes(encode_segment_jsonl(segment))
    return path
