"""Format-sniffing readers."""

from __future__ import annotations

from pathlib import Path

from selfaug.embedding import EmbeddingVector
from selfaug.errors import FormatError
from selfaug.io.binary import decode_enrollment, decode_segment
from selfaug.io.jsonl import decode_enrollment_jsonl, decode_segment_jsonl
from selfaug.segment import SegmentFrames


def _read(path: str | Path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}", offset=0) from exc


def _is_text(data: bytes) -> bool:
    # binary containers start with an ASCII magic, never with JSON or whitespace
    return data.lstrip()[:1] == b"{"


def load_segment(path: str | Path, segment_id: int = 1) -> SegmentFrames:
    """Read a segment in binary (EMB1) or JSONL form."""
    data = _read(path)
    if _is_text(data):
        return decode_segment_jsonl(data, segment_id=segment_id)
    return decode_segment(data, segment_id=segment_id)


def load_enrollment(path: str | Path) -> EmbeddingVector:
    """Read an enrollment in binary (ENR1) or one-line JSON form."""
    data = _read(path)
    if _is_text(data):
        return decode_enrollment_jsonl(data)
    return decode_enrollment(data)
