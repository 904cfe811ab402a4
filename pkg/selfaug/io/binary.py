"""Little-endian binary containers for segments (EMB1) and enrollments (ENR1).

Segment layout::

    magic "EMB1" | version u16 | dim u32 | frame_count u32 | hop_ms u32 |
    window_ms u32 | flags u32 (bit0 labels, bit1 activity)
    frame_count * dim float32 embeddings
    frame_count float32 activity      (if bit1)
    frame_count uint8 labels          (if bit0)

Enrollment layout::

    magic "ENR1" | version u16 | dim u32 | dim float32

Readers validate the whole buffer before building any object and report the
byte offset of the first problem.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from selfaug.embedding import EmbeddingVector
from selfaug.errors import (
    BadHeaderFieldError,
    BadLabelByteError,
    BadMagicError,
    BadValueError,
    FormatError,
    SelfAugError,
    SizeMismatchError,
    TrailingBytesError,
    TruncatedFileError,
    VersionUnsupportedError,
)
from selfaug.segment import SegmentFrames

SEGMENT_MAGIC = b"EMB1"
ENROLL_MAGIC = b"ENR1"
VERSION = 1

SEGMENT_HEADER = struct.Struct("<4sHIIIII")
ENROLL_HEADER = struct.Struct("<4sHI")

FLAG_LABELS = 1
FLAG_ACTIVITY = 2
KNOWN_FLAGS = FLAG_LABELS | FLAG_ACTIVITY

# Header field offsets, for error reporting
_OFF_VERSION = 4
_OFF_DIM = 6
_OFF_HOP = 14
_OFF_WINDOW = 18
_OFF_FLAGS = 22

F32 = np.dtype("<f4")


def _check_magic(data: bytes, magic: bytes) -> None:
    head = data[: len(magic)]
    # a short file that is a prefix of the magic is reported as truncated later
    if not magic.startswith(head):
        raise BadMagicError(f"expected magic {magic.decode()!r}, got {head!r}", offset=0)


def _check_length(data: bytes, expected: int) -> None:
    if len(data) < expected:
        raise TruncatedFileError(expected, len(data), offset=len(data))
    if len(data) > expected:
        raise TrailingBytesError(expected, len(data), offset=expected)


def _floats(data: bytes, offset: int, count: int, what: str) -> np.ndarray:
    values = np.frombuffer(data, dtype=F32, count=count, offset=offset).astype(np.float64)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise BadValueError(f"non-finite {what} value", offset=offset + 4 * int(bad[0]))
    return values


def encode_segment(segment: SegmentFrames) -> bytes:
    """Serialize a segment; activity is always stored, labels when present."""
    flags = FLAG_ACTIVITY | (FLAG_LABELS if segment.labels is not None else 0)
    header = SEGMENT_HEADER.pack(
        SEGMENT_MAGIC,
        VERSION,
        segment.dim,
        segment.num_frames,
        round(segment.hop_seconds * 1000),
        round(segment.window_seconds * 1000),
        flags,
    )
    parts = [
        header,
        segment.embeddings.astype(F32).tobytes(),
        segment.activity.astype(F32).tobytes(),
    ]
    if segment.labels is not None:
        parts.append(segment.labels.astype(np.uint8).tobytes())
    return b"".join(parts)


def decode_segment(data: bytes, segment_id: int = 1) -> SegmentFrames:
    """Parse an EMB1 buffer.

    Args:
        data: Complete file contents
        segment_id: Id given to the decoded segment

    Returns:
        SegmentFrames in float64; missing activity is read as 1.0 (all speech)

    Raises:
        FormatError: A subclass naming the problem and its byte offset
    """
    _check_magic(data, SEGMENT_MAGIC)
    if len(data) < SEGMENT_HEADER.size:
        raise TruncatedFileError(SEGMENT_HEADER.size, len(data), offset=len(data))
    _, version, dim, count, hop_ms, window_ms, flags = SEGMENT_HEADER.unpack_from(data)

    if version != VERSION:
        raise VersionUnsupportedError(f"unsupported version {version}", offset=_OFF_VERSION)
    if dim == 0:
        raise SizeMismatchError("dimension must be positive", offset=_OFF_DIM)
    if hop_ms == 0:
        raise BadHeaderFieldError("hop_ms must be positive", offset=_OFF_HOP)
    if window_ms == 0 or hop_ms > window_ms:
        raise BadHeaderFieldError(
            f"window_ms {window_ms} must be positive and >= hop_ms {hop_ms}", offset=_OFF_WINDOW
        )
    if flags & ~KNOWN_FLAGS:
        raise BadHeaderFieldError(f"unknown flag bits {flags:#x}", offset=_OFF_FLAGS)

    has_labels = bool(flags & FLAG_LABELS)
    has_activity = bool(flags & FLAG_ACTIVITY)
    emb_off = SEGMENT_HEADER.size
    act_off = emb_off + 4 * count * dim
    lab_off = act_off + (4 * count if has_activity else 0)
    end = lab_off + (count if has_labels else 0)
    _check_length(data, end)

    embeddings = _floats(data, emb_off, count * dim, "embedding").reshape(count, dim)

    if has_activity:
        activity = _floats(data, act_off, count, "activity")
        bad = np.flatnonzero((activity < 0) | (activity > 1))
        if bad.size:
            raise BadValueError("activity outside [0, 1]", offset=act_off + 4 * int(bad[0]))
    else:
        activity = np.ones(count)

    labels = None
    if has_labels:
        raw = np.frombuffer(data, dtype=np.uint8, count=count, offset=lab_off)
        bad = np.flatnonzero(raw > 2)
        if bad.size:
            index = int(bad[0])
            raise BadLabelByteError(
                f"label byte {int(raw[index])} not in {{0, 1, 2}}", offset=lab_off + index
            )
        labels = raw.astype(np.int64)

    try:
        return SegmentFrames(
            embeddings=embeddings,
            activity=activity,
            labels=labels,
            hop_seconds=hop_ms / 1000.0,
            window_seconds=window_ms / 1000.0,
            segment_id=segment_id,
        )
    except SelfAugError as exc:
        if isinstance(exc, FormatError):
            raise
        raise BadValueError(exc.message, offset=emb_off) from exc


def write_segment(segment: SegmentFrames, path: str | Path) -> Path:
    """Write a segment file and return its path."""
    path = Path(path)
    path.write_bytes(encode_segment(segment))
    return path


def read_segment(path: str | Path, segment_id: int = 1) -> SegmentFrames:
    """Read an EMB1 segment file."""
    return decode_segment(Path(path).read_bytes(), segment_id=segment_id)


def encode_enrollment(enroll: EmbeddingVector) -> bytes:
    """Serialize an enrollment embedding."""
    header = ENROLL_HEADER.pack(ENROLL_MAGIC, VERSION, enroll.dim)
    return header + enroll.values.astype(F32).tobytes()


def decode_enrollment(data: bytes) -> EmbeddingVector:
    """Parse an ENR1 buffer.

    Raises:
        FormatError: A subclass naming the problem and its byte offset
    """
    _check_magic(data, ENROLL_MAGIC)
    if len(data) < ENROLL_HEADER.size:
        raise TruncatedFileError(ENROLL_HEADER.size, len(data), offset=len(data))
    _, version, dim = ENROLL_HEADER.unpack_from(data)
    if version != VERSION:
        raise VersionUnsupportedError(f"unsupported version {version}", offset=_OFF_VERSION)
    if dim == 0:
        raise SizeMismatchError("enrollment payload is empty", offset=_OFF_DIM)
    _check_length(data, ENROLL_HEADER.size + 4 * dim)
    return EmbeddingVector(_floats(data, ENROLL_HEADER.size, dim, "enrollment"))


def write_enrollment(enroll: EmbeddingVector, path: str | Path) -> Path:
    """Write an enrollment file and return its path."""
    path = Path(path)
    path.write_bytes(encode_enrollment(enroll))
    return path


def read_enrollment(path: str | Path) -> EmbeddingVector:
    """Read an ENR1 enrollment file."""
    return decode_enrollment(Path(path).read_bytes())
