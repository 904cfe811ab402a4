"""Exception hierarchy.

Every error carries a stable ``code`` so the command line can print a single
machine-parseable line. Errors raised while decoding files also carry the byte
``offset`` at which decoding stopped.
"""

from __future__ import annotations


class SelfAugError(Exception):
    """Base class for all package errors."""

    code = "SELFAUG_ERROR"

    def __init__(self, message: str) -> None:
        super().__init__(message)
        self.message = message

    def one_line(self) -> str:
        """Format as ``error code=<CODE> message=<text>`` without newlines."""
        text = " ".join(self.message.split())
        return f"error code={self.code} message={text}"


# Vector and selection errors


class DimensionMismatchError(SelfAugError, ValueError):
    """Two embeddings (or an embedding and a segment) disagree on dimension."""

    code = "DIMENSION_MISMATCH"

    def __init__(self, expected: int, actual: int, what: str = "embedding") -> None:
        super().__init__(f"{what} dimension mismatch: expected {expected}, got {actual}")
        self.expected = expected
        self.actual = actual


class ZeroVectorError(SelfAugError, ValueError):
    """An operation needs a nonzero norm."""

    code = "ZERO_VECTOR"


class NonFiniteError(SelfAugError, ValueError):
    """A value that must be finite is NaN or infinite."""

    code = "NON_FINITE"


class NoKeyframeError(SelfAugError):
    """No frame reached the selection threshold."""

    code = "NO_KEYFRAME"

    def __init__(self, threshold: float, best: float) -> None:
        super().__init__(f"no frame reached threshold {threshold:.6g} (best {best:.6g})")
        self.threshold = threshold
        self.best = best


class EmptySegmentError(SelfAugError, ValueError):
    """A segment with zero frames was given where frames are required."""

    code = "EMPTY_SEGMENT"


class InvalidSegmentError(SelfAugError, ValueError):
    """Segment arrays are inconsistent (lengths, ranges or timing)."""

    code = "INVALID_SEGMENT"


class WrongRuleError(SelfAugError, ValueError):
    """An update was requested under a fusion rule that does not support it."""

    code = "WRONG_RULE"


# Metric errors


class LengthMismatchError(SelfAugError, ValueError):
    """Aligned sequences have different lengths."""

    code = "LENGTH_MISMATCH"


class EmptyInputError(SelfAugError, ValueError):
    """Metric input has no items."""

    code = "EMPTY_INPUT"


class EmptyMatrixError(SelfAugError, ValueError):
    """Confusion matrix has no counts."""

    code = "EMPTY_MATRIX"


class NoPositivesError(SelfAugError, ValueError):
    """Average precision is undefined without positive items."""

    code = "NO_POSITIVES"


# Configuration and pipeline errors


class InvalidConfigError(SelfAugError, ValueError):
    """A configuration document failed validation."""

    code = "INVALID_CONFIG"


class UnknownTagError(SelfAugError, KeyError):
    """An enrollment duration tag is not present."""

    code = "UNKNOWN_TAG"

    def __str__(self) -> str:
        return self.message


class NoGroundTruthError(SelfAugError, ValueError):
    """Evaluation was requested for a segment without labels."""

    code = "NO_GROUND_TRUTH"


# File format errors


class FormatError(SelfAugError, ValueError):
    """Base class for malformed files."""

    code = "FORMAT_ERROR"

    def __init__(self, message: str, offset: int) -> None:
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class BadMagicError(FormatError):
    """The file does not start with the expected magic bytes."""

    code = "BAD_MAGIC"


class VersionUnsupportedError(FormatError):
    """The header declares a version this reader does not know."""

    code = "VERSION_UNSUPPORTED"


class TruncatedFileError(FormatError):
    """The file ends before the declared content."""

    code = "TRUNCATED_FILE"

    def __init__(self, expected: int, actual: int, offset: int) -> None:
        super().__init__(f"file truncated: expected {expected} bytes, got {actual}", offset)
        self.expected = expected
        self.actual = actual


class SizeMismatchError(FormatError):
    """Declared sizes are inconsistent or empty."""

    code = "SIZE_MISMATCH"


class TrailingBytesError(FormatError):
    """Bytes remain after the declared content."""

    code = "TRAILING_BYTES"

    def __init__(self, expected: int, actual: int, offset: int) -> None:
        super().__init__(
            f"trailing bytes: expected {expected} bytes, got {actual}", offset
        )
        self.expected = expected
        self.actual = actual


class BadLabelByteError(FormatError):
    """A label byte is outside {0, 1, 2}."""

    code = "BAD_LABEL_BYTE"


class BadHeaderFieldError(FormatError):
    """A header field has an impossible value."""

    code = "BAD_HEADER_FIELD"


class BadValueError(FormatError):
    """A payload value is non-finite or out of range."""

    code = "BAD_VALUE"


class BadRecordError(FormatError):
    """A JSONL line could not be parsed into a frame record."""

    code = "BAD_RECORD"
