"""Frame class labels."""

from enum import IntEnum


class FrameLabel(IntEnum):
    """Three-way frame class.

    The integer values are the on-disk label bytes and the row/column order of
    the confusion matrix.
    """

    NS = 0  # non-speech
    NTSS = 1  # non-target speaker speech
    TSS = 2  # target speaker speech

    @classmethod
    def parse(cls, value: "str | int | FrameLabel") -> "FrameLabel":
        """Parse a label from its name (``"TSS"``) or integer code (``2``)."""
        if isinstance(value, FrameLabel):
            return value
        if isinstance(value, str):
            key = value.strip().upper()
            if key in cls.__members__:
                return cls[key]
            raise ValueError(f"unknown frame label {value!r}")
        return cls(int(value))


LABEL_ORDER: tuple[FrameLabel, ...] = (FrameLabel.NS, FrameLabel.NTSS, FrameLabel.TSS)
