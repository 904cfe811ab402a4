"""Fusion rule and adaptation configuration."""

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field

from selfaug.errors import InvalidConfigError
from selfaug.models.selection import SelectionConfig

DEFAULT_LAMBDA = 0.1
LAMBDA_SWEEP = (0.05, 0.1, 0.2, 0.3, 0.4)


class FusionKind(str, Enum):
    """How a selected keyframe is combined with the reference."""

    NONE = "none"  # enrollment only, never updated
    SELECTED = "selected"  # first keyframe alone replaces the reference
    CONCAT = "concat"  # [enroll; keyframe], one segment only
    ADD = "add"  # enroll + keyframe, applied once
    NAIVE_ADD = "naive_add"  # current + keyframe, every segment
    WEIGHTED = "weighted"  # residual-anchored long-term update, every segment

    @classmethod
    def parse(cls, value: "str | FusionKind") -> "FusionKind":
        """Accept enum values plus the command-line spellings ``cat`` and ``naive-add``."""
        if isinstance(value, FusionKind):
            return value
        aliases = {"cat": cls.CONCAT, "naive-add": cls.NAIVE_ADD}
        key = value.strip().lower()
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            known = ", ".join([*(k.value for k in cls), *aliases])
            raise InvalidConfigError(
                f"unknown fusion rule {value!r}; expected one of {known}"
            ) from None


class FusionRule(BaseModel):
    """Fusion rule with its residual weight."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: FusionKind = Field(
        default=FusionKind.WEIGHTED,
        description="Fusion variant",
    )
    lam: float = Field(
        default=DEFAULT_LAMBDA,
        ge=0,
        le=1,
        allow_inf_nan=False,
        description="Weight of the original enrollment in the long-term update",
    )

    @property
    def is_iterative(self) -> bool:
        """Whether the rule updates the reference on every segment."""
        return self.kind in (FusionKind.NAIVE_ADD, FusionKind.WEIGHTED)

    @property
    def name(self) -> str:
        """Short label used in tables."""
        if self.kind == FusionKind.WEIGHTED:
            return f"weighted(lam={self.lam:g})"
        return self.kind.value


class AdaptationConfig(BaseModel):
    """Everything run_adaptation needs besides the data."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    rule: FusionRule = Field(default_factory=FusionRule)
    selection: SelectionConfig = Field(default_factory=SelectionConfig)
    normalize_inputs: bool = Field(
        default=False,
        description="L2-normalize the enrollment and each keyframe before fusion",
    )
    renormalize_updates: bool = Field(
        default=False,
        description="L2-normalize the reference after every update",
    )
