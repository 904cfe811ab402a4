"""Keyframe selection configuration."""

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field


class SelectionConfig(BaseModel):
    """How the keyframe is chosen from a segment."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    threshold: float = Field(
        default=0.5,
        ge=-1,
        le=1,
        allow_inf_nan=False,
        description="Minimum cosine similarity (inclusive) for a frame to be selectable",
    )
    tie_break: Literal["earliest"] = Field(
        default="earliest",
        description="Equal similarities resolve to the earliest frame index",
    )
