"""Reference detector configuration."""

from pydantic import BaseModel, ConfigDict, Field


class DetectorConfig(BaseModel):
    """Thresholds of the similarity-based frame classifier."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    vad_threshold: float = Field(
        default=0.5,
        ge=0,
        le=1,
        allow_inf_nan=False,
        description="Frames with activity below this are non-speech",
    )
    speaker_threshold: float = Field(
        default=0.5,
        ge=-1,
        le=1,
        allow_inf_nan=False,
        description="Speech frames with similarity at or above this are target speech",
    )
    concat_split_average: bool = Field(
        default=True,
        description="Score frames against a 2D concatenated reference by averaging both halves",
    )
