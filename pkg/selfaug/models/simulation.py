"""Synthetic conversation configuration."""

import math

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

ENROLL_TAGS = ("0.5s", "1s", "1.5s", "full")


def default_enroll_sigmas() -> dict[str, float]:
    """Noise level per enrollment duration: shorter enrollment, noisier embedding."""
    return {"0.5s": 0.8, "1s": 0.55, "1.5s": 0.4, "full": 0.1}


class SimulationConfig(BaseModel):
    """Configuration for generating one synthetic conversation session."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    # Geometry
    dim: int = Field(
        default=192,
        ge=1,
        description="Embedding dimension",
    )
    num_speakers: int = Field(
        default=3,
        ge=2,
        description="Speakers in the conversation, one of them the target",
    )
    speaker_similarity: float = Field(
        default=0.65,
        ge=0,
        lt=1,
        allow_inf_nan=False,
        description="Expected pairwise cosine between speaker directions (shared voice component)",
    )

    # Timeline
    num_segments: int = Field(
        default=10,
        ge=1,
        description="Number of mixed segments N",
    )
    frames_per_segment: int = Field(
        default=120,
        ge=1,
        description="Long-window frames per segment (120 frames at 0.2s hop is about 25s)",
    )
    utterance_min_frames: int = Field(
        default=10,
        ge=1,
        description="Shortest utterance in frames",
    )
    utterance_max_frames: int = Field(
        default=40,
        ge=1,
        description="Longest utterance in frames",
    )
    silence_ratio: float = Field(
        default=0.15,
        ge=0,
        lt=1,
        allow_inf_nan=False,
        description="Expected fraction of non-speech frames",
    )
    hop_seconds: float = Field(default=0.2, gt=0, allow_inf_nan=False)
    window_seconds: float = Field(default=1.0, gt=0, allow_inf_nan=False)

    # Noise
    frame_noise_sigma: float = Field(
        default=0.4,
        ge=0,
        allow_inf_nan=False,
        description="Relative noise norm on speech frame embeddings",
    )
    background_noise_min: float = Field(
        default=0.4,
        ge=0,
        allow_inf_nan=False,
        description="Lower bound of the per-frame background noise norm on speech frames",
    )
    background_noise_max: float = Field(
        default=1.2,
        ge=0,
        allow_inf_nan=False,
        description="Upper bound of the per-frame background noise norm on speech frames",
    )
    enroll_noise_sigma: dict[str, float] = Field(
        default_factory=default_enroll_sigmas,
        description="Relative noise norm of the enrollment embedding per duration tag",
    )
    drift_per_segment: float = Field(
        default=0.05,
        ge=0,
        allow_inf_nan=False,
        description="Relative random-walk step of every speaker direction per segment",
    )
    snr_noise_mode: bool = Field(
        default=False,
        description="Add background-noise perturbation to every frame and jitter activity",
    )
    noise_mode_sigma: float = Field(default=0.3, ge=0, allow_inf_nan=False)
    activity_jitter: float = Field(default=0.15, ge=0, allow_inf_nan=False)

    # Activity and silence
    activity_gate: float = Field(
        default=0.5,
        gt=0,
        lt=1,
        description="Activity level separating speech from silence by construction",
    )
    activity_margin: float = Field(default=0.1, ge=0, lt=0.5, allow_inf_nan=False)
    silence_norm: float = Field(default=0.05, ge=0, allow_inf_nan=False)

    target_speaker: int | None = Field(
        default=None,
        ge=0,
        description="Target speaker index (None = drawn from the seed)",
    )
    seed: int = Field(
        default=0,
        ge=0,
        le=2**64 - 1,
        description="Random seed; identical seeds give identical sessions",
    )

    @field_validator("enroll_noise_sigma")
    @classmethod
    def validate_sigmas(cls, v: dict[str, float]) -> dict[str, float]:
        """Every enrollment sigma must be finite and non-negative."""
        if not v:
            raise ValueError("at least one enrollment tag is required")
        for tag, sigma in v.items():
            if not math.isfinite(sigma) or sigma < 0:
                raise ValueError(f"enrollment sigma for {tag!r} must be finite and >= 0")
        return v

    @model_validator(mode="after")
    def validate_ranges(self) -> "SimulationConfig":
        """Cross-field checks."""
        if self.utterance_min_frames > self.utterance_max_frames:
            raise ValueError("utterance_min_frames must not exceed utterance_max_frames")
        if self.hop_seconds > self.window_seconds:
            raise ValueError("hop_seconds must not exceed window_seconds")
        if self.background_noise_min > self.background_noise_max:
            raise ValueError("background_noise_min must not exceed background_noise_max")
        if self.target_speaker is not None and self.target_speaker >= self.num_speakers:
            raise ValueError("target_speaker must be below num_speakers")
        if self.activity_gate - self.activity_margin <= 0 or (
            self.activity_gate + self.activity_margin >= 1
        ):
            raise ValueError("activity_gate +/- activity_margin must stay inside (0, 1)")
        return self

    @property
    def tags(self) -> list[str]:
        """Enrollment tags in configuration order."""
        return list(self.enroll_noise_sigma)
