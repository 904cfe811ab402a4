"""Top-level run configuration accepted by the command line."""

from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from selfaug.errors import InvalidConfigError
from selfaug.models.detector import DetectorConfig
from selfaug.models.fusion import LAMBDA_SWEEP, AdaptationConfig, FusionKind, FusionRule
from selfaug.models.selection import SelectionConfig
from selfaug.models.simulation import SimulationConfig

Condition = Literal["clean", "noisy"]


class SweepConfig(BaseModel):
    """Grid of cells evaluated by the sweep command."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    lambdas: list[float] = Field(
        default_factory=lambda: list(LAMBDA_SWEEP),
        description="Residual weights for the weighted rule",
    )
    tags: list[str] = Field(
        default_factory=lambda: ["0.5s"],
        description="Enrollment duration tags",
    )
    rules: list[FusionKind] = Field(
        default_factory=lambda: [FusionKind.NONE, FusionKind.NAIVE_ADD, FusionKind.WEIGHTED],
        description="Fusion rules (lambda only varies for the weighted rule)",
    )
    seeds: list[int] = Field(
        default_factory=lambda: [0],
        description="Session seeds",
    )
    conditions: list[Condition] = Field(
        default_factory=lambda: ["clean"],
        description="Clean and/or background-noise condition",
    )

    @field_validator("lambdas")
    @classmethod
    def validate_lambdas(cls, v: list[float]) -> list[float]:
        """Lambdas must lie in [0, 1]."""
        if not v:
            raise ValueError("at least one lambda is required")
        for lam in v:
            if not 0 <= lam <= 1:
                raise ValueError(f"lambda {lam} outside [0, 1]")
        return v

    @field_validator("rules")
    @classmethod
    def validate_rules(cls, v: list[FusionKind]) -> list[FusionKind]:
        """Concatenation cannot be iterated across segments."""
        if FusionKind.CONCAT in v:
            raise ValueError("concat is a one-segment fusion and cannot be swept over segments")
        return v

    @field_validator("seeds")
    @classmethod
    def validate_seeds(cls, v: list[int]) -> list[int]:
        """Seeds are unsigned 64-bit integers."""
        if not v:
            raise ValueError("at least one seed is required")
        for seed in v:
            if not 0 <= seed < 2**64:
                raise ValueError(f"seed {seed} is not an unsigned 64-bit integer")
        return v


class RunConfig(BaseModel):
    """JSON document passed with ``--config``."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    simulation: SimulationConfig = Field(default_factory=SimulationConfig)
    selection: SelectionConfig = Field(default_factory=SelectionConfig)
    fusion: FusionRule = Field(default_factory=FusionRule)
    detector: DetectorConfig = Field(default_factory=DetectorConfig)
    sweep: SweepConfig = Field(default_factory=SweepConfig)
    enroll_tag: str = Field(default="0.5s", description="Enrollment tag used by augment")
    normalize_inputs: bool = False
    renormalize_updates: bool = False
    output_dir: str = Field(default="out", description="Directory for command outputs")

    def adaptation(self) -> AdaptationConfig:
        """Assemble the adaptation settings."""
        return AdaptationConfig(
            rule=self.fusion,
            selection=self.selection,
            normalize_inputs=self.normalize_inputs,
            renormalize_updates=self.renormalize_updates,
        )

    def with_overrides(self, **updates: object) -> "RunConfig":
        """Return a re-validated copy with dotted-path overrides applied.

        Args:
            **updates: Keys like ``simulation__seed`` or ``fusion__lam``;
                ``None`` values are ignored

        Raises:
            InvalidConfigError: If the result does not validate
        """
        data = self.model_dump(mode="json")
        for key, value in updates.items():
            if value is None:
                continue
            node = data
            *parents, leaf = key.split("__")
            for part in parents:
                node = node[part]
            node[leaf] = value
        return validate_run_config(data)


def validate_run_config(data: dict[str, object]) -> RunConfig:
    """Validate a parsed document, mapping failures to InvalidConfigError."""
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        raise InvalidConfigError(_summarize(exc)) from exc


def load_run_config(path: str | Path | None) -> RunConfig:
    """Load and validate a run configuration file (defaults when path is None)."""
    if path is None:
        return RunConfig()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InvalidConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    try:
        return RunConfig.model_validate_json(text)
    except ValidationError as exc:
        raise InvalidConfigError(_summarize(exc)) from exc


def _summarize(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors():
        loc = ".".join(str(p) for p in err["loc"]) or "<root>"
        parts.append(f"{loc}: {err['msg']}")
    return "; ".join(parts)
