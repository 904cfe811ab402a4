"""Session manifest and enrollment sidecar documents."""

from __future__ import annotations

from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from selfaug.errors import InvalidConfigError, UnknownTagError
from selfaug.models.simulation import SimulationConfig


class EnrollmentMeta(BaseModel):
    """JSON sidecar written next to every enrollment file."""

    model_config = ConfigDict(extra="forbid")

    tag: str
    source: str = Field(default="simulator", description="Where the embedding came from")
    dim: int = Field(ge=1)


class EnrollmentEntry(BaseModel):
    """Manifest entry for one enrollment tag."""

    model_config = ConfigDict(extra="forbid")

    file: str
    sidecar: str | None = None
    quality: float | None = Field(
        default=None,
        description="Cosine to the true target direction (simulated sessions only)",
    )


class SessionManifest(BaseModel):
    """Index of the files making up one session.

    Paths are relative to the manifest's directory.
    """

    model_config = ConfigDict(extra="forbid")

    version: int = 1
    seed: int | None = None
    dim: int = Field(ge=1)
    target_speaker: int | None = None
    segments: list[str] = Field(min_length=1)
    enrollments: dict[str, EnrollmentEntry]
    config: SimulationConfig | None = None

    def enrollment_entry(self, tag: str) -> EnrollmentEntry:
        """Entry for a tag.

        Raises:
            UnknownTagError: If the tag is not listed
        """
        if tag not in self.enrollments:
            raise UnknownTagError(
                f"unknown enrollment tag {tag!r}; available: {', '.join(self.enrollments)}"
            )
        return self.enrollments[tag]


def write_manifest(manifest: SessionManifest, path: str | Path) -> Path:
    """Write a manifest as indented JSON."""
    path = Path(path)
    path.write_text(manifest.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path


def read_manifest(path: str | Path) -> SessionManifest:
    """Read and validate a manifest.

    Raises:
        InvalidConfigError: If the file is missing or does not validate
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InvalidConfigError(f"cannot read manifest {path}: {exc.strerror}") from exc
    try:
        return SessionManifest.model_validate_json(text)
    except ValidationError as exc:
        first = exc.errors()[0]
        loc = ".".join(str(p) for p in first["loc"]) or "<root>"
        raise InvalidConfigError(f"invalid manifest {path}: {loc}: {first['msg']}") from exc


def write_enrollment_meta(meta: EnrollmentMeta, path: str | Path) -> Path:
    """Write an enrollment sidecar."""
    path = Path(path)
    path.write_text(meta.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path
