"""Deterministic synthetic conversations as labeled embedding streams."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import structlog

from selfaug.embedding import EmbeddingVector, cosine_similarity
from selfaug.errors import UnknownTagError
from selfaug.models.labels import FrameLabel
from selfaug.models.simulation import SimulationConfig
from selfaug.segment import SegmentFrames

logger = structlog.get_logger(__name__)

SILENCE = -1


@dataclass
class SimulatedSession:
    """One generated conversation.

    Attributes:
        segments: N labeled segments with ids 1..N
        enrollment: Enrollment embedding per duration tag
        target_speaker: Index of the target speaker
        true_directions: Unit speaker directions, shape (N, num_speakers, D)
        speakers: Speaker index per frame (-1 for silence), one array per segment
        config: Configuration the session was generated from
    """

    segments: list[SegmentFrames]
    enrollment: dict[str, EmbeddingVector]
    target_speaker: int
    true_directions: np.ndarray
    speakers: list[np.ndarray] = field(default_factory=list)
    config: SimulationConfig = field(default_factory=SimulationConfig)

    @property
    def dim(self) -> int:
        """Embedding dimension."""
        return int(self.true_directions.shape[2])

    def target_direction(self, position: int = 0) -> EmbeddingVector:
        """True target direction in the segment at a 0-based position."""
        return EmbeddingVector(self.true_directions[position, self.target_speaker])

    def speaker_cosines(self) -> np.ndarray:
        """Pairwise cosine of the speakers' initial directions."""
        base = self.true_directions[0]
        return base @ base.T

    def ns_fraction(self) -> float:
        """Fraction of non-speech frames over the whole session."""
        labels = np.concatenate([s.labels for s in self.segments if s.labels is not None])
        return float(np.mean(labels == int(FrameLabel.NS)))


def _unit_rows(matrix: np.ndarray) -> np.ndarray:
    return matrix / np.linalg.norm(matrix, axis=-1, keepdims=True)


def _isotropic(rng: np.random.Generator, shape: tuple[int, ...], dim: int) -> np.ndarray:
    """Gaussian noise with expected squared norm 1 per row."""
    return rng.standard_normal(shape) / np.sqrt(dim)


def _timeline(rng: np.random.Generator, cfg: SimulationConfig) -> np.ndarray:
    """Speaker index per frame: single-speaker utterances separated by silence gaps."""
    n_frames = cfg.frames_per_segment
    out = np.full(n_frames, SILENCE, dtype=np.int64)
    queue: list[int] = []
    previous = SILENCE
    pos = 0
    gap_scale = cfg.silence_ratio / (1.0 - cfg.silence_ratio)
    while pos < n_frames:
        if not queue:
            queue = [int(v) for v in rng.permutation(cfg.num_speakers)]
            if queue[0] == previous:
                queue[0], queue[1] = queue[1], queue[0]
        speaker = queue.pop(0)
        length = int(rng.integers(cfg.utterance_min_frames, cfg.utterance_max_frames + 1))
        out[pos : pos + length] = speaker
        pos += length
        pos += int(rng.poisson(length * gap_scale))
        previous = speaker
    return out


def _mix(own: np.ndarray, shared: np.ndarray, similarity: float) -> np.ndarray:
    """Unit speaker directions sharing a common voice component."""
    return _unit_rows(np.sqrt(1.0 - similarity) * own + np.sqrt(similarity) * shared)


def generate_session(cfg: SimulationConfig | None = None) -> SimulatedSession:
    """Generate a labeled conversation deterministically from ``cfg.seed``.

    Every speaker direction mixes a component shared by all speakers with a
    speaker-specific one, so pairwise cosines sit near
    ``cfg.speaker_similarity``. The specific components drift by a small
    random step each segment. Each segment is a sequence of single-speaker
    utterances separated by silence. Speech frames are noisy copies of the
    speaker's direction, with frame noise plus a background level drawn per
    frame from ``[background_noise_min, background_noise_max]``; silence
    frames are small-norm noise with activity below the gate. Each enrollment
    tag gets a noisy copy of the target's first-segment direction, noisier for
    shorter enrollments.

    Args:
        cfg: Simulation configuration

    Returns:
        SimulatedSession with N segments and one enrollment per tag
    """
    cfg = cfg or SimulationConfig()
    rng = np.random.default_rng(cfg.seed)
    dim, n_spk = cfg.dim, cfg.num_speakers

    shared = _unit_rows(rng.standard_normal(dim))
    own = _unit_rows(rng.standard_normal((n_spk, dim)))
    base = _mix(own, shared, cfg.speaker_similarity)
    target = cfg.target_speaker if cfg.target_speaker is not None else int(rng.integers(n_spk))

    enrollment = {}
    for tag, sigma in cfg.enroll_noise_sigma.items():
        noisy = base[target] + sigma * _isotropic(rng, (dim,), dim)
        enrollment[tag] = EmbeddingVector(noisy / np.linalg.norm(noisy))

    directions = np.empty((cfg.num_segments, n_spk, dim))
    directions[0] = base
    for k in range(1, cfg.num_segments):
        step = cfg.drift_per_segment * _isotropic(rng, (n_spk, dim), dim)
        own = _unit_rows(own + step)
        directions[k] = _mix(own, shared, cfg.speaker_similarity)

    speech_lo = cfg.activity_gate + cfg.activity_margin
    silence_hi = cfg.activity_gate - cfg.activity_margin

    segments = []
    speakers = []
    for k in range(cfg.num_segments):
        who = _timeline(rng, cfg)
        speech = who != SILENCE

        emb = np.empty((cfg.frames_per_segment, dim))
        noise = _isotropic(rng, (cfg.frames_per_segment, dim), dim)
        background = rng.uniform(
            cfg.background_noise_min, cfg.background_noise_max, size=cfg.frames_per_segment
        )
        sigma = np.sqrt(cfg.frame_noise_sigma**2 + background**2)[speech]
        if np.any(sigma > 0):
            voiced = directions[k][who[speech]] + sigma[:, None] * noise[speech]
            emb[speech] = _unit_rows(voiced)
        else:
            emb[speech] = directions[k][who[speech]]
        emb[~speech] = cfg.silence_norm * noise[~speech]

        u = rng.uniform(size=cfg.frames_per_segment)
        activity = np.where(speech, speech_lo + (1.0 - speech_lo) * u, silence_hi * u)

        if cfg.snr_noise_mode:
            emb = emb + cfg.noise_mode_sigma * _isotropic(rng, emb.shape, dim)
            jitter = cfg.activity_jitter * rng.standard_normal(cfg.frames_per_segment)
            activity = np.clip(activity + jitter, 0.0, 1.0)

        labels = np.where(
            who == SILENCE,
            int(FrameLabel.NS),
            np.where(who == target, int(FrameLabel.TSS), int(FrameLabel.NTSS)),
        )
        segments.append(
            SegmentFrames(
                embeddings=emb,
                activity=activity,
                labels=labels,
                hop_seconds=cfg.hop_seconds,
                window_seconds=cfg.window_seconds,
                segment_id=k + 1,
            )
        )
        speakers.append(who)

    session = SimulatedSession(
        segments=segments,
        enrollment=enrollment,
        target_speaker=target,
        true_directions=directions,
        speakers=speakers,
        config=cfg,
    )
    logger.debug(
        "session_generated",
        seed=cfg.seed,
        segments=cfg.num_segments,
        target=target,
        ns_fraction=round(session.ns_fraction(), 4),
    )
    return session


def enrollment_quality(session: SimulatedSession, tag: str) -> float:
    """Cosine of an enrollment embedding to the target's first-segment direction.

    Raises:
        UnknownTagError: If the tag was not generated
    """
    if tag not in session.enrollment:
        raise UnknownTagError(
            f"unknown enrollment tag {tag!r}; available: {', '.join(session.enrollment)}"
        )
    return cosine_similarity(session.enrollment[tag], session.target_direction(0))
