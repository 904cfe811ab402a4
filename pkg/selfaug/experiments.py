"""Experiment harness: per-segment evaluation, sweeps and reference comparisons.

Every rule and residual weight is evaluated on the same generated sessions so
differences between rows come from the reference embedding alone.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
import pandas as pd
import structlog
from scipy import stats

from selfaug.augmentation import AdaptationTrace, fuse_add, fuse_concat, run_adaptation
from selfaug.detector import DetectionResult, decide_segment
from selfaug.embedding import EmbeddingVector
from selfaug.errors import (
    InvalidConfigError,
    NoGroundTruthError,
    NoKeyframeError,
    UnknownTagError,
)
from selfaug.io.reports import metrics_row
from selfaug.metrics import MetricsReport, evaluate
from selfaug.models.detector import DetectorConfig
from selfaug.models.fusion import AdaptationConfig, FusionKind, FusionRule
from selfaug.models.run import RunConfig
from selfaug.models.selection import SelectionConfig
from selfaug.models.simulation import SimulationConfig
from selfaug.segment import SegmentFrames
from selfaug.selection import select_keyframe
from selfaug.simulate import SimulatedSession, generate_session

logger = structlog.get_logger(__name__)

SUMMARY_METRICS = ("f1", "precision", "recall", "accuracy", "macro_f1", "reference_norm")
SWEEP_KEYS = ("condition", "seed", "rule", "lam", "tag", "segment")


@dataclass(frozen=True)
class SegmentEvaluation:
    """Metrics of one segment scored with the reference in effect before it."""

    segment_id: int
    reference_source: str
    reference: EmbeddingVector
    detection: DetectionResult
    report: MetricsReport


def evaluate_segment(
    segment: SegmentFrames, reference: EmbeddingVector, detector: DetectorConfig
) -> tuple[DetectionResult, MetricsReport]:
    """Detect and score one labeled segment.

    Raises:
        NoGroundTruthError: If the segment has no labels
    """
    if segment.labels is None:
        raise NoGroundTruthError(f"segment {segment.segment_id} has no labels")
    detection = decide_segment(segment, reference, detector)
    return detection, evaluate(segment.labels, detection)


def evaluate_trace(
    segments: Sequence[SegmentFrames],
    trace: AdaptationTrace,
    detector: DetectorConfig,
) -> list[SegmentEvaluation]:
    """Score each segment with the reference in effect before it was processed.

    The first segment uses the enrollment; segment k uses the reference left
    by segment k - 1.
    """
    out = []
    for position, segment in enumerate(segments):
        reference = trace.reference_before(position)
        source = "enroll" if position == 0 else f"trace:{trace.records[position - 1].segment_id}"
        detection, report = evaluate_segment(segment, reference, detector)
        out.append(
            SegmentEvaluation(
                segment_id=segment.segment_id,
                reference_source=source,
                reference=reference,
                detection=detection,
                report=report,
            )
        )
    return out


@dataclass(frozen=True)
class SessionInput:
    """Segments and enrollments of one session, simulated or loaded from files."""

    condition: str
    seed: int
    segments: list[SegmentFrames]
    enrollment: dict[str, EmbeddingVector]

    @classmethod
    def from_simulation(cls, session: SimulatedSession, condition: str) -> SessionInput:
        """Wrap a generated session."""
        return cls(
            condition=condition,
            seed=session.config.seed,
            segments=session.segments,
            enrollment=session.enrollment,
        )


def run_cell(
    segments: Sequence[SegmentFrames],
    enroll: EmbeddingVector,
    adaptation: AdaptationConfig,
    detector: DetectorConfig,
) -> list[dict[str, Any]]:
    """Adapt and evaluate one session under one rule; one row per segment."""
    trace = run_adaptation(segments, enroll, adaptation)
    rows = []
    for position, ev in enumerate(evaluate_trace(segments, trace, detector)):
        record = trace.records[position]
        rows.append(
            {
                "segment": ev.segment_id,
                "n_before": 1 if position == 0 else trace.records[position - 1].n,
                "keyframe_index": record.selected_index,
                "keyframe_similarity": record.similarity,
                "reference_norm": ev.reference.norm,
                **metrics_row(ev.report),
            }
        )
    return rows


def session_config(cfg: RunConfig, seed: int, condition: str = "clean") -> SimulationConfig:
    """Simulation settings of one sweep cell."""
    return cfg.simulation.model_copy(
        update={"seed": seed, "snr_noise_mode": condition == "noisy"}
    )


def simulated_sessions(cfg: RunConfig) -> Iterator[SessionInput]:
    """Generate the sessions of the sweep grid, condition by condition, seeds ascending."""
    for condition in cfg.sweep.conditions:
        for seed in sorted(cfg.sweep.seeds):
            session = generate_session(session_config(cfg, seed, condition))
            yield SessionInput.from_simulation(session, condition)


def sweep_sessions(sessions: Iterable[SessionInput], cfg: RunConfig) -> pd.DataFrame:
    """Evaluate every (rule, lambda, tag) cell on each session.

    Rules other than ``weighted`` do not depend on lambda; their rows are
    repeated for each lambda so every rule has the same cardinality.

    Returns:
        Long-form DataFrame with one row per (condition, seed, rule, lam, tag, segment),
        sorted by those keys
    """
    grid = cfg.sweep
    rows: list[dict[str, Any]] = []
    for session in sessions:
        for tag in grid.tags:
            if tag not in session.enrollment:
                raise UnknownTagError(
                    f"unknown enrollment tag {tag!r}; available: {', '.join(session.enrollment)}"
                )
            cache: dict[tuple[FusionKind, float], list[dict[str, Any]]] = {}
            for kind in grid.rules:
                for lam in grid.lambdas:
                    key = (kind, lam if kind == FusionKind.WEIGHTED else -1.0)
                    if key not in cache:
                        adaptation = AdaptationConfig(
                            rule=FusionRule(kind=kind, lam=lam),
                            selection=cfg.selection,
                            normalize_inputs=cfg.normalize_inputs,
                            renormalize_updates=cfg.renormalize_updates,
                        )
                        cache[key] = run_cell(
                            session.segments, session.enrollment[tag], adaptation, cfg.detector
                        )
                    for row in cache[key]:
                        rows.append(
                            {
                                "condition": session.condition,
                                "seed": session.seed,
                                "rule": kind.value,
                                "lam": lam,
                                "tag": tag,
                                "selection_threshold": cfg.selection.threshold,
                                "speaker_threshold": cfg.detector.speaker_threshold,
                                **row,
                            }
                        )
        logger.debug("sweep_session_done", condition=session.condition, seed=session.seed)
    df = pd.DataFrame(rows)
    if df.empty:
        return df
    return df.sort_values(list(SWEEP_KEYS), kind="mergesort").reset_index(drop=True)


def sweep(cfg: RunConfig) -> pd.DataFrame:
    """Sweep the configured grid over simulated sessions."""
    return sweep_sessions(simulated_sessions(cfg), cfg)


def summarize(df: pd.DataFrame, metrics: Sequence[str] = SUMMARY_METRICS) -> pd.DataFrame:
    """Mean and standard deviation over seeds per (condition, rule, lam, tag, segment)."""
    keys = [k for k in SWEEP_KEYS if k != "seed" and k in df.columns]
    present = [m for m in metrics if m in df.columns]
    grouped = df.groupby(keys, sort=True)[present].agg(["mean", "std"])
    grouped.columns = [f"{m}_{s}" for m, s in grouped.columns]
    counts = df.groupby(keys, sort=True).size().rename("seeds")
    return grouped.join(counts).reset_index()


@dataclass(frozen=True)
class PairedTest:
    """One-sided paired comparison of two per-seed samples (a greater than b)."""

    n: int
    mean_difference: float
    t_pvalue: float
    sign_pvalue: float

    @property
    def pvalue(self) -> float:
        """Smaller of the two p-values."""
        return min(self.t_pvalue, self.sign_pvalue)


def paired_test(a: Sequence[float] | np.ndarray, b: Sequence[float] | np.ndarray) -> PairedTest:
    """Test whether a exceeds b on paired samples.

    Uses a one-sided paired t-test and an exact sign test over non-tied pairs.
    """
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    diff = x - y
    nonzero = diff[diff != 0]
    if nonzero.size == 0:
        return PairedTest(n=int(x.size), mean_difference=0.0, t_pvalue=1.0, sign_pvalue=1.0)
    t_p = float(stats.ttest_rel(x, y, alternative="greater").pvalue)
    if not np.isfinite(t_p):
        # constant nonzero difference: the t statistic is infinite
        t_p = 0.0 if nonzero.mean() > 0 else 1.0
    wins = int(np.sum(nonzero > 0))
    sign_p = float(stats.binomtest(wins, n=int(nonzero.size), p=0.5, alternative="greater").pvalue)
    return PairedTest(
        n=int(x.size), mean_difference=float(diff.mean()), t_pvalue=t_p, sign_pvalue=sign_p
    )


def compare_references(
    session: SimulatedSession | SessionInput,
    tag: str,
    selection: SelectionConfig,
    detector: DetectorConfig,
    segment: int = 1,
    lam: float = 0.1,
    ceiling_tag: str | None = "full",
) -> pd.DataFrame:
    """Score one segment under alternative references.

    For the first segment the keyframe is selected from that segment against
    the enrollment and the rows are: the enrollment alone, the keyframe alone,
    their concatenation and their sum. For a later segment k the rows are the
    enrollment, the weighted-rule reference before segment k, and the one after
    it. The ceiling tag's enrollment is always added as a reference row.

    Args:
        session: Generated session
        tag: Enrollment tag under study
        selection: Keyframe selection settings
        detector: Detector settings
        segment: 1-based segment position to score
        lam: Residual weight for the weighted rule
        ceiling_tag: Tag evaluated as an upper reference (None to skip)

    Returns:
        DataFrame with columns reference, keyframe, reference_norm and the metrics
    """
    if tag not in session.enrollment:
        raise UnknownTagError(f"unknown enrollment tag {tag!r}")
    if not 1 <= segment <= len(session.segments):
        raise InvalidConfigError(
            f"segment must be in 1..{len(session.segments)}, got {segment}"
        )
    enroll = session.enrollment[tag]
    target = session.segments[segment - 1]
    references: list[tuple[str, EmbeddingVector, bool]] = [("enroll", enroll, False)]

    if segment == 1:
        try:
            kf = select_keyframe(target, enroll, selection).embedding
            references += [
                ("selected", kf, True),
                ("augmented_cat", fuse_concat(enroll, kf), True),
                ("augmented_add", fuse_add(enroll, kf), True),
            ]
        except NoKeyframeError:
            # frozen: no keyframe leaves the enrollment in place
            references += [
                (name, enroll, False) for name in ("selected", "augmented_cat", "augmented_add")
            ]
    else:
        adaptation = AdaptationConfig(
            rule=FusionRule(kind=FusionKind.WEIGHTED, lam=lam), selection=selection
        )
        trace = run_adaptation(session.segments[:segment], enroll, adaptation)
        before = trace.records[segment - 2]
        after = trace.records[segment - 1]
        references += [
            (f"augmented_{segment - 1}", before.current, before.has_keyframe),
            (f"augmented_{segment}", after.current, after.has_keyframe),
        ]

    if ceiling_tag is not None and ceiling_tag != tag and ceiling_tag in session.enrollment:
        references.append((f"enroll_{ceiling_tag}", session.enrollment[ceiling_tag], False))

    rows = []
    for name, reference, keyframe in references:
        _, report = evaluate_segment(target, reference, detector)
        rows.append(
            {
                "reference": name,
                "keyframe": keyframe,
                "reference_norm": reference.norm,
                **metrics_row(report),
            }
        )
    return pd.DataFrame(rows)


def compare_over_seeds(
    cfg: RunConfig,
    seeds: Sequence[int],
    tag: str,
    segment: int = 1,
    condition: str = "clean",
) -> pd.DataFrame:
    """Run compare_references for many seeds; adds seed, tag, segment and condition columns."""
    frames = []
    for seed in seeds:
        session = generate_session(session_config(cfg, seed, condition))
        df = compare_references(
            session, tag, cfg.selection, cfg.detector, segment=segment, lam=cfg.fusion.lam
        )
        df.insert(0, "seed", seed)
        df.insert(1, "condition", condition)
        df.insert(2, "tag", tag)
        df.insert(3, "segment", segment)
        frames.append(df)
    return pd.concat(frames, ignore_index=True)


def best_lambda(summary_df: pd.DataFrame, segment: int, rule: str = "weighted") -> float:
    """Lambda with the highest mean F1 at a segment; ties go to the smallest lambda."""
    rows = summary_df[(summary_df["rule"] == rule) & (summary_df["segment"] == segment)]
    rows = rows.sort_values("lam", kind="mergesort")
    return float(rows.iloc[int(np.argmax(rows["f1_mean"].to_numpy()))]["lam"])
