"""Segment-by-segment adaptation loop."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import replace

import structlog

from selfaug.augmentation.state import AdaptationState, AdaptationTrace, RecordStatus, TraceRecord
from selfaug.augmentation.updates import apply_rule
from selfaug.embedding import EmbeddingVector, l2_normalize
from selfaug.errors import (
    DimensionMismatchError,
    InvalidSegmentError,
    NoKeyframeError,
    WrongRuleError,
)
from selfaug.models.fusion import AdaptationConfig, FusionKind
from selfaug.segment import SegmentFrames
from selfaug.selection import select_keyframe

logger = structlog.get_logger(__name__)


def _check_segments(segments: Sequence[SegmentFrames], enroll: EmbeddingVector) -> None:
    previous: int | None = None
    for segment in segments:
        if segment.dim != enroll.dim:
            raise DimensionMismatchError(
                enroll.dim, segment.dim, what=f"segment {segment.segment_id}"
            )
        if previous is not None and segment.segment_id <= previous:
            raise InvalidSegmentError(
                f"segment ids must increase: {segment.segment_id} after {previous}"
            )
        previous = segment.segment_id


def run_adaptation(
    segments: Sequence[SegmentFrames],
    enroll: EmbeddingVector,
    cfg: AdaptationConfig | None = None,
) -> AdaptationTrace:
    """Adapt the reference over a session's segments in order.

    For each segment the keyframe is selected against the current reference
    and the configured rule is applied. Segments without a keyframe leave the
    state untouched and are still recorded. A reference that has cancelled to
    the zero vector cannot score frames, so later segments are recorded as
    having no keyframe.

    Args:
        segments: Segments in causal order with increasing segment ids
        enroll: Enrollment embedding
        cfg: Rule, selection threshold and normalization flags

    Returns:
        AdaptationTrace with one record per segment

    Raises:
        DimensionMismatchError: If a segment's dimension differs from the enrollment
        WrongRuleError: If concatenation is requested over more than one segment
    """
    cfg = cfg or AdaptationConfig()
    _check_segments(segments, enroll)
    if cfg.rule.kind == FusionKind.CONCAT and len(segments) > 1:
        raise WrongRuleError(
            "concat fusion doubles the dimension on every update and is only defined for "
            f"a single segment; got {len(segments)} segments"
        )

    if cfg.normalize_inputs:
        enroll = l2_normalize(enroll)
    state = AdaptationState.initial(enroll, rule=cfg.rule, selection=cfg.selection)
    trace = AdaptationTrace(enroll=enroll, config=cfg)
    log = logger.bind(rule=cfg.rule.name)

    for segment in segments:
        if segment.num_frames == 0:
            trace.append(_frozen(segment, state, RecordStatus.EMPTY))
            log.debug("segment_frozen", segment_id=segment.segment_id, reason="empty")
            continue
        if state.current.norm == 0.0:
            trace.append(_frozen(segment, state, RecordStatus.NO_KEYFRAME))
            log.debug(
                "segment_frozen", segment_id=segment.segment_id, reason="zero_reference"
            )
            continue

        try:
            choice = select_keyframe(segment, state.current, cfg.selection)
        except NoKeyframeError:
            trace.append(_frozen(segment, state, RecordStatus.NO_KEYFRAME))
            log.debug("segment_frozen", segment_id=segment.segment_id, reason="no_keyframe")
            continue

        keyframe = l2_normalize(choice.embedding) if cfg.normalize_inputs else choice.embedding
        updated = apply_rule(state, keyframe)
        if updated.n > state.n and cfg.renormalize_updates and updated.current.norm > 0.0:
            updated = replace(updated, current=l2_normalize(updated.current))
        status = RecordStatus.FUSED if updated.n > state.n else RecordStatus.HELD
        state = updated

        trace.append(
            TraceRecord(
                segment_id=segment.segment_id,
                n=state.n,
                selected_index=choice.index,
                similarity=choice.similarity,
                current=state.current,
                status=status,
            )
        )
        log.debug(
            "segment_adapted",
            segment_id=segment.segment_id,
            index=choice.index,
            similarity=round(choice.similarity, 6),
            n=state.n,
            norm=round(state.current.norm, 6),
            status=status.value,
        )

    return trace


def _frozen(segment: SegmentFrames, state: AdaptationState, status: RecordStatus) -> TraceRecord:
    return TraceRecord(
        segment_id=segment.segment_id,
        n=state.n,
        selected_index=-1,
        similarity=math.nan,
        current=state.current,
        status=status,
    )
