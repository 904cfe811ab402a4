"""Trace, detection and metrics serialization."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
import structlog
from pydantic import BaseModel, Field

from selfaug.augmentation.state import AdaptationTrace
from selfaug.detector import DetectionResult
from selfaug.embedding import EmbeddingVector
from selfaug.errors import BadRecordError
from selfaug.metrics import SCORE_CONVENTIONS, MetricsReport
from selfaug.models.detector import DetectorConfig

logger = structlog.get_logger(__name__)

# Round-trips every float64 exactly
FLOAT_FORMAT = "%.17g"
TRACE_COLUMNS = ("segment_id", "n", "selected_index", "similarity")


def _write_frame(df: pd.DataFrame, path: Path) -> Path:
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.debug("file_written", path=str(path), rows=len(df))
    return path


def trace_sidecar_path(path: str | Path) -> Path:
    """JSON sidecar path next to a trace CSV."""
    return Path(path).with_suffix(".json")


def write_trace_csv(trace: AdaptationTrace, path: str | Path) -> Path:
    """Write the trace CSV and its JSON sidecar with the run configuration."""
    path = Path(path)
    _write_frame(trace.to_frame(), path)
    cfg = trace.config
    summary = trace.summary()
    sidecar = {
        "rule": cfg.rule.kind.value,
        "lambda": cfg.rule.lam,
        "threshold": cfg.selection.threshold,
        "tie_break": cfg.selection.tie_break,
        "dim": trace.dim,
        "enroll_dim": trace.enroll.dim,
        "normalize_inputs": cfg.normalize_inputs,
        "renormalize_updates": cfg.renormalize_updates,
        "segments": len(trace),
        "fused": summary["fused"],
        "no_keyframe": summary["no_keyframe"],
        "final_n": summary["final_n"],
        "final_norm": summary["final_norm"],
    }
    trace_sidecar_path(path).write_text(
        json.dumps(sidecar, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return path


def read_trace_references(path: str | Path) -> dict[int, EmbeddingVector]:
    """Reference after each segment, keyed by segment id, from a trace CSV.

    Raises:
        BadRecordError: If the CSV lacks the trace columns
    """
    try:
        df = pd.read_csv(path, float_precision="round_trip")
    except (OSError, ValueError, pd.errors.ParserError) as exc:
        raise BadRecordError(f"cannot parse trace {path}: {exc}", offset=0) from exc
    missing = [c for c in TRACE_COLUMNS if c not in df.columns]
    components = [c for c in df.columns if c.startswith("e") and c[1:].isdigit()]
    if missing or not components:
        raise BadRecordError(f"trace {path} is missing columns {missing or ['e0']}", offset=0)
    values = df[components].to_numpy(dtype=np.float64)
    return {
        int(sid): EmbeddingVector(values[i]) for i, sid in enumerate(df["segment_id"].tolist())
    }


def write_detection_csv(result: DetectionResult, path: str | Path) -> Path:
    """Write per-frame decisions: frame_index, label, score."""
    return _write_frame(result.to_frame(), Path(path))


class SegmentMetrics(BaseModel):
    """Metrics of one segment with the reference that scored it."""

    segment_id: int
    reference_source: str = Field(description="enroll, or the trace row the reference came from")
    reference_norm: float
    report: MetricsReport


class EvaluationDocument(BaseModel):
    """Metrics JSON written by the evaluate command."""

    detector: DetectorConfig
    reference_protocol: str = "reference in effect before each segment is processed"
    score_conventions: dict[str, str] = Field(default_factory=lambda: dict(SCORE_CONVENTIONS))
    config: dict[str, Any] = Field(default_factory=dict)
    segments: list[SegmentMetrics]
    overall: MetricsReport


def metrics_row(report: MetricsReport) -> dict[str, Any]:
    """Flatten a report into one CSV row."""
    ap = report.per_class_ap or [None, None, None]
    return {
        "accuracy": report.accuracy,
        "recall": report.recall,
        "precision": report.precision,
        "f1": report.f1,
        "macro_recall": report.macro_recall,
        "macro_precision": report.macro_precision,
        "macro_f1": report.macro_f1,
        "ap_ns": ap[0],
        "ap_ntss": ap[1],
        "ap_tss": ap[2],
        "frames": report.frame_count,
    }


def write_metrics_json(document: EvaluationDocument, path: str | Path) -> Path:
    """Write the evaluation document."""
    path = Path(path)
    path.write_text(document.model_dump_json(indent=2) + "\n", encoding="utf-8")
    logger.debug("file_written", path=str(path), segments=len(document.segments))
    return path


def write_metrics_csv(document: EvaluationDocument, path: str | Path) -> Path:
    """Write one row per segment."""
    rows = [
        {
            "segment_id": seg.segment_id,
            "reference_source": seg.reference_source,
            "reference_norm": seg.reference_norm,
            **metrics_row(seg.report),
        }
        for seg in document.segments
    ]
    return _write_frame(pd.DataFrame(rows), Path(path))


def write_table(df: pd.DataFrame, path: str | Path) -> Path:
    """Write any long-form result table."""
    return _write_frame(df, Path(path))
