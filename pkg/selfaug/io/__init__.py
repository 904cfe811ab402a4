"""File formats: binary containers, JSONL frames, manifests and reports."""

from selfaug.io.binary import (
    decode_enrollment,
    decode_segment,
    encode_enrollment,
    encode_segment,
    read_enrollment,
    read_segment,
    write_enrollment,
    write_segment,
)
from selfaug.io.jsonl import (
    FrameRecord,
    decode_segment_jsonl,
    encode_segment_jsonl,
    read_segment_jsonl,
    write_segment_jsonl,
)
from selfaug.io.loaders import load_enrollment, load_segment
from selfaug.io.manifest import (
    EnrollmentEntry,
    EnrollmentMeta,
    SessionManifest,
    read_manifest,
    write_manifest,
)
from selfaug.io.reports import (
    EvaluationDocument,
    SegmentMetrics,
    read_trace_references,
    write_detection_csv,
    write_metrics_csv,
    write_metrics_json,
    write_trace_csv,
)

__all__ = [
    "EnrollmentEntry",
    "EnrollmentMeta",
    "EvaluationDocument",
    "FrameRecord",
    "SegmentMetrics",
    "SessionManifest",
    "decode_enrollment",
    "decode_segment",
    "decode_segment_jsonl",
    "encode_enrollment",
    "encode_segment",
    "encode_segment_jsonl",
    "load_enrollment",
    "load_segment",
    "read_enrollment",
    "read_manifest",
    "read_segment",
    "read_segment_jsonl",
    "read_trace_references",
    "write_detection_csv",
    "write_enrollment",
    "write_manifest",
    "write_metrics_csv",
    "write_metrics_json",
    "write_segment",
    "write_segment_jsonl",
    "write_trace_csv",
]
