"""Command-line interface.

Subcommands:
    simulate   generate a session: segment files, enrollment files and a manifest
    augment    run adaptation over a manifest's segments and write the trace
    evaluate   score every segment with the reference in effect before it
    sweep      evaluate a grid of rules, lambdas, tags and seeds
    compare    score one segment under alternative references over many seeds

Errors print one line ``error code=<CODE> message=<text>`` to stderr and exit 1.
Command-line usage errors print the same line with code ``USAGE`` and exit 2.
"""

from __future__ import annotations

import argparse
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any, NoReturn

import pandas as pd
import structlog

from selfaug import __version__
from selfaug.augmentation import run_adaptation
from selfaug.embedding import EmbeddingVector
from selfaug.errors import InvalidConfigError, LengthMismatchError, SelfAugError
from selfaug.experiments import (
    SessionInput,
    compare_over_seeds,
    evaluate_segment,
    summarize,
    sweep,
    sweep_sessions,
)
from selfaug.io.binary import write_enrollment, write_segment
from selfaug.io.loaders import load_enrollment, load_segment
from selfaug.io.manifest import (
    EnrollmentEntry,
    EnrollmentMeta,
    SessionManifest,
    read_manifest,
    write_enrollment_meta,
    write_manifest,
)
from selfaug.io.reports import (
    EvaluationDocument,
    SegmentMetrics,
    read_trace_references,
    write_detection_csv,
    write_metrics_csv,
    write_metrics_json,
    write_table,
    write_trace_csv,
)
from selfaug.log import configure_logging
from selfaug.metrics import concat_detections, evaluate
from selfaug.models.fusion import FusionKind
from selfaug.models.run import RunConfig, load_run_config
from selfaug.segment import SegmentFrames
from selfaug.simulate import enrollment_quality, generate_session

logger = structlog.get_logger(__name__)

RULE_CHOICES = ("none", "selected", "cat", "add", "weighted", "naive-add")


def parse_seeds(text: str) -> list[int]:
    """Parse ``"7"``, ``"1,2,5"`` or an inclusive range ``"0-99"``."""
    seeds: list[int] = []
    try:
        for part in text.split(","):
            part = part.strip()
            if "-" in part:
                lo, hi = (int(v) for v in part.split("-", 1))
                seeds.extend(range(lo, hi + 1))
            elif part:
                seeds.append(int(part))
    except ValueError as exc:
        raise InvalidConfigError(f"cannot parse seeds {text!r}") from exc
    if not seeds:
        raise InvalidConfigError(f"no seeds in {text!r}")
    return seeds


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise InvalidConfigError(f"cannot parse number list {text!r}") from exc


def _words(text: str) -> list[str]:
    return [v.strip() for v in text.split(",") if v.strip()]


def build_config(args: argparse.Namespace) -> RunConfig:
    """Load ``--config`` and apply command-line overrides."""
    cfg = load_run_config(getattr(args, "config", None))
    rule = getattr(args, "rule", None)
    return cfg.with_overrides(
        simulation__seed=getattr(args, "seed", None),
        selection__threshold=getattr(args, "threshold", None),
        fusion__lam=getattr(args, "lam", None),
        fusion__kind=FusionKind.parse(rule).value if rule else None,
        detector__speaker_threshold=getattr(args, "speaker_threshold", None),
        detector__vad_threshold=getattr(args, "vad_threshold", None),
        enroll_tag=getattr(args, "enroll_tag", None),
        output_dir=getattr(args, "out", None),
    )


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_session(manifest_path: Path) -> tuple[SessionManifest, list[SegmentFrames]]:
    manifest = read_manifest(manifest_path)
    base = manifest_path.parent
    segments = [
        load_segment(base / name, segment_id=k + 1) for k, name in enumerate(manifest.segments)
    ]
    return manifest, segments


def _load_enrollment(manifest: SessionManifest, manifest_path: Path, tag: str) -> EmbeddingVector:
    entry = manifest.enrollment_entry(tag)
    return load_enrollment(manifest_path.parent / entry.file)


def cmd_simulate(args: argparse.Namespace) -> Path:
    """Generate one session and write its files; returns the manifest path."""
    cfg = build_config(args)
    out = _out_dir(cfg)
    session = generate_session(cfg.simulation)

    segment_files = []
    for segment in session.segments:
        name = f"segment_{segment.segment_id:02d}.emb"
        write_segment(segment, out / name)
        segment_files.append(name)

    enrollments = {}
    for tag, embedding in session.enrollment.items():
        name = f"enroll_{tag}.enr"
        sidecar = f"enroll_{tag}.json"
        write_enrollment(embedding, out / name)
        write_enrollment_meta(EnrollmentMeta(tag=tag, dim=embedding.dim), out / sidecar)
        enrollments[tag] = EnrollmentEntry(
            file=name, sidecar=sidecar, quality=enrollment_quality(session, tag)
        )

    manifest = SessionManifest(
        seed=cfg.simulation.seed,
        dim=cfg.simulation.dim,
        target_speaker=session.target_speaker,
        segments=segment_files,
        enrollments=enrollments,
        config=cfg.simulation,
    )
    return write_manifest(manifest, out / "manifest.json")


def cmd_augment(args: argparse.Namespace) -> Path:
    """Run adaptation over a manifest's segments; returns the trace CSV path."""
    cfg = build_config(args)
    manifest_path = Path(args.manifest)
    manifest, segments = _load_session(manifest_path)
    enroll = _load_enrollment(manifest, manifest_path, cfg.enroll_tag)
    trace = run_adaptation(segments, enroll, cfg.adaptation())
    return write_trace_csv(trace, _out_dir(cfg) / "trace.csv")


def _references(
    segments: list[SegmentFrames], enroll: EmbeddingVector, trace_path: str | None
) -> list[tuple[str, EmbeddingVector]]:
    """Reference used for each segment: the one in effect before it."""
    if trace_path is None:
        return [("enroll", enroll)] * len(segments)
    after = read_trace_references(trace_path)
    out = [("enroll", enroll)]
    for previous in segments[:-1]:
        if previous.segment_id not in after:
            raise LengthMismatchError(
                f"trace {trace_path} has no row for segment {previous.segment_id}"
            )
        out.append((f"trace:{previous.segment_id}", after[previous.segment_id]))
    return out


def cmd_evaluate(args: argparse.Namespace) -> Path:
    """Score every segment; returns the metrics JSON path."""
    cfg = build_config(args)
    manifest_path = Path(args.manifest)
    manifest, segments = _load_session(manifest_path)
    enroll = _load_enrollment(manifest, manifest_path, cfg.enroll_tag)
    out = _out_dir(cfg)

    rows = []
    detections = []
    for segment, (source, reference) in zip(
        segments, _references(segments, enroll, args.trace), strict=True
    ):
        detection, report = evaluate_segment(segment, reference, cfg.detector)
        detections.append(detection)
        rows.append(
            SegmentMetrics(
                segment_id=segment.segment_id,
                reference_source=source,
                reference_norm=reference.norm,
                report=report,
            )
        )
        if args.write_detections:
            write_detection_csv(detection, out / f"detections_{segment.segment_id:02d}.csv")

    labels = [v for s in segments for v in (s.labels if s.labels is not None else [])]
    document = EvaluationDocument(
        detector=cfg.detector,
        config={
            "manifest": manifest_path.name,
            "enroll_tag": cfg.enroll_tag,
            "trace": Path(args.trace).name if args.trace else None,
        },
        segments=rows,
        overall=evaluate(labels, concat_detections(detections)),
    )
    write_metrics_csv(document, out / "metrics.csv")
    return write_metrics_json(document, out / "metrics.json")


def cmd_sweep(args: argparse.Namespace) -> Path:
    """Evaluate the sweep grid; returns the long-form CSV path."""
    cfg = build_config(args)
    grid: dict[str, Any] = {}
    if args.seeds:
        grid["seeds"] = parse_seeds(args.seeds)
    if args.lambdas:
        grid["lambdas"] = _floats(args.lambdas)
    if args.tags:
        grid["tags"] = _words(args.tags)
    if args.rules:
        grid["rules"] = [FusionKind.parse(r).value for r in _words(args.rules)]
    if args.conditions:
        grid["conditions"] = _words(args.conditions)
    cfg = cfg.with_overrides(**{f"sweep__{k}": v for k, v in grid.items()})

    if args.manifest:
        sessions = []
        for path in args.manifest:
            manifest, segments = _load_session(Path(path))
            enrollment = {
                tag: _load_enrollment(manifest, Path(path), tag) for tag in manifest.enrollments
            }
            noisy = manifest.config is not None and manifest.config.snr_noise_mode
            sessions.append(
                SessionInput(
                    condition="noisy" if noisy else "clean",
                    seed=manifest.seed if manifest.seed is not None else len(sessions),
                    segments=segments,
                    enrollment=enrollment,
                )
            )
        df = sweep_sessions(sessions, cfg)
    else:
        df = sweep(cfg)

    out = _out_dir(cfg)
    write_table(summarize(df), out / "sweep_summary.csv")
    return write_table(df, out / "sweep.csv")


def cmd_compare(args: argparse.Namespace) -> Path:
    """Compare references on one segment over seeds; returns the CSV path."""
    cfg = build_config(args)
    seeds = parse_seeds(args.seeds) if args.seeds else cfg.sweep.seeds
    df = compare_over_seeds(
        cfg, seeds, cfg.enroll_tag, segment=args.segment, condition=args.condition
    )
    metrics = ["f1", "precision", "recall", "accuracy", "macro_f1"]
    summary = df.groupby("reference", sort=False)[metrics].agg(["mean", "std"])
    summary.columns = [f"{m}_{s}" for m, s in summary.columns]
    out = _out_dir(cfg)
    write_table(pd.DataFrame(summary).reset_index(), out / "compare_summary.csv")
    return write_table(df, out / "compare.csv")


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="Run configuration JSON")
    parser.add_argument("--out", help="Output directory (overrides output_dir)")


class _Parser(argparse.ArgumentParser):
    """Parser whose usage errors follow the single-line error format."""

    def error(self, message: str) -> NoReturn:
        text = " ".join(message.split())
        self.exit(2, f"error code=USAGE message={self.prog}: {text}\n")


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with all subcommands."""
    parser = _Parser(
        prog="selfaug",
        description="Speaker-embedding self-augmentation for personal voice activity detection",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default="WARNING", help="Log level (stderr)")
    parser.add_argument("--log-json", action="store_true", help="Log as JSON lines")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="Generate a synthetic session")
    _common(p)
    p.add_argument("--seed", type=int, help="Session seed")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("augment", help="Adapt the reference over a session")
    _common(p)
    p.add_argument("--manifest", required=True, help="Session manifest JSON")
    p.add_argument("--enroll-tag", help="Enrollment tag, e.g. 0.5s")
    p.add_argument("--rule", choices=RULE_CHOICES, help="Fusion rule")
    p.add_argument("--lambda", dest="lam", type=float, help="Residual weight")
    p.add_argument("--threshold", type=float, required=True, help="Selection threshold")
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("evaluate", help="Score segments against ground truth")
    _common(p)
    p.add_argument("--manifest", required=True, help="Session manifest JSON")
    p.add_argument("--trace", help="Trace CSV from augment (default: enrollment only)")
    p.add_argument("--enroll-tag", help="Enrollment tag, e.g. 0.5s")
    p.add_argument("--speaker-threshold", type=float, help="Detector speaker threshold")
    p.add_argument("--vad-threshold", type=float, help="Detector activity gate")
    p.add_argument("--write-detections", action="store_true", help="Per-segment detection CSVs")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="Evaluate a grid of rules and lambdas")
    _common(p)
    p.add_argument("--manifest", action="append", help="Session manifest (repeatable)")
    p.add_argument("--seeds", help="Seeds to simulate: 7, 1,2,3 or 0-99")
    p.add_argument("--lambdas", help="Comma-separated lambdas")
    p.add_argument("--tags", help="Comma-separated enrollment tags")
    p.add_argument("--rules", help="Comma-separated rules")
    p.add_argument("--conditions", help="clean, noisy or clean,noisy")
    p.add_argument("--threshold", type=float, required=True, help="Selection threshold")
    p.add_argument("--speaker-threshold", type=float, help="Detector speaker threshold")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("compare", help="Compare references on one segment")
    _common(p)
    p.add_argument("--seeds", help="Seeds to simulate: 7, 1,2,3 or 0-99")
    p.add_argument("--enroll-tag", help="Enrollment tag, e.g. 0.5s")
    p.add_argument("--segment", type=int, default=1, help="1-based segment to score")
    p.add_argument("--condition", choices=("clean", "noisy"), default="clean")
    p.add_argument("--lambda", dest="lam", type=float, help="Residual weight")
    p.add_argument("--threshold", type=float, required=True, help="Selection threshold")
    p.add_argument("--speaker-threshold", type=float, help="Detector speaker threshold")
    p.set_defaults(func=cmd_compare)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Run the command line and return the exit status."""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level, json=args.log_json)
    log = logger.bind(command=args.command)
    log.info("command_started")
    try:
        path = args.func(args)
    except SelfAugError as exc:
        print(exc.one_line(), file=sys.stderr)
        return 1
    except OSError as exc:
        message = " ".join(f"{exc.strerror or exc}: {exc.filename or ''}".split())
        print(f"error code=IO_ERROR message={message}", file=sys.stderr)
        return 1
    log.info("command_finished", output=str(path))
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
