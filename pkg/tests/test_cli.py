"""Tests for the command-line interface."""

import hashlib
import json

import numpy as np
import pandas as pd
import pytest

from selfaug.augmentation import fixed_point
from selfaug.cli import main, parse_seeds
from selfaug.embedding import EmbeddingVector
from selfaug.errors import InvalidConfigError
from selfaug.io.binary import write_enrollment, write_segment
from selfaug.io.jsonl import write_segment_jsonl
from selfaug.io.loaders import load_enrollment
from selfaug.io.manifest import EnrollmentEntry, SessionManifest, write_manifest
from selfaug.io.reports import read_trace_references
from tests.conftest import make_segment


def _digests(directory):
    return {
        p.name: hashlib.sha256(p.read_bytes()).hexdigest()
        for p in sorted(directory.iterdir())
        if p.is_file()
    }


def _write_config(path, data):
    path.write_text(json.dumps(data))
    return str(path)


@pytest.fixture
def simulated(tmp_path):
    """Default simulated session on disk; returns the manifest path."""
    out = tmp_path / "session"
    assert main(["simulate", "--out", str(out), "--seed", "3"]) == 0
    return out / "manifest.json"


@pytest.fixture
def stationary_manifest(tmp_path):
    """25 identical segments whose best frame is always the same keyframe."""
    out = tmp_path / "stationary"
    out.mkdir()
    rows = [[0.75, 0.5, 0.25, 0.0], [0.0, 0.0, 0.0, 1.0], [0.0, 0.0, 0.0, 1.0]]
    names = []
    for k in range(1, 26):
        name = f"segment_{k:02d}.emb"
        write_segment(make_segment(rows, segment_id=k), out / name)
        names.append(name)
    write_enrollment(EmbeddingVector([1.0, 0.0, 0.0, 0.0]), out / "enroll.enr")
    manifest = SessionManifest(
        dim=4, segments=names, enrollments={"0.5s": EnrollmentEntry(file="enroll.enr")}
    )
    return write_manifest(manifest, out / "manifest.json")


class TestSimulate:
    """Tests for the simulate command."""

    def test_writes_session(self, simulated):
        """Ten segments, four enrollments with sidecars, and a manifest."""
        out = simulated.parent
        assert len(list(out.glob("segment_*.emb"))) == 10
        assert len(list(out.glob("enroll_*.enr"))) == 4
        assert len(list(out.glob("enroll_*.json"))) == 4
        manifest = json.loads(simulated.read_text())
        assert manifest["seed"] == 3
        assert manifest["dim"] == 192
        assert set(manifest["enrollments"]) == {"0.5s", "1s", "1.5s", "full"}
        assert -1.0 <= manifest["enrollments"]["full"]["quality"] <= 1.0

    def test_same_seed_same_bytes(self, tmp_path):
        """Two runs with one seed write byte-identical files."""
        for name in ("a", "b"):
            assert main(["simulate", "--out", str(tmp_path / name), "--seed", "7"]) == 0
        assert _digests(tmp_path / "a") == _digests(tmp_path / "b")

    def test_config_file(self, tmp_path):
        """--config sets the simulation parameters."""
        cfg = _write_config(tmp_path / "cfg.json", {"simulation": {"num_segments": 1, "dim": 8}})
        assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "s")]) == 0
        assert [p.name for p in (tmp_path / "s").glob("segment_*.emb")] == ["segment_01.emb"]

    def test_invalid_config(self, tmp_path, capsys):
        """Validation failures print one INVALID_CONFIG line and exit 1."""
        cfg = _write_config(tmp_path / "cfg.json", {"fusion": {"lam": 5}})
        assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "s")]) == 1
        err = capsys.readouterr().err.strip().splitlines()
        assert err[-1].startswith("error code=INVALID_CONFIG message=")


class TestAugment:
    """Tests for the augment command."""

    def test_rule_none_keeps_enrollment(self, simulated, tmp_path):
        """Without fusion every trace row is the enrollment."""
        out = tmp_path / "aug"
        code = main(
            ["augment", "--manifest", str(simulated), "--rule", "none", "--threshold", "0.5",
             "--out", str(out)]
        )
        assert code == 0
        enroll = load_enrollment(simulated.parent / "enroll_0.5s.enr")
        references = read_trace_references(out / "trace.csv")
        assert sorted(references) == list(range(1, 11))
        assert all(ref == enroll for ref in references.values())
        assert json.loads((out / "trace.json").read_text())["rule"] == "none"

    def test_weighted_converges_on_stationary_input(self, stationary_manifest, tmp_path):
        """The weighted rule ends at its fixed point for a repeated keyframe."""
        out = tmp_path / "aug"
        code = main(
            ["augment", "--manifest", str(stationary_manifest), "--rule", "weighted",
             "--lambda", "0.1", "--threshold", "0.5", "--out", str(out)]
        )
        assert code == 0
        final = read_trace_references(out / "trace.csv")[25]
        expected = fixed_point(
            EmbeddingVector([1.0, 0.0, 0.0, 0.0]), EmbeddingVector([0.75, 0.5, 0.25, 0.0]), 0.1
        )
        assert np.max(np.abs(final.values - expected.values)) <= 1e-6
        trace = pd.read_csv(out / "trace.csv")
        assert trace["selected_index"].tolist() == [0] * 25
        assert trace["n"].tolist() == list(range(2, 27))

    def test_concat_over_session_fails(self, simulated, tmp_path, capsys):
        """Concatenation across several segments is a WRONG_RULE error."""
        code = main(
            ["augment", "--manifest", str(simulated), "--rule", "cat", "--threshold", "0.5",
             "--out", str(tmp_path / "aug")]
        )
        assert code == 1
        assert "error code=WRONG_RULE" in capsys.readouterr().err

    def test_missing_manifest(self, tmp_path, capsys):
        """A missing manifest is a configuration error."""
        code = main(
            ["augment", "--manifest", str(tmp_path / "nope.json"), "--threshold", "0.5",
             "--out", str(tmp_path / "aug")]
        )
        assert code == 1
        assert "error code=INVALID_CONFIG" in capsys.readouterr().err

    def test_unknown_tag(self, simulated, tmp_path, capsys):
        """Tags missing from the manifest are reported."""
        code = main(
            ["augment", "--manifest", str(simulated), "--enroll-tag", "3s", "--threshold", "0.5",
             "--out", str(tmp_path / "aug")]
        )
        assert code == 1
        assert "error code=UNKNOWN_TAG" in capsys.readouterr().err


class TestEvaluate:
    """Tests for the evaluate command."""

    def test_perfect_enrollment(self, tmp_path):
        """A noiseless enrollment on noiseless frames classifies every frame."""
        cfg = _write_config(
            tmp_path / "cfg.json",
            {
                "simulation": {
                    "num_segments": 4,
                    "frame_noise_sigma": 0.0,
                    "background_noise_min": 0.0,
                    "background_noise_max": 0.0,
                    "speaker_similarity": 0.0,
                    "drift_per_segment": 0.0,
                    "enroll_noise_sigma": {"0.5s": 0.0},
                }
            },
        )
        session = tmp_path / "session"
        assert main(["simulate", "--config", cfg, "--out", str(session)]) == 0
        out = tmp_path / "eval"
        code = main(["evaluate", "--manifest", str(session / "manifest.json"), "--out", str(out)])
        assert code == 0
        metrics = pd.read_csv(out / "metrics.csv")
        assert metrics["segment_id"].tolist() == [1, 2, 3, 4]
        assert metrics["accuracy"].tolist() == [1.0] * 4
        assert set(metrics["reference_source"]) == {"enroll"}
        document = json.loads((out / "metrics.json").read_text())
        assert document["overall"]["f1"] == 1.0
        assert document["config"]["enroll_tag"] == "0.5s"

    def test_with_trace(self, simulated, tmp_path):
        """With a trace, segment k is scored with the reference left by segment k - 1."""
        aug = tmp_path / "aug"
        assert main(
            ["augment", "--manifest", str(simulated), "--threshold", "0.5", "--out", str(aug)]
        ) == 0
        out = tmp_path / "eval"
        code = main(
            ["evaluate", "--manifest", str(simulated), "--trace", str(aug / "trace.csv"),
             "--speaker-threshold", "0.8", "--write-detections", "--out", str(out)]
        )
        assert code == 0
        metrics = pd.read_csv(out / "metrics.csv")
        sources = metrics["reference_source"].tolist()
        assert sources[:3] == ["enroll", "trace:1", "trace:2"]
        assert len(sources) == 10
        assert len(list(out.glob("detections_*.csv"))) == 10
        document = json.loads((out / "metrics.json").read_text())
        assert document["detector"]["speaker_threshold"] == 0.8
        assert document["config"]["trace"] == "trace.csv"

    def test_unlabeled_segment(self, tmp_path, capsys):
        """Segments without labels cannot be evaluated."""
        out = tmp_path / "session"
        out.mkdir()
        write_segment_jsonl(make_segment([[1.0, 0.0], [0.0, 1.0]]), out / "segment.jsonl")
        (out / "enroll.json").write_text('{"e": [1.0, 0.0]}\n')
        manifest = SessionManifest(
            dim=2,
            segments=["segment.jsonl"],
            enrollments={"0.5s": EnrollmentEntry(file="enroll.json")},
        )
        path = write_manifest(manifest, out / "manifest.json")
        code = main(["evaluate", "--manifest", str(path), "--out", str(tmp_path / "eval")])
        assert code == 1
        assert "error code=NO_GROUND_TRUTH" in capsys.readouterr().err

    def test_pipeline_is_deterministic(self, tmp_path):
        """simulate, augment and evaluate twice give byte-identical outputs."""
        for name in ("a", "b"):
            base = tmp_path / name
            assert main(["simulate", "--seed", "5", "--out", str(base)]) == 0
            manifest = str(base / "manifest.json")
            assert main(
                ["augment", "--manifest", manifest, "--threshold", "0.5", "--out", str(base)]
            ) == 0
            assert main(
                ["evaluate", "--manifest", manifest, "--trace", str(base / "trace.csv"),
                 "--out", str(base)]
            ) == 0
        assert _digests(tmp_path / "a") == _digests(tmp_path / "b")


class TestSweepAndCompare:
    """Tests for the experiment commands."""

    def test_sweep_simulated(self, tmp_path):
        """Every rule and tag gets 50 rows for one seed and five lambdas."""
        out = tmp_path / "sweep"
        code = main(
            ["sweep", "--seeds", "0", "--tags", "0.5s,full", "--threshold", "0.5",
             "--out", str(out)]
        )
        assert code == 0
        df = pd.read_csv(out / "sweep.csv")
        counts = df.groupby(["rule", "tag"]).size()
        assert counts.tolist() == [50] * 6
        assert set(df["rule"]) == {"none", "naive_add", "weighted"}
        summary = pd.read_csv(out / "sweep_summary.csv")
        assert "f1_mean" in summary.columns
        assert summary["seeds"].tolist() == [1] * len(summary)

    def test_sweep_from_manifest(self, simulated, tmp_path):
        """Sessions on disk can be swept instead of simulated ones."""
        out = tmp_path / "sweep"
        code = main(
            ["sweep", "--manifest", str(simulated), "--rules", "weighted", "--lambdas", "0.1,0.2",
             "--threshold", "0.5", "--out", str(out)]
        )
        assert code == 0
        df = pd.read_csv(out / "sweep.csv")
        assert len(df) == 20
        assert set(df["seed"]) == {3}
        assert set(df["condition"]) == {"clean"}

    def test_sweep_rejects_concat(self, tmp_path, capsys):
        """Concatenation is not a sweepable rule."""
        code = main(
            ["sweep", "--seeds", "0", "--rules", "cat", "--threshold", "0.5",
             "--out", str(tmp_path / "sweep")]
        )
        assert code == 1
        assert "error code=INVALID_CONFIG" in capsys.readouterr().err

    def test_sweep_unknown_rule(self, tmp_path, capsys):
        """An unknown rule name is a one-line configuration error."""
        code = main(
            ["sweep", "--seeds", "0", "--rules", "bogus", "--threshold", "0.5",
             "--out", str(tmp_path / "sweep")]
        )
        assert code == 1
        err = capsys.readouterr().err
        assert err.startswith("error code=INVALID_CONFIG")
        assert "bogus" in err
        assert len(err.splitlines()) == 1

    def test_compare(self, tmp_path):
        """Segment 1 compares the enrollment, the keyframe, both fusions and the full tag."""
        out = tmp_path / "compare"
        code = main(["compare", "--seeds", "0-2", "--threshold", "0.5", "--out", str(out)])
        assert code == 0
        df = pd.read_csv(out / "compare.csv")
        assert df["reference"].unique().tolist() == [
            "enroll",
            "selected",
            "augmented_cat",
            "augmented_add",
            "enroll_full",
        ]
        assert sorted(set(df["seed"])) == [0, 1, 2]
        summary = pd.read_csv(out / "compare_summary.csv")
        assert len(summary) == 5
        assert "f1_mean" in summary.columns


class TestParseSeeds:
    """Tests for seed lists."""

    @pytest.mark.parametrize(
        "text,expected",
        [("7", [7]), ("1,2,5", [1, 2, 5]), ("0-3", [0, 1, 2, 3]), ("0-1,9", [0, 1, 9])],
    )
    def test_valid(self, text, expected):
        """Single seeds, lists and inclusive ranges."""
        assert parse_seeds(text) == expected

    @pytest.mark.parametrize("text", ["", "a", "1-b", ","])
    def test_invalid(self, text):
        """Unparseable text is a configuration error."""
        with pytest.raises(InvalidConfigError):
            parse_seeds(text)


class TestUsageErrors:
    """Tests for argument errors."""

    @pytest.mark.parametrize(
        "argv",
        [
            ["augment", "--manifest", "x.json"],
            ["evaluate", "--manifest", "x.json", "--speaker-threshold", "high"],
            ["nosuchcommand"],
            [],
        ],
    )
    def test_single_line(self, argv, capsys):
        """Usage errors exit 2 with one USAGE line and no usage text."""
        with pytest.raises(SystemExit) as info:
            main(argv)
        assert info.value.code == 2
        captured = capsys.readouterr()
        assert captured.out == ""
        lines = captured.err.splitlines()
        assert len(lines) == 1
        assert lines[0].startswith("error code=USAGE message=selfaug")
