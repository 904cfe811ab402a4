"""Tests for the experiment harness, including the slow trend checks over 100 seeds."""

import numpy as np
import pandas as pd
import pytest

from selfaug.augmentation import run_adaptation
from selfaug.embedding import EmbeddingVector
from selfaug.errors import InvalidConfigError, NoGroundTruthError, UnknownTagError
from selfaug.experiments import (
    SWEEP_KEYS,
    SessionInput,
    best_lambda,
    compare_over_seeds,
    compare_references,
    evaluate_segment,
    evaluate_trace,
    paired_test,
    summarize,
    sweep,
    sweep_sessions,
)
from selfaug.models.detector import DetectorConfig
from selfaug.models.fusion import FusionKind
from selfaug.models.run import RunConfig
from selfaug.models.selection import SelectionConfig
from selfaug.models.simulation import SimulationConfig
from tests.conftest import make_segment

ACCEPTANCE_SEEDS = list(range(100))


@pytest.fixture
def small_run_config(small_sim_config) -> RunConfig:
    """Two seeds of the small session, every sweepable rule, two lambdas."""
    return RunConfig(simulation=small_sim_config).with_overrides(
        sweep__seeds=[1, 0],
        sweep__lambdas=[0.1, 0.3],
        sweep__tags=["0.5s", "full"],
        sweep__rules=["none", "selected", "add", "naive_add", "weighted"],
    )


class TestEvaluateTrace:
    """Tests for the causal scoring protocol."""

    def test_reference_before_each_segment(self, small_session):
        """Segment 1 uses the enrollment, segment k the reference left by k - 1."""
        enroll = small_session.enrollment["0.5s"]
        trace = run_adaptation(small_session.segments, enroll)
        evaluations = evaluate_trace(small_session.segments, trace, DetectorConfig())
        assert [ev.reference_source for ev in evaluations] == [
            "enroll",
            "trace:1",
            "trace:2",
            "trace:3",
        ]
        assert evaluations[0].reference == enroll
        for k in range(1, 4):
            assert evaluations[k].reference == trace.records[k - 1].current

    def test_unlabeled_segment(self):
        """Evaluation requires labels."""
        with pytest.raises(NoGroundTruthError):
            evaluate_segment(
                make_segment([[1.0, 0.0]]), EmbeddingVector([1.0, 0.0]), DetectorConfig()
            )


class TestSweep:
    """Tests for the grid runner."""

    def test_cardinality(self, small_run_config):
        """Every rule has rows for each lambda, tag, seed and segment."""
        df = sweep(small_run_config)
        assert len(df) == 5 * 2 * 2 * 2 * 4
        counts = df.groupby("rule").size()
        assert set(counts.tolist()) == {2 * 2 * 2 * 4}

    def test_sorted_by_keys(self, small_run_config):
        """Rows are ordered by condition, seed, rule, lambda, tag, segment."""
        df = sweep(small_run_config)
        keys = df[list(SWEEP_KEYS)]
        assert keys.equals(keys.sort_values(list(SWEEP_KEYS)).reset_index(drop=True))
        assert df["seed"].iloc[0] == 0

    def test_lambda_only_matters_for_weighted(self, small_run_config):
        """Non-weighted rules repeat identical rows for every lambda."""
        df = sweep(small_run_config)
        for rule in ("none", "naive_add", "add"):
            part = df[df["rule"] == rule]
            a = part[part["lam"] == 0.1]["f1"].to_numpy()
            b = part[part["lam"] == 0.3]["f1"].to_numpy()
            assert np.array_equal(a, b)

    def test_none_rule_keeps_enrollment_norm(self, small_run_config):
        """Without fusion the reference is the unit enrollment on every segment."""
        df = sweep(small_run_config)
        norms = df[df["rule"] == "none"]["reference_norm"].to_numpy()
        assert np.allclose(norms, 1.0, atol=1e-12)

    def test_first_segment_equal_across_rules(self, small_run_config):
        """Every rule scores segment 1 with the enrollment."""
        df = sweep(small_run_config)
        first = df[df["segment"] == 1]
        for _, group in first.groupby(["seed", "tag"]):
            assert group["f1"].nunique() == 1
            assert set(group["n_before"]) == {1}

    def test_unknown_tag(self, small_run_config):
        """Sweeping a tag the session lacks is an error."""
        cfg = small_run_config.with_overrides(sweep__tags=["3s"])
        with pytest.raises(UnknownTagError):
            sweep(cfg)

    def test_sessions_from_files(self, small_session, small_run_config):
        """Loaded sessions sweep the same as simulated ones."""
        session = SessionInput.from_simulation(small_session, "clean")
        cfg = small_run_config.with_overrides(sweep__seeds=[3])
        assert sweep_sessions([session], cfg).equals(sweep(cfg))

    def test_summarize(self, small_run_config):
        """Mean and std per cell with a seeds column."""
        summary = summarize(sweep(small_run_config))
        assert {"f1_mean", "f1_std", "reference_norm_mean", "seeds"} <= set(summary.columns)
        assert set(summary["seeds"]) == {2}
        assert "seed" not in summary.columns


class TestPairedTest:
    """Tests for the one-sided paired comparison."""

    def test_identical_samples(self):
        """No differences give p = 1."""
        result = paired_test([0.5, 0.6], [0.5, 0.6])
        assert result.pvalue == 1.0
        assert result.mean_difference == 0.0

    def test_consistent_improvement(self):
        """A positive gap on every pair is significant."""
        a = np.linspace(0.5, 0.9, 20)
        gain = 0.1 + 0.01 * np.sin(np.arange(20))
        result = paired_test(a + gain, a)
        assert result.t_pvalue < 1e-6
        assert result.sign_pvalue < 1e-5
        assert result.mean_difference == pytest.approx(gain.mean())

    def test_worse_is_not_significant(self, rng):
        """a below b is never significant in the greater direction."""
        b = rng.uniform(size=30)
        result = paired_test(b - 0.2, b)
        assert result.pvalue > 0.5

    def test_noisy_improvement(self, rng):
        """A small noisy gain over many pairs is detected."""
        b = rng.uniform(size=200)
        a = b + 0.05 + 0.05 * rng.standard_normal(200)
        assert paired_test(a, b).pvalue < 0.01


class TestCompareReferences:
    """Tests for the per-segment reference comparison."""

    def test_first_segment_rows(self, small_session):
        """Enrollment, keyframe, both fusions and the full-tag ceiling."""
        df = compare_references(small_session, "0.5s", SelectionConfig(), DetectorConfig())
        assert df["reference"].tolist() == [
            "enroll",
            "selected",
            "augmented_cat",
            "augmented_add",
            "enroll_full",
        ]
        norms = dict(zip(df["reference"], df["reference_norm"], strict=True))
        assert norms["enroll"] == pytest.approx(1.0)

    def test_frozen_without_keyframe(self, small_session):
        """An unreachable threshold leaves every row at the enrollment."""
        df = compare_references(
            small_session, "0.5s", SelectionConfig(threshold=1.0), DetectorConfig()
        )
        assert not df["keyframe"].any()
        assert df["f1"].iloc[:4].nunique() == 1

    def test_later_segment_rows(self, small_session):
        """Segment 3 compares the reference before and after segment 3."""
        df = compare_references(
            small_session, "0.5s", SelectionConfig(), DetectorConfig(), segment=3, ceiling_tag=None
        )
        assert df["reference"].tolist() == ["enroll", "augmented_2", "augmented_3"]

    def test_errors(self, small_session):
        """Unknown tags and out-of-range segments are rejected."""
        with pytest.raises(UnknownTagError):
            compare_references(small_session, "3s", SelectionConfig(), DetectorConfig())
        with pytest.raises(InvalidConfigError):
            compare_references(
                small_session, "0.5s", SelectionConfig(), DetectorConfig(), segment=5
            )

    def test_over_seeds(self, small_run_config):
        """compare_over_seeds stacks one block per seed."""
        df = compare_over_seeds(small_run_config, [0, 1], "0.5s")
        assert df["seed"].tolist() == [0] * 5 + [1] * 5
        assert list(df.columns[:4]) == ["seed", "condition", "tag", "segment"]


class TestBestLambda:
    """Tests for the lambda ranking."""

    def test_highest_mean_f1(self):
        """The lambda with the best mean F1 at the segment wins."""
        summary = pd.DataFrame(
            {
                "rule": ["weighted"] * 4 + ["none"],
                "segment": [10, 10, 10, 9, 10],
                "lam": [0.05, 0.2, 0.1, 0.4, 0.3],
                "f1_mean": [0.8, 0.85, 0.9, 0.99, 0.99],
            }
        )
        assert best_lambda(summary, segment=10) == 0.1

    def test_ties_go_to_smallest(self):
        """Equal means resolve to the smaller lambda."""
        summary = pd.DataFrame(
            {"rule": ["weighted"] * 2, "segment": [1, 1], "lam": [0.3, 0.05], "f1_mean": [0.7, 0.7]}
        )
        assert best_lambda(summary, segment=1) == 0.05


@pytest.fixture(scope="module")
def acceptance_sweep() -> pd.DataFrame:
    """100 clean seeds at speaker threshold 0.6 and selection threshold 0.5."""
    cfg = RunConfig().with_overrides(
        selection__threshold=0.5,
        detector__speaker_threshold=0.6,
        sweep__seeds=ACCEPTANCE_SEEDS,
        sweep__tags=["0.5s", "full"],
    )
    return sweep(cfg)


def _metric(
    df: pd.DataFrame, rule: str, tag: str, segment: int, lam: float = 0.1, column: str = "f1"
) -> np.ndarray:
    part = df[
        (df["rule"] == rule) & (df["tag"] == tag) & (df["segment"] == segment) & (df["lam"] == lam)
    ]
    return part.sort_values("seed")[column].to_numpy()


def _f1(df: pd.DataFrame, rule: str, tag: str, segment: int, lam: float = 0.1) -> np.ndarray:
    return _metric(df, rule, tag, segment, lam)


@pytest.mark.slow
class TestAcceptanceTrends:
    """Trends of the adaptation experiment over 100 simulated sessions."""

    def test_naive_sum_loses_precision(self, acceptance_sweep):
        """The unnormalized running sum fires on other speakers more by segment 10."""
        first = _metric(acceptance_sweep, "naive_add", "0.5s", 1, column="precision")
        last = _metric(acceptance_sweep, "naive_add", "0.5s", 10, column="precision")
        assert paired_test(first, last).pvalue < 0.01
        assert last.mean() < first.mean()

    def test_adapted_reference_beats_enrollment(self, acceptance_sweep):
        """Weighted lambda 0.1 at segment 5 beats the static short enrollment."""
        adapted = _f1(acceptance_sweep, "weighted", "0.5s", 5)
        static = _f1(acceptance_sweep, "none", "0.5s", 1)
        assert paired_test(adapted, static).pvalue < 0.01
        assert adapted.mean() > static.mean()

    def test_naive_norm_grows(self, acceptance_sweep):
        """The unnormalized running sum grows on every segment with a keyframe."""
        naive = acceptance_sweep[
            (acceptance_sweep["rule"] == "naive_add")
            & (acceptance_sweep["tag"] == "0.5s")
            & (acceptance_sweep["lam"] == 0.1)
        ]
        for _, group in naive.groupby("seed"):
            group = group.sort_values("segment")
            norms = group["reference_norm"].to_numpy()
            fused = group["keyframe_index"].to_numpy()[:-1] >= 0
            steps = np.diff(norms)
            assert np.all(steps[fused] > 0)
            assert np.all(steps[~fused] == 0)
        final = naive[naive["segment"] == 10]["reference_norm"]
        assert final.mean() > 3.0

    def test_short_enrollment_catches_up(self, acceptance_sweep):
        """After five updates the short enrollment is within one pooled std of the full one."""
        adapted = _f1(acceptance_sweep, "weighted", "0.5s", 6)
        full = _f1(acceptance_sweep, "none", "full", 1)
        pooled = np.sqrt((adapted.var(ddof=1) + full.var(ddof=1)) / 2)
        assert abs(adapted.mean() - full.mean()) <= pooled

    def test_small_lambda_is_best(self, acceptance_sweep):
        """At the last segment a small residual weight gives the best mean F1."""
        clean = acceptance_sweep[acceptance_sweep["tag"] == "0.5s"]
        assert best_lambda(summarize(clean), segment=10) in (0.05, 0.1)

    @pytest.mark.parametrize("small", [0.05, 0.1])
    @pytest.mark.parametrize("large", [0.3, 0.4])
    def test_small_lambda_beats_large(self, acceptance_sweep, small, large):
        """Each small residual weight beats each large one at segment 10."""
        a = _f1(acceptance_sweep, "weighted", "0.5s", 10, lam=small)
        b = _f1(acceptance_sweep, "weighted", "0.5s", 10, lam=large)
        assert paired_test(a, b).pvalue < 0.05
        assert a.mean() > b.mean()

    def test_single_keyframe_ordering(self, acceptance_config):
        """On segment 1 the summed reference beats the keyframe, which beats the enrollment."""
        df = compare_over_seeds(acceptance_config, ACCEPTANCE_SEEDS, "0.5s")

        def _scores(name: str) -> np.ndarray:
            return df[df["reference"] == name].sort_values("seed")["f1"].to_numpy()

        enroll, selected, added = _scores("enroll"), _scores("selected"), _scores("augmented_add")
        assert paired_test(added, selected).pvalue < 0.05
        assert paired_test(selected, enroll).pvalue < 0.05
        assert added.mean() >= selected.mean() >= enroll.mean()


def test_rules_in_sweep_are_iterable():
    """Concatenation never appears among sweep rules."""
    cfg = RunConfig(simulation=SimulationConfig(num_segments=1, dim=8))
    assert FusionKind.CONCAT not in cfg.sweep.rules
    assert set(sweep(cfg)["rule"]) == {"none", "naive_add", "weighted"}
