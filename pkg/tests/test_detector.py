"""Tests for the similarity-threshold detector."""

import numpy as np
import pytest

from selfaug.detector import (
    UNDEFINED_SCORE,
    decide_frame,
    decide_segment,
    score_against_concat,
)
from selfaug.embedding import EmbeddingVector, cosine_similarity
from selfaug.errors import DimensionMismatchError, EmptySegmentError
from selfaug.models.detector import DetectorConfig
from selfaug.models.labels import FrameLabel
from selfaug.models.simulation import SimulationConfig
from selfaug.segment import SegmentFrames
from selfaug.simulate import generate_session
from tests.conftest import make_segment

REF = EmbeddingVector([1.0, 0.0, 0.0])


class TestDecideFrame:
    """Tests for single-frame decisions."""

    def test_silence_gate(self):
        """Activity below the gate is non-speech."""
        label, _ = decide_frame(EmbeddingVector([0.0, 1.0, 0.0]), 0.0, REF)
        assert label == FrameLabel.NS

    def test_identity_is_target(self):
        """A frame equal to the reference is target speech with score 1."""
        label, score = decide_frame(REF, 1.0, REF)
        assert label == FrameLabel.TSS
        assert score == pytest.approx(1.0)

    def test_orthogonal_is_non_target(self):
        """Cosine 0 is below the default speaker threshold."""
        label, score = decide_frame(EmbeddingVector([0.0, 1.0, 0.0]), 1.0, REF)
        assert label == FrameLabel.NTSS
        assert score == 0.0

    def test_non_speech_keeps_similarity(self):
        """Gated frames still report their similarity for ranking."""
        label, score = decide_frame(REF, 0.1, REF)
        assert label == FrameLabel.NS
        assert score == pytest.approx(1.0)

    def test_zero_frame_scores_undefined(self):
        """A zero-norm speech frame is non-target with the undefined score."""
        label, score = decide_frame(EmbeddingVector.zeros(3), 1.0, REF)
        assert label == FrameLabel.NTSS
        assert score == UNDEFINED_SCORE

    def test_speaker_threshold_inclusive(self):
        """Similarity equal to the threshold is target speech."""
        cfg = DetectorConfig(speaker_threshold=1.0)
        assert decide_frame(REF, 1.0, REF, cfg)[0] == FrameLabel.TSS

    def test_dimension_mismatch(self):
        """References must be D or 2D dimensional."""
        with pytest.raises(DimensionMismatchError):
            decide_frame(EmbeddingVector([1.0, 0.0]), 1.0, EmbeddingVector([1.0, 0.0, 0.0]))


class TestScoreAgainstConcat:
    """Tests for split-and-average scoring."""

    def test_equal_halves(self):
        """[e; e] scores like e."""
        f = EmbeddingVector([0.6, 0.8, 0.0])
        assert score_against_concat(f, EmbeddingVector([1, 0, 0, 1, 0, 0])) == pytest.approx(
            cosine_similarity(f, REF)
        )

    def test_one_matching_half(self):
        """Cosines 1 and 0 average to 0.5."""
        assert score_against_concat(REF, EmbeddingVector([1, 0, 0, 0, 1, 0])) == pytest.approx(
            0.5
        )

    def test_orthogonal_halves(self):
        """Both halves orthogonal give 0."""
        assert score_against_concat(REF, EmbeddingVector([0, 1, 0, 0, 0, 1])) == 0.0

    def test_zero_half_contributes_zero(self):
        """A zero half adds nothing to the average."""
        assert score_against_concat(REF, EmbeddingVector([1, 0, 0, 0, 0, 0])) == pytest.approx(
            0.5
        )

    def test_wrong_dimension(self):
        """The reference must be exactly 2D."""
        with pytest.raises(DimensionMismatchError):
            score_against_concat(REF, EmbeddingVector([1, 0, 0, 0]))

    def test_segment_with_concatenated_reference(self):
        """decide_segment applies the split rule to 2D references."""
        segment = make_segment([[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
        result = decide_segment(segment, EmbeddingVector([1, 0, 0, 1, 0, 0]))
        assert result.labels() == [FrameLabel.TSS, FrameLabel.NTSS]


class TestDecideSegment:
    """Tests for batch decisions."""

    def test_all_equal_to_reference(self):
        """Three copies of the reference are all target speech."""
        result = decide_segment(make_segment([REF.values] * 3), REF)
        assert result.labels() == [FrameLabel.TSS] * 3
        assert len(result) == 3

    def test_zero_activity(self):
        """Zero activity everywhere gives all non-speech."""
        segment = make_segment([REF.values] * 4, activity=np.zeros(4))
        assert decide_segment(segment, REF).labels() == [FrameLabel.NS] * 4

    def test_empty_segment(self):
        """A segment without frames cannot be classified."""
        segment = SegmentFrames(embeddings=np.zeros((0, 3)), activity=np.zeros(0))
        with pytest.raises(EmptySegmentError):
            decide_segment(segment, REF)

    def test_matches_per_frame_loop(self, small_session):
        """Batch decisions equal an independent per-frame loop on simulated data."""
        cfg = DetectorConfig()
        reference = small_session.enrollment["0.5s"]
        for segment in small_session.segments:
            result = decide_segment(segment, reference, cfg)
            for i in range(segment.num_frames):
                frame = segment.frame(i)
                if segment.activity[i] < cfg.vad_threshold:
                    expected = FrameLabel.NS
                elif cosine_similarity(frame, reference) >= cfg.speaker_threshold:
                    expected = FrameLabel.TSS
                else:
                    expected = FrameLabel.NTSS
                assert result.labels()[i] == expected

    def test_gate_dominance_and_partition(self, rng):
        """Every frame gets one label; gated frames are always non-speech."""
        rows = rng.standard_normal((300, 4))
        activity = rng.uniform(size=300)
        reference = EmbeddingVector(rng.standard_normal(4))
        result = decide_segment(make_segment(rows, activity=activity), reference)
        assert set(result.decisions.tolist()) <= {0, 1, 2}
        assert np.all(result.decisions[activity < 0.5] == int(FrameLabel.NS))

    def test_threshold_monotonicity(self, rng):
        """Raising the speaker threshold never turns non-target into target."""
        segment = make_segment(rng.standard_normal((200, 4)))
        reference = EmbeddingVector(rng.standard_normal(4))
        previous = None
        for tau in np.linspace(-1.0, 1.0, 11):
            decisions = decide_segment(
                segment, reference, DetectorConfig(speaker_threshold=float(tau))
            ).decisions
            if previous is not None:
                ntss_before = previous == int(FrameLabel.NTSS)
                assert np.all(decisions[ntss_before] == int(FrameLabel.NTSS))
            previous = decisions

    def test_noiseless_oracle_reference_is_perfect(self):
        """True target direction on noiseless frames classifies every frame correctly."""
        session = generate_session(
            SimulationConfig(
                dim=32,
                num_segments=1,
                frame_noise_sigma=0.0,
                background_noise_min=0.0,
                background_noise_max=0.0,
                drift_per_segment=0.0,
                seed=5,
            )
        )
        cosines = session.speaker_cosines()
        max_inter = float(np.max(cosines[~np.eye(cosines.shape[0], dtype=bool)]))
        cfg = DetectorConfig(speaker_threshold=(max_inter + 1.0) / 2.0)
        segment = session.segments[0]
        result = decide_segment(segment, session.target_direction(0), cfg)
        assert np.array_equal(result.decisions, segment.labels)

    def test_to_frame(self):
        """Detection table columns."""
        df = decide_segment(make_segment([REF.values, [0.0, 1.0, 0.0]]), REF).to_frame()
        assert list(df.columns) == ["frame_index", "label", "score"]
        assert df["label"].tolist() == ["TSS", "NTSS"]
