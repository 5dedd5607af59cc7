import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from auric.engine import CaptureRecord, SessionRecord
from auric.errors import BadEmbedding, DimensionMismatch, WrongPortraitCount
from auric.events import CaptureSample
from auric.facegate import (
    ANY,
    MAJORITY,
    NO_FACE,
    CaptureVerdict,
    always_no_face,
    classify_sample,
    enroll,
    flag_day,
    flag_session,
)

from conftest import unit_vectors
from oracles import best_score_oracle, random_unit_vector

HALF_SQRT2 = math.sqrt(2) / 2

TRIANGLE_PROFILE = enroll("owner", [
    (1.0, 0.0), (0.0, 1.0), (HALF_SQRT2, HALF_SQRT2),
], created_ts=0)


def session_with_scores(scores):
    """Session whose captures carry the given scores (None = no face)."""
    captures = tuple(
        CaptureRecord(ts=i, face_detected=score is not None,
                      best_score=score, sample_ref="")
        for i, score in enumerate(scores)
    )
    return SessionRecord(session_id=f"1970-01-01-0-{id(scores) % 1000}", start_ts=0,
                         end_ts=len(scores), segments=(), captures=captures, anomalies=())


class TestEnroll:
    def test_three_valid_portraits(self):
        profile = enroll("o", [(1.0, 0.0), (0.0, 1.0), (0.6, 0.8)], created_ts=5)
        assert profile.dimension == 2
        assert profile.created_ts == 5

    def test_wrong_count(self):
        with pytest.raises(WrongPortraitCount):
            enroll("o", [(1.0, 0.0), (0.0, 1.0)])
        with pytest.raises(WrongPortraitCount):
            enroll("o", [(1.0, 0.0)] * 4)

    def test_non_unit_portrait(self):
        with pytest.raises(BadEmbedding):
            enroll("o", [(1.0, 0.0), (0.0, 1.0), (2.0, 0.0)])

    def test_mixed_dimensions(self):
        with pytest.raises(BadEmbedding):
            enroll("o", [(1.0, 0.0), (0.0, 1.0), (1.0, 0.0, 0.0)])


class TestClassify:
    def test_exact_match_scores_one(self):
        # dots: 1, 0, sqrt(2)/2 -> best 1.0
        verdict = classify_sample(CaptureSample(face=(1.0, 0.0)), TRIANGLE_PROFILE)
        assert verdict == CaptureVerdict(face_detected=True, best_score=1.0)

    def test_opposite_clamps_to_zero(self):
        # dots: 0, -1, -sqrt(2)/2 -> clamped best 0.0
        verdict = classify_sample(CaptureSample(face=(0.0, -1.0)), TRIANGLE_PROFILE)
        assert verdict == CaptureVerdict(face_detected=True, best_score=0.0)

    def test_no_face(self):
        assert classify_sample(CaptureSample(), TRIANGLE_PROFILE) == NO_FACE

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            classify_sample(CaptureSample(face=(1.0, 0.0, 0.0)), TRIANGLE_PROFILE)

    def test_always_no_face(self):
        assert always_no_face(CaptureSample(face=(1.0, 0.0)), TRIANGLE_PROFILE) == NO_FACE

    @given(unit_vectors(dim=4), unit_vectors(dim=4), unit_vectors(dim=4), unit_vectors(dim=4))
    def test_best_score_equals_triple_loop(self, p1, p2, p3, sample):
        profile = enroll("o", [p1, p2, p3], created_ts=0)
        verdict = classify_sample(CaptureSample(face=sample), profile)
        expected = best_score_oracle(sample, profile.portraits)
        assert verdict.best_score == pytest.approx(expected, abs=1e-12)
        assert 0.0 <= verdict.best_score <= 1.0


class TestFlagging:
    def test_mixed_scores_example(self):
        session = session_with_scores([0.9, None, 0.3])
        assert flag_session(session, 0.6, ANY) is True
        assert flag_session(session, 0.6, MAJORITY) is False  # 1 vs 1

    def test_all_no_face(self):
        session = session_with_scores([None, None])
        assert flag_session(session, 0.6, ANY) is False
        assert flag_session(session, 0.6, MAJORITY) is False

    def test_zero_threshold_never_flags(self):
        session = session_with_scores([0.0, 0.5, 1.0])
        assert flag_session(session, 0.0, ANY) is False
        assert flag_session(session, 0.0, MAJORITY) is False

    def test_flag_day(self):
        flagged = session_with_scores([0.1])
        clean = session_with_scores([0.9])
        assert flag_day([], 0.6, ANY) is False
        assert flag_day([flagged, clean], 0.6, ANY) is True
        assert flag_day([clean, clean], 0.6, ANY) is False

    def test_invalid_inputs(self):
        session = session_with_scores([0.5])
        with pytest.raises(ValueError, match=r"threshold must be in \[0,1\]"):
            flag_session(session, 1.5, ANY)
        with pytest.raises(ValueError):
            flag_session(session, 0.5, "SOMETIMES")

    @given(st.lists(st.one_of(st.none(), st.floats(0, 1, allow_nan=False)), max_size=12),
           st.floats(0, 1, allow_nan=False), st.floats(0, 1, allow_nan=False))
    def test_threshold_monotonic_and_majority_subset(self, scores, t1, t2):
        lo, hi = sorted((t1, t2))
        session = session_with_scores(scores)
        if flag_session(session, lo, ANY):
            assert flag_session(session, hi, ANY)
        for threshold in (lo, hi):
            if flag_session(session, threshold, MAJORITY):
                assert flag_session(session, threshold, ANY)

    def test_randomized_flag_properties(self):
        rng = random.Random(2024)
        for _ in range(400):
            dim = rng.choice((2, 4, 8))
            profile = enroll("o", [random_unit_vector(rng, dim) for _ in range(3)],
                             created_ts=0)
            samples = [CaptureSample(face=random_unit_vector(rng, dim))
                       if rng.random() < 0.8 else CaptureSample()
                       for _ in range(rng.randrange(0, 9))]
            verdicts = [classify_sample(s, profile) for s in samples]
            for sample, verdict in zip(samples, verdicts):
                if sample.face is None:
                    assert verdict == NO_FACE
                else:
                    assert verdict.best_score == pytest.approx(
                        best_score_oracle(sample.face, profile.portraits), abs=1e-12)
            session = session_with_scores(
                [v.best_score if v.face_detected else None for v in verdicts])
            t1, t2 = sorted((rng.random(), rng.random()))
            if flag_session(session, t1, ANY):
                assert flag_session(session, t2, ANY)
            if flag_session(session, t1, MAJORITY):
                assert flag_session(session, t1, ANY)
            assert flag_session(session, 0.0, ANY) is False
