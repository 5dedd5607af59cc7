"""Owner enrollment and face-similarity verdicts over capture samples.

Similarity is cosine (dot product of unit vectors) clamped to [0, 1];
the best score against the three enrollment portraits is what gets
recorded. Classification is pluggable: anything matching the
:data:`SampleClassifier` signature can replace :func:`classify_sample`,
and doing so changes only capture metadata and flagging, never the
action log.

All functions are pure over immutable inputs.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable, Iterable, Sequence

from .errors import BadEmbedding, DimensionMismatch, WrongPortraitCount
from .events import CaptureSample, check_embedding

if TYPE_CHECKING:
    from .engine import SessionRecord

ANY = "ANY"
MAJORITY = "MAJORITY"
AGGREGATIONS = frozenset({ANY, MAJORITY})

PORTRAIT_COUNT = 3


@dataclass(frozen=True)
class EnrollmentProfile:
    """The owner's three reference portraits collected at setup."""

    owner_id: str
    portraits: tuple[tuple[float, ...], ...]
    created_ts: int

    @property
    def dimension(self) -> int:
        return len(self.portraits[0])


@dataclass(frozen=True)
class CaptureVerdict:
    """Per-sample outcome: no face, or a face with its best similarity."""

    face_detected: bool
    best_score: float | None = None


NO_FACE = CaptureVerdict(face_detected=False)

SampleClassifier = Callable[[CaptureSample, EnrollmentProfile], CaptureVerdict]


def now_ms() -> int:
    return int(time.time() * 1000)


def enroll(owner_id: str, portraits: Sequence[Iterable[float]],
           created_ts: int | None = None) -> EnrollmentProfile:
    """Build a profile from exactly three unit-norm portraits of one dimension."""
    if len(portraits) != PORTRAIT_COUNT:
        raise WrongPortraitCount(f"expected {PORTRAIT_COUNT} portraits, got {len(portraits)}")
    vectors = [check_embedding(p, f"portrait {i + 1}") for i, p in enumerate(portraits)]
    dims = {len(v) for v in vectors}
    if len(dims) != 1:
        raise BadEmbedding(f"portraits have mixed dimensions: {sorted(dims)}")
    return EnrollmentProfile(
        owner_id=owner_id,
        portraits=tuple(vectors),
        created_ts=now_ms() if created_ts is None else created_ts,
    )


def classify_sample(sample: CaptureSample, profile: EnrollmentProfile) -> CaptureVerdict:
    """Reference classifier: best clamped cosine against the three portraits."""
    if sample.face is None:
        return NO_FACE
    if len(sample.face) != profile.dimension:
        raise DimensionMismatch(
            f"sample dimension {len(sample.face)} != profile dimension {profile.dimension}")
    best = 0.0
    for portrait in profile.portraits:
        dot = sum(a * b for a, b in zip(sample.face, portrait))
        score = min(1.0, max(0.0, dot))
        if score > best:
            best = score
    return CaptureVerdict(face_detected=True, best_score=best)


def always_no_face(sample: CaptureSample, profile: EnrollmentProfile) -> CaptureVerdict:
    """Degenerate classifier that never detects a face (false-negative extreme)."""
    return NO_FACE


def check_threshold(threshold: float) -> float:
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must be in [0,1]")
    return float(threshold)


def check_aggregation(aggregation: str) -> str:
    if aggregation not in AGGREGATIONS:
        raise ValueError("aggregation must be ANY or MAJORITY")
    return aggregation


def flag_scores(verdicts: Iterable[tuple[bool, float | None]],
                threshold: float, aggregation: str = ANY) -> bool:
    """Core flag rule over (face_detected, best_score) pairs.

    A capture is NON_OWNER iff a face was detected with score below the
    threshold, OWNER iff at or above it; samples without a face count for
    neither side. ANY flags on one NON_OWNER capture; MAJORITY flags when
    NON_OWNER captures outnumber OWNER ones.
    """
    check_threshold(threshold)
    check_aggregation(aggregation)
    non_owner = 0
    owner = 0
    for face_detected, best_score in verdicts:
        if not face_detected or best_score is None:
            continue
        if best_score < threshold:
            non_owner += 1
        else:
            owner += 1
    if aggregation == ANY:
        return non_owner >= 1
    return non_owner > owner


def flag_session(session: "SessionRecord", threshold: float, aggregation: str = ANY) -> bool:
    """True iff the session's captures flag under the given rule."""
    return flag_scores(((c.face_detected, c.best_score) for c in session.captures),
                       threshold, aggregation)


def flag_day(sessions: Iterable["SessionRecord"], threshold: float,
             aggregation: str = ANY) -> bool:
    """True iff any session of the day flags."""
    return any(flag_session(s, threshold, aggregation) for s in sessions)
