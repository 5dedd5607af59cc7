"""Session reconstruction: lifecycle, capture classification, anomalies.

A session spans one unlock to the next screen-off. In harness mode,
CAPTURE events travel in-band and :func:`ingest` turns a whole validated
stream into immutable SessionRecords; in live mode, :func:`live_attach`
pulls samples from a provider at the configured interval.

One ingestion state machine per stream (single writer); finalized
records are immutable and safe to read concurrently.
"""

from __future__ import annotations

import datetime as dt
from concurrent.futures import ThreadPoolExecutor
from concurrent.futures import TimeoutError as FutureTimeout
from dataclasses import dataclass, field
from typing import Callable, Sequence

from . import facegate
from .errors import InvalidStream, ProfileDimensionMismatch, ProviderFailure
from .events import (
    CAPTURE,
    SCREEN_OFF,
    UNLOCK,
    CaptureSample,
    RawEvent,
    sample_ref,
    validate_stream,
)
from .facegate import EnrollmentProfile, SampleClassifier, classify_sample
from .semantic import AppSegment, Coalescer

ANOMALY_EVENT_OUTSIDE_SESSION = "event_outside_session"
ANOMALY_DUPLICATE_UNLOCK = "duplicate_unlock"
ANOMALY_TRUNCATED_SESSION = "truncated_session"
ANOMALY_ORPHAN_SCREEN_OFF = "orphan_screen_off"

DEFAULT_PROVIDER_DEADLINE_MS = 1000


@dataclass(frozen=True)
class FilterConfig:
    """Review-filter and capture settings; validated on construction."""

    threshold: float = 0.6
    aggregation: str = facegate.ANY
    capture_interval_ms: int = 10000
    coalesce_gap_ms: int = 2000
    notifications_visible: bool = True

    def __post_init__(self) -> None:
        facegate.check_threshold(self.threshold)
        facegate.check_aggregation(self.aggregation)
        if not isinstance(self.capture_interval_ms, int) or self.capture_interval_ms <= 0:
            raise ValueError("capture_interval_ms must be a positive integer")
        if not isinstance(self.coalesce_gap_ms, int) or self.coalesce_gap_ms <= 0:
            raise ValueError("coalesce_gap_ms must be a positive integer")
        if not isinstance(self.notifications_visible, bool):
            raise ValueError("notifications_visible must be a boolean")

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "aggregation": self.aggregation,
            "capture_interval_ms": self.capture_interval_ms,
            "coalesce_gap_ms": self.coalesce_gap_ms,
            "notifications_visible": self.notifications_visible,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "FilterConfig":
        known = {f: obj[f] for f in cls.__dataclass_fields__ if f in obj}
        extras = set(obj) - set(cls.__dataclass_fields__)
        if extras:
            raise ValueError(f"unknown config keys: {', '.join(sorted(extras))}")
        if "threshold" in known:
            value = known["threshold"]
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ValueError("threshold must be a number")
            known["threshold"] = float(value)
        return cls(**known)


@dataclass(frozen=True)
class CaptureRecord:
    """One classified capture; the sample payload rides along until stored."""

    ts: int
    face_detected: bool
    best_score: float | None
    sample_ref: str
    sample: CaptureSample | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SessionRecord:
    """One unlock-to-screen-off span, finalized and immutable."""

    session_id: str
    start_ts: int
    end_ts: int
    segments: tuple[AppSegment, ...]
    captures: tuple[CaptureRecord, ...]
    anomalies: tuple[str, ...]


def utc_day(ts_ms: int) -> dt.date:
    return dt.datetime.fromtimestamp(ts_ms / 1000, tz=dt.timezone.utc).date()


def derive_session_id(start_ts: int, sequence: int) -> str:
    """Stable, sortable id: UTC date, start millisecond, same-ms sequence."""
    return f"{utc_day(start_ts).isoformat()}-{start_ts}-{sequence}"


def compute_capture_times(start_ts: int, end_ts: int, interval_ms: int) -> list[int]:
    """Capture schedule: start_ts + k*interval for every k that fits the span.

    The first capture fires at unlock time, maximizing the chance of
    photographing whoever unlocked the device.
    """
    if start_ts > end_ts:
        raise ValueError("start_ts must not exceed end_ts")
    if interval_ms <= 0:
        raise ValueError("interval_ms must be positive")
    times = []
    ts = start_ts
    while ts <= end_ts:
        times.append(ts)
        ts += interval_ms
    return times


def _classify_capture(ts: int, sample: CaptureSample, profile: EnrollmentProfile,
                      classifier: SampleClassifier) -> CaptureRecord:
    if sample.face is not None and len(sample.face) != profile.dimension:
        raise ProfileDimensionMismatch(
            f"capture dimension {len(sample.face)} != profile dimension {profile.dimension}")
    verdict = classifier(sample, profile)
    return CaptureRecord(
        ts=ts,
        face_detected=verdict.face_detected,
        best_score=verdict.best_score,
        sample_ref=sample_ref(sample),
        sample=sample,
    )


class _SessionBuilder:
    __slots__ = ("start_ts", "coalescer", "captures", "anomalies")

    def __init__(self, start_ts: int, gap_ms: int):
        self.start_ts = start_ts
        self.coalescer = Coalescer(gap_ms)
        self.captures: list[CaptureRecord] = []
        self.anomalies: list[str] = []

    def finalize(self, end_ts: int, session_id: str) -> SessionRecord:
        return SessionRecord(
            session_id=session_id,
            start_ts=self.start_ts,
            end_ts=end_ts,
            segments=tuple(self.coalescer.finish()),
            captures=tuple(self.captures),
            anomalies=tuple(self.anomalies),
        )


def ingest(events: Sequence[RawEvent], config: FilterConfig, profile: EnrollmentProfile,
           classifier: SampleClassifier = classify_sample,
           ) -> tuple[list[SessionRecord], list[str]]:
    """Reconstruct sessions from a validated stream.

    Returns the finalized sessions in chronological order plus the global
    anomaly codes for events that belong to no session. Deterministic:
    identical (stream, config, profile) inputs produce identical records.
    """
    report = validate_stream(events)
    if not report.ok:
        pos, reason = report.line_errors[0]
        detail = f"invalid stream: position {pos}: {reason}"
        if len(report.line_errors) > 1:
            detail += f" (+{len(report.line_errors) - 1} more)"
        raise InvalidStream(detail)

    sessions: list[SessionRecord] = []
    global_anomalies: list[str] = []
    active: _SessionBuilder | None = None
    same_ms_sequence: dict[int, int] = {}
    last_ts: int | None = None

    def finalize(builder: _SessionBuilder, end_ts: int) -> SessionRecord:
        seq = same_ms_sequence.get(builder.start_ts, 0)
        same_ms_sequence[builder.start_ts] = seq + 1
        return builder.finalize(end_ts, derive_session_id(builder.start_ts, seq))

    for event in events:
        last_ts = event.ts
        if event.kind == UNLOCK:
            if active is None:
                active = _SessionBuilder(event.ts, config.coalesce_gap_ms)
            else:
                active.anomalies.append(ANOMALY_DUPLICATE_UNLOCK)
        elif event.kind == SCREEN_OFF:
            if active is None:
                global_anomalies.append(ANOMALY_ORPHAN_SCREEN_OFF)
            else:
                sessions.append(finalize(active, event.ts))
                active = None
        elif event.kind == CAPTURE:
            if active is None:
                global_anomalies.append(ANOMALY_EVENT_OUTSIDE_SESSION)
            else:
                sample = event.sample or CaptureSample()
                active.captures.append(_classify_capture(event.ts, sample, profile, classifier))
        else:
            if active is None:
                global_anomalies.append(ANOMALY_EVENT_OUTSIDE_SESSION)
            else:
                active.coalescer.feed(event)

    if active is not None:
        active.anomalies.append(ANOMALY_TRUNCATED_SESSION)
        assert last_ts is not None
        sessions.append(finalize(active, last_ts))

    return sessions, global_anomalies


CaptureProvider = Callable[[int], CaptureSample]


def _call_with_deadline(provider: CaptureProvider, ts: int, deadline_ms: int) -> CaptureSample:
    executor = ThreadPoolExecutor(max_workers=1)
    try:
        future = executor.submit(provider, ts)
        try:
            return future.result(timeout=deadline_ms / 1000)
        except FutureTimeout:
            raise ProviderFailure(f"provider exceeded {deadline_ms} ms deadline at {ts}") from None
        except ProviderFailure:
            raise
        except Exception as exc:
            raise ProviderFailure(f"provider raised at {ts}: {exc}") from exc
    finally:
        executor.shutdown(wait=False, cancel_futures=True)


def live_attach(start_ts: int, end_ts: int, provider: CaptureProvider, config: FilterConfig,
                profile: EnrollmentProfile, classifier: SampleClassifier = classify_sample,
                deadline_ms: int = DEFAULT_PROVIDER_DEADLINE_MS,
                ) -> tuple[list[CaptureRecord], list[str]]:
    """Pull one sample per scheduled capture time from a live provider.

    A provider failure (exception or blown deadline) yields a faceless
    CaptureRecord with an empty sample_ref plus a ``capture_failed@t``
    anomaly; the schedule always completes.
    """
    records: list[CaptureRecord] = []
    anomalies: list[str] = []
    for ts in compute_capture_times(start_ts, end_ts, config.capture_interval_ms):
        try:
            sample = _call_with_deadline(provider, ts, deadline_ms)
            records.append(_classify_capture(ts, sample, profile, classifier))
        except ProviderFailure:
            records.append(CaptureRecord(ts=ts, face_detected=False, best_score=None,
                                         sample_ref=""))
            anomalies.append(f"capture_failed@{ts}")
    return records, anomalies
