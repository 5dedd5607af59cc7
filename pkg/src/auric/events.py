"""Raw event taxonomy and the line-delimited stream format.

The wire format is one JSON object per line. Field names are part of the
contract: ``ts``, ``kind``, and the kind-specific ``app``, ``window``,
``widget``, ``field``, ``delta``, ``direction``, ``face``. Unknown fields
are rejected; decoding then re-encoding a valid line yields the canonical
form produced by :func:`serialize_event_line`.

All functions here are pure and safe to call concurrently.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from typing import Any, Iterable

from .errors import BadEmbedding, MalformedLine, NegativeTimestamp, UnknownKind

UNLOCK = "UNLOCK"
SCREEN_OFF = "SCREEN_OFF"
WINDOW_STATE = "WINDOW_STATE"
VIEW_CLICK = "VIEW_CLICK"
TEXT_CHANGE = "TEXT_CHANGE"
SCROLL = "SCROLL"
CAPTURE = "CAPTURE"

KINDS = frozenset({UNLOCK, SCREEN_OFF, WINDOW_STATE, VIEW_CLICK, TEXT_CHANGE, SCROLL, CAPTURE})
APP_SCOPED_KINDS = frozenset({WINDOW_STATE, VIEW_CLICK, TEXT_CHANGE, SCROLL})

SCROLL_UP = "UP"
SCROLL_DOWN = "DOWN"
DIRECTIONS = frozenset({SCROLL_UP, SCROLL_DOWN})

# Single-character sentinel for "one character deleted" in TEXT_CHANGE deltas.
BACKSPACE = "\b"

UNIT_NORM_TOLERANCE = 1e-6

# Kind-specific wire fields, in canonical serialization order.
_KIND_FIELDS: dict[str, tuple[str, ...]] = {
    UNLOCK: (),
    SCREEN_OFF: (),
    WINDOW_STATE: ("app", "window"),
    VIEW_CLICK: ("app", "widget"),
    TEXT_CHANGE: ("app", "field", "delta"),
    SCROLL: ("app", "direction"),
    CAPTURE: ("face",),
}


def canonical_json(obj: Any) -> str:
    """Compact, non-ASCII-preserving JSON used everywhere bytes must be stable."""
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def check_embedding(values: Iterable[Any], what: str = "embedding") -> tuple[float, ...]:
    """Validate an embedding: non-empty, finite floats, unit Euclidean norm."""
    items = list(values)
    if any(isinstance(v, bool) for v in items):
        raise BadEmbedding(f"{what} must contain only numbers")
    try:
        vec = tuple(float(v) for v in items)
    except (TypeError, ValueError) as exc:
        raise BadEmbedding(f"{what} must contain only numbers: {exc}") from None
    if not vec:
        raise BadEmbedding(f"{what} must not be empty")
    if not all(math.isfinite(v) for v in vec):
        raise BadEmbedding(f"{what} must be finite")
    norm = math.sqrt(math.fsum(v * v for v in vec))
    if abs(norm - 1.0) > UNIT_NORM_TOLERANCE:
        raise BadEmbedding(f"{what} must have unit norm, got {norm!r}")
    return vec


@dataclass(frozen=True)
class CaptureSample:
    """One periodic camera sample: either no face, or a unit-norm embedding."""

    face: tuple[float, ...] | None = None


def sample_to_bytes(sample: CaptureSample) -> bytes:
    """Canonical stored form of a capture sample (content-addressed blob)."""
    face = list(sample.face) if sample.face is not None else None
    return canonical_json({"face": face}).encode("utf-8")


def sample_ref(sample: CaptureSample) -> str:
    """Content hash used to address the stored sample."""
    return hashlib.sha256(sample_to_bytes(sample)).hexdigest()


def sample_from_bytes(data: bytes) -> CaptureSample:
    obj = json.loads(data.decode("utf-8"))
    face = obj.get("face")
    if face is None:
        return CaptureSample()
    return CaptureSample(face=check_embedding(face, "face"))


@dataclass(frozen=True)
class RawEvent:
    """One time-stamped low-level UI/system event."""

    ts: int
    kind: str
    app: str | None = None
    window: str | None = None
    widget: str | None = None
    field: str | None = None
    delta: str | None = None
    direction: str | None = None
    sample: CaptureSample | None = None


def unlock(ts: int) -> RawEvent:
    return RawEvent(ts=ts, kind=UNLOCK)


def screen_off(ts: int) -> RawEvent:
    return RawEvent(ts=ts, kind=SCREEN_OFF)


def window_state(ts: int, app: str, window: str) -> RawEvent:
    return RawEvent(ts=ts, kind=WINDOW_STATE, app=app, window=window)


def view_click(ts: int, app: str, widget: str) -> RawEvent:
    return RawEvent(ts=ts, kind=VIEW_CLICK, app=app, widget=widget)


def text_change(ts: int, app: str, field: str, delta: str) -> RawEvent:
    return RawEvent(ts=ts, kind=TEXT_CHANGE, app=app, field=field, delta=delta)


def scroll(ts: int, app: str, direction: str) -> RawEvent:
    return RawEvent(ts=ts, kind=SCROLL, app=app, direction=direction)


def capture(ts: int, face: Iterable[float] | None = None) -> RawEvent:
    sample = CaptureSample() if face is None else CaptureSample(face=tuple(face))
    return RawEvent(ts=ts, kind=CAPTURE, sample=sample)


def event_violations(event: RawEvent) -> list[str]:
    """Invariant violations for a programmatically built event (empty = valid)."""
    problems: list[str] = []
    if not isinstance(event.ts, int) or isinstance(event.ts, bool):
        problems.append("ts must be an integer")
    elif event.ts < 0:
        problems.append("negative timestamp")
    if event.kind not in KINDS:
        problems.append(f"unknown kind {event.kind!r}")
        return problems
    if event.kind in APP_SCOPED_KINDS and not event.app:
        problems.append("app must be non-empty")
    if event.kind == TEXT_CHANGE:
        delta = event.delta
        if not delta:
            problems.append("delta must be non-empty")
        elif BACKSPACE in delta and delta != BACKSPACE:
            problems.append("delta may contain the backspace sentinel only by itself")
    if event.kind == SCROLL and event.direction not in DIRECTIONS:
        problems.append("direction must be UP or DOWN")
    if event.kind == CAPTURE:
        if event.sample is None:
            problems.append("capture event must carry a sample")
        elif event.sample.face is not None:
            try:
                check_embedding(event.sample.face, "face")
            except BadEmbedding as exc:
                problems.append(str(exc))
    return problems


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of stream validation; ok iff no line errors were recorded."""

    line_errors: tuple[tuple[int, str], ...] = ()

    @property
    def ok(self) -> bool:
        return not self.line_errors


def validate_stream(events: Iterable[RawEvent]) -> ValidationReport:
    """Check timestamp ordering and per-event invariants.

    Violations are reported with their 1-based position; nothing is raised.
    """
    errors: list[tuple[int, str]] = []
    prev_ts: int | None = None
    for pos, event in enumerate(events, start=1):
        for reason in event_violations(event):
            errors.append((pos, reason))
        if isinstance(event.ts, int) and not isinstance(event.ts, bool):
            if prev_ts is not None and event.ts < prev_ts:
                errors.append((pos, f"timestamp regression ({event.ts} < {prev_ts})"))
            prev_ts = event.ts
    return ValidationReport(line_errors=tuple(errors))


def parse_event_line(line: str) -> RawEvent:
    """Decode one wire-format record into a RawEvent."""
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedLine(f"invalid JSON: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise MalformedLine("event record must be an object")

    if "ts" not in obj:
        raise MalformedLine("missing field 'ts'")
    ts = obj["ts"]
    if not isinstance(ts, int) or isinstance(ts, bool):
        raise MalformedLine("'ts' must be an integer")
    if ts < 0:
        raise NegativeTimestamp(f"ts {ts} is negative")

    if "kind" not in obj:
        raise MalformedLine("missing field 'kind'")
    kind = obj["kind"]
    if not isinstance(kind, str):
        raise MalformedLine("'kind' must be a string")
    if kind not in KINDS:
        raise UnknownKind(f"unknown kind {kind!r}")

    allowed = {"ts", "kind", *_KIND_FIELDS[kind]}
    extras = sorted(set(obj) - allowed)
    if extras:
        raise MalformedLine(f"unknown fields for {kind}: {', '.join(extras)}")
    if kind == CAPTURE:
        face = obj.get("face")
        if face is not None and not isinstance(face, list):
            raise MalformedLine("'face' must be an array or null")
        sample = CaptureSample() if face is None else CaptureSample(face=check_embedding(face, "face"))
        return RawEvent(ts=ts, kind=kind, sample=sample)

    values: dict[str, str] = {}
    for name in _KIND_FIELDS[kind]:
        if name not in obj:
            raise MalformedLine(f"missing field {name!r} for {kind}")
        value = obj[name]
        if not isinstance(value, str):
            raise MalformedLine(f"{name!r} must be a string")
        values[name] = value
    event = RawEvent(ts=ts, kind=kind, **values)
    problems = event_violations(event)
    if problems:
        raise MalformedLine("; ".join(problems))
    return event


def serialize_event_line(event: RawEvent) -> str:
    """Canonical wire form of a valid event (inverse of parse_event_line)."""
    record: dict[str, Any] = {"ts": event.ts, "kind": event.kind}
    if event.kind == CAPTURE:
        sample = event.sample or CaptureSample()
        if sample.face is not None:
            record["face"] = list(sample.face)
        return canonical_json(record)
    for name in _KIND_FIELDS[event.kind]:
        record[name] = getattr(event, name)
    return canonical_json(record)


def validate_lines(lines: Iterable[str]) -> tuple[list[RawEvent], ValidationReport]:
    """Parse a text stream, collecting both syntax and ordering errors.

    Blank lines are skipped; error positions are 1-based line numbers in the
    input. Returns the successfully parsed events (in stream order) and a
    report covering every failed line plus timestamp regressions.
    """
    events: list[RawEvent] = []
    errors: list[tuple[int, str]] = []
    prev_ts: int | None = None
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            event = parse_event_line(line)
        except (MalformedLine, UnknownKind, BadEmbedding, NegativeTimestamp) as exc:
            errors.append((lineno, str(exc)))
            continue
        if prev_ts is not None and event.ts < prev_ts:
            errors.append((lineno, f"timestamp regression ({event.ts} < {prev_ts})"))
        prev_ts = event.ts
        events.append(event)
    return events, ValidationReport(line_errors=tuple(errors))
