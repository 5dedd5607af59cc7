"""Semantic filter: turns raw in-session events into readable action records.

Coalescing rules:

* A WINDOW_STATE for a new app closes the current segment and opens a new
  one with an OPENED action; a WINDOW_STATE for the same app is absorbed
  (it extends the segment and counts toward the OPENED action's sources).
* TEXT_CHANGE events merge into one TYPED action while the (app, field)
  pair is unchanged, the inter-event gap stays within ``gap_ms``, and no
  other event intervenes. Any break flushes the pending TYPED action.
* VIEW_CLICK maps 1:1 to TAPPED.
* Consecutive same-direction SCROLLs in one app merge into a single
  SCROLLED action with a count.
* App-scoped events arriving before any WINDOW_STATE for their app
  implicitly open a segment with a synthesized OPENED at the event's ts.

The coalescer is a single-writer state machine: feed one stream from one
thread; completed segments are immutable and safe to share.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NotAppScoped
from .events import (
    APP_SCOPED_KINDS,
    BACKSPACE,
    SCROLL,
    TEXT_CHANGE,
    VIEW_CLICK,
    WINDOW_STATE,
    RawEvent,
)

OPENED = "OPENED"
TAPPED = "TAPPED"
TYPED = "TYPED"
SCROLLED = "SCROLLED"

DEFAULT_GAP_MS = 2000


@dataclass(frozen=True)
class ActionRecord:
    """One human-readable action inside an app segment.

    ``source_events`` counts the raw events folded into this action
    (0 for a synthesized OPENED), so streams can be audited for drops.
    """

    app: str
    ts_start: int
    ts_end: int
    kind: str
    description: str
    source_events: int
    widget: str | None = None
    field: str | None = None
    text: str | None = None
    direction: str | None = None
    count: int | None = None


@dataclass(frozen=True)
class AppSegment:
    """A chronological run of actions within one app."""

    app: str
    ts_start: int
    ts_end: int
    actions: tuple[ActionRecord, ...]


def _template(kind: str, app: str, widget: str | None, field: str | None,
              text: str | None, direction: str | None, count: int | None) -> str:
    if kind == OPENED:
        return f"Opened {app}"
    if kind == TAPPED:
        return f'Tapped "{widget}"'
    if kind == TYPED:
        return f'Typed "{text}" in {field}'
    if kind == SCROLLED:
        return f"Scrolled {direction} ×{count}"
    raise ValueError(f"unknown action kind {kind!r}")


def describe(action: ActionRecord) -> str:
    """Canonical, locale-independent description of an action."""
    return _template(action.kind, action.app, action.widget, action.field,
                     action.text, action.direction, action.count)


def apply_delta(text: str, delta: str) -> str:
    """Fold one TEXT_CHANGE delta into accumulated text."""
    if delta == BACKSPACE:
        return text[:-1]
    return text + delta


class _TypedBuilder:
    __slots__ = ("app", "field", "ts_start", "ts_end", "text", "sources")

    def __init__(self, app: str, field: str, ts: int):
        self.app = app
        self.field = field
        self.ts_start = ts
        self.ts_end = ts
        self.text = ""
        self.sources = 0

    def absorb(self, event: RawEvent) -> None:
        self.text = apply_delta(self.text, event.delta or "")
        self.ts_end = event.ts
        self.sources += 1

    def build(self) -> ActionRecord:
        return ActionRecord(
            app=self.app, ts_start=self.ts_start, ts_end=self.ts_end, kind=TYPED,
            description=_template(TYPED, self.app, None, self.field, self.text, None, None),
            source_events=self.sources, field=self.field, text=self.text,
        )


class _ScrollBuilder:
    __slots__ = ("app", "direction", "ts_start", "ts_end", "count")

    def __init__(self, app: str, direction: str, ts: int):
        self.app = app
        self.direction = direction
        self.ts_start = ts
        self.ts_end = ts
        self.count = 0

    def absorb(self, event: RawEvent) -> None:
        self.count += 1
        self.ts_end = event.ts

    def build(self) -> ActionRecord:
        return ActionRecord(
            app=self.app, ts_start=self.ts_start, ts_end=self.ts_end, kind=SCROLLED,
            description=_template(SCROLLED, self.app, None, None, None, self.direction, self.count),
            source_events=self.count, direction=self.direction, count=self.count,
        )


class _SegmentState:
    __slots__ = ("app", "ts_start", "ts_end", "opened_ts", "opened_sources", "actions", "pending")

    def __init__(self, app: str, ts: int, opened_sources: int):
        self.app = app
        self.ts_start = ts
        self.ts_end = ts
        self.opened_ts = ts
        self.opened_sources = opened_sources
        self.actions: list[ActionRecord] = []
        self.pending: _TypedBuilder | _ScrollBuilder | None = None

    def flush_pending(self) -> None:
        if self.pending is not None:
            self.actions.append(self.pending.build())
            self.pending = None

    def close(self) -> AppSegment:
        self.flush_pending()
        opened = ActionRecord(
            app=self.app, ts_start=self.opened_ts, ts_end=self.opened_ts, kind=OPENED,
            description=_template(OPENED, self.app, None, None, None, None, None),
            source_events=self.opened_sources,
        )
        return AppSegment(app=self.app, ts_start=self.ts_start, ts_end=self.ts_end,
                          actions=(opened, *self.actions))


class Coalescer:
    """Streaming coalescer; equivalent to one batch :func:`coalesce` call.

    Feed events in stream order, call :meth:`drain` at any point to take
    the segments completed so far, and :meth:`finish` once the session
    body ends.
    """

    def __init__(self, gap_ms: int = DEFAULT_GAP_MS):
        if gap_ms <= 0:
            raise ValueError("gap_ms must be positive")
        self._gap_ms = gap_ms
        self._completed: list[AppSegment] = []
        self._segment: _SegmentState | None = None

    def feed(self, event: RawEvent) -> None:
        if event.kind not in APP_SCOPED_KINDS:
            raise NotAppScoped(f"{event.kind} events cannot be coalesced")
        app = event.app or ""

        if event.kind == WINDOW_STATE:
            if self._segment is not None and self._segment.app == app:
                seg = self._segment
                seg.flush_pending()
                seg.opened_sources += 1
                seg.ts_end = event.ts
            else:
                self._open_segment(app, event.ts, opened_sources=1)
            return

        if self._segment is None or self._segment.app != app:
            self._open_segment(app, event.ts, opened_sources=0)
        seg = self._segment
        assert seg is not None

        if event.kind == VIEW_CLICK:
            seg.flush_pending()
            widget = event.widget or ""
            seg.actions.append(ActionRecord(
                app=app, ts_start=event.ts, ts_end=event.ts, kind=TAPPED,
                description=_template(TAPPED, app, widget, None, None, None, None),
                source_events=1, widget=widget,
            ))
        elif event.kind == TEXT_CHANGE:
            pending = seg.pending
            if (isinstance(pending, _TypedBuilder) and pending.field == event.field
                    and event.ts - pending.ts_end <= self._gap_ms):
                pending.absorb(event)
            else:
                seg.flush_pending()
                builder = _TypedBuilder(app, event.field or "", event.ts)
                builder.absorb(event)
                seg.pending = builder
        elif event.kind == SCROLL:
            pending = seg.pending
            if isinstance(pending, _ScrollBuilder) and pending.direction == event.direction:
                pending.absorb(event)
            else:
                seg.flush_pending()
                builder = _ScrollBuilder(app, event.direction or "", event.ts)
                builder.absorb(event)
                seg.pending = builder
        seg.ts_end = event.ts

    def drain(self) -> list[AppSegment]:
        """Take the segments completed since the last drain."""
        done, self._completed = self._completed, []
        return done

    def finish(self) -> list[AppSegment]:
        """Close the open segment and return all undrained segments."""
        if self._segment is not None:
            self._completed.append(self._segment.close())
            self._segment = None
        return self.drain()

    def _open_segment(self, app: str, ts: int, opened_sources: int) -> None:
        if self._segment is not None:
            self._completed.append(self._segment.close())
        self._segment = _SegmentState(app, ts, opened_sources)


def coalesce(events: list[RawEvent], gap_ms: int = DEFAULT_GAP_MS) -> list[AppSegment]:
    """Coalesce a time-ordered, app-scoped event list into app segments."""
    machine = Coalescer(gap_ms)
    for event in events:
        machine.feed(event)
    return machine.finish()
