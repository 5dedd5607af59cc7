"""Independent brute-force implementations the real code is checked against.

Nothing here imports the implementation paths it verifies: typing is
simulated character by character, similarity by an explicit triple loop,
session app lists by a naive splitter, and byte totals by os.walk.
"""

from __future__ import annotations

import os
import random

from auric import events as ev
from auric.events import RawEvent


def best_score_oracle(face: tuple[float, ...],
                      portraits: tuple[tuple[float, ...], ...]) -> float:
    best = 0.0
    for portrait in portraits:
        dot = 0.0
        for i in range(len(face)):
            dot += face[i] * portrait[i]
        if dot > 1.0:
            dot = 1.0
        if dot < 0.0:
            dot = 0.0
        if dot > best:
            best = dot
    return best


class TypingSimulator:
    """Character-by-character replay of the coalescing rules for TYPED text.

    Tracks, per (app, field): the typed strings in flush order and the
    number of effective backspaces (a backspace that actually removed a
    character inside its own typing run).
    """

    def __init__(self, gap_ms: int):
        self.gap_ms = gap_ms
        self.outputs: dict[tuple[str, str], list[str]] = {}
        self.effective_backspaces: dict[tuple[str, str], int] = {}
        self.nonbackspace_chars: dict[tuple[str, str], int] = {}
        self._open: tuple[str, str, int, list[str]] | None = None  # app, field, last_ts, chars

    def _close(self) -> None:
        if self._open is None:
            return
        app, field, _, chars = self._open
        self.outputs.setdefault((app, field), []).append("".join(chars))
        self._open = None

    def feed(self, event: RawEvent) -> None:
        if event.kind != ev.TEXT_CHANGE:
            # Any other event breaks an open typing run.
            self._close()
            return
        app, field, delta = event.app or "", event.field or "", event.delta or ""
        if self._open is not None:
            open_app, open_field, last_ts, _ = self._open
            if open_app != app or open_field != field or event.ts - last_ts > self.gap_ms:
                self._close()
        if self._open is None:
            self._open = (app, field, event.ts, [])
        _, _, _, chars = self._open
        if delta == ev.BACKSPACE:
            if chars:
                chars.pop()
                self.effective_backspaces[(app, field)] = (
                    self.effective_backspaces.get((app, field), 0) + 1)
        else:
            for ch in delta:
                chars.append(ch)
            self.nonbackspace_chars[(app, field)] = (
                self.nonbackspace_chars.get((app, field), 0) + len(delta))
        self._open = (app, field, event.ts, chars)

    def finish(self) -> None:
        self._close()


def simulate_typing(events: list[RawEvent], gap_ms: int) -> TypingSimulator:
    sim = TypingSimulator(gap_ms)
    for event in events:
        sim.feed(event)
    sim.finish()
    return sim


def naive_session_apps(events: list[RawEvent]) -> list[list[str]]:
    """Independent session splitter: per-session app order from app changes."""
    sessions: list[list[str]] = []
    apps: list[str] = []
    current: str | None = None
    active = False
    for event in events:
        if event.kind == ev.UNLOCK:
            if not active:
                active = True
                apps = []
                current = None
        elif event.kind == ev.SCREEN_OFF:
            if active:
                sessions.append(apps)
                active = False
        elif event.kind == ev.CAPTURE:
            continue
        elif active and event.app != current:
            apps.append(event.app or "")
            current = event.app
    if active:
        sessions.append(apps)
    return sessions


def dir_byte_sum(root: str) -> int:
    """Recursive byte total via os.walk (independent of Store's accounting)."""
    total = 0
    for dirpath, _, filenames in os.walk(root):
        for name in filenames:
            total += os.path.getsize(os.path.join(dirpath, name))
    return total


def random_app_stream(rng: random.Random, max_events: int = 80) -> list[RawEvent]:
    """App-scoped fuzz stream exercising gap boundaries and backspaces."""
    apps = ("a1", "a2", "a3")
    fields = ("f1", "f2")
    t = rng.randrange(0, 10**6)
    out: list[RawEvent] = []
    for _ in range(rng.randrange(0, max_events)):
        t += rng.choice((0, 1, 50, 400, 1500, 1999, 2000, 2001, 3000, 6000))
        app = rng.choice(apps)
        roll = rng.random()
        if roll < 0.15:
            out.append(ev.window_state(t, app, "w"))
        elif roll < 0.30:
            out.append(ev.view_click(t, app, "b"))
        elif roll < 0.85:
            if rng.random() < 0.3:
                delta = ev.BACKSPACE
            else:
                delta = rng.choice(("a", "b", "xy", "z!", " "))
            out.append(ev.text_change(t, app, rng.choice(fields), delta))
        else:
            out.append(ev.scroll(t, app, rng.choice((ev.SCROLL_UP, ev.SCROLL_DOWN))))
    return out


def random_unit_vector(rng: random.Random, dim: int) -> tuple[float, ...]:
    while True:
        vec = [rng.gauss(0.0, 1.0) for _ in range(dim)]
        norm = sum(v * v for v in vec) ** 0.5
        if norm > 1e-6:
            return tuple(v / norm for v in vec)
