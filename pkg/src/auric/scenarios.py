"""Scripted attack scenarios: generation, fixtures, and store-level replay.

Builtin scenarios:

* ``unattended``: the device is left on the table; an intruder unlocks
  it and browses messages, email, and browser history. Every capture
  carries an intruder embedding constructed orthogonal to all three owner
  portraits, so the flag outcome is analytically forced, not tuned.
* ``social-share``: the owner hands the device over to show a photo; the
  borrower flips to another picture, emails it, and flips back. Captures
  start with the owner's face and switch to the intruder's at handoff.
* ``random``: seeded fuzz stream for property tests.

Expected fixtures are recomputed from the events at generation time
(never hand-written), so they are regenerable by construction.

Scenario file format: a one-line JSON fixture header, a blank line, then
ordinary event-stream lines.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass

from . import events as ev
from . import facegate
from .engine import FilterConfig, compute_capture_times, ingest
from .errors import MalformedLine, UnknownScenario
from .events import (
    RawEvent,
    canonical_json,
    parse_event_line,
    serialize_event_line,
    validate_stream,
)
from .facegate import EnrollmentProfile, SampleClassifier, classify_sample, flag_session
from .store import Store

BUILTIN_SCENARIOS = ("unattended", "social-share", "random")

EMBEDDING_DIM = 8

# 2021-03-15 08:00:00 UTC; scenarios start within a few hours of this.
_BASE_TS = 1615795200000


@dataclass(frozen=True)
class FlagExpectation:
    threshold: float
    aggregation: str
    session_flags: tuple[bool, ...]
    any_flagged: bool


@dataclass(frozen=True)
class Fixture:
    session_count: int
    app_lists: tuple[tuple[str, ...], ...]
    flags: tuple[FlagExpectation, ...]


@dataclass(frozen=True)
class Scenario:
    name: str
    seed: int
    owner_profile: EnrollmentProfile
    events: tuple[RawEvent, ...]
    expected: Fixture


@dataclass(frozen=True)
class ReplayReport:
    passed: bool
    diffs: tuple[str, ...]
    session_ids: tuple[str, ...] = ()


def _orthonormal_vectors(rng: random.Random, count: int, dim: int) -> list[tuple[float, ...]]:
    """Gram-Schmidt over seeded gaussian draws; unit norm within tolerance."""
    basis: list[tuple[float, ...]] = []
    while len(basis) < count:
        vec = [rng.gauss(0.0, 1.0) for _ in range(dim)]
        for prev in basis:
            dot = sum(a * b for a, b in zip(vec, prev))
            vec = [a - dot * b for a, b in zip(vec, prev)]
        norm = math.sqrt(math.fsum(v * v for v in vec))
        if norm < 1e-6:
            continue
        basis.append(tuple(v / norm for v in vec))
    return basis


def _faces(rng: random.Random) -> tuple[tuple[tuple[float, ...], ...], tuple[float, ...]]:
    """Three owner portraits plus an intruder embedding orthogonal to all of them."""
    q = _orthonormal_vectors(rng, 4, EMBEDDING_DIM)
    return (q[0], q[1], q[2]), q[3]


def _expected_fixture(stream: list[RawEvent], profile: EnrollmentProfile,
                      config: FilterConfig) -> Fixture:
    sessions, _ = ingest(stream, config, profile)
    app_lists = tuple(tuple(seg.app for seg in s.segments) for s in sessions)
    flags = []
    for threshold, aggregation in ((config.threshold, facegate.ANY),
                                   (config.threshold, facegate.MAJORITY),
                                   (0.0, facegate.ANY)):
        session_flags = tuple(flag_session(s, threshold, aggregation) for s in sessions)
        flags.append(FlagExpectation(threshold=threshold, aggregation=aggregation,
                                     session_flags=session_flags,
                                     any_flagged=any(session_flags)))
    return Fixture(session_count=len(sessions), app_lists=app_lists, flags=tuple(flags))


def _merge_captures(body: list[RawEvent], capture_events: list[RawEvent]) -> list[RawEvent]:
    merged = sorted(body + capture_events, key=lambda e: e.ts)
    return merged


def _unattended_events(rng: random.Random, config: FilterConfig,
                       intruder: tuple[float, ...]) -> list[RawEvent]:
    t = _BASE_TS + rng.randrange(0, 6 * 3600 * 1000)
    start = t
    stream: list[RawEvent] = [ev.unlock(t)]
    body: list[RawEvent] = []

    def advance(lo: int, hi: int) -> int:
        nonlocal t
        t += rng.randrange(lo, hi)
        return t

    browse = (
        ("messages", "Conversations", "Conversation"),
        ("email", "Inbox", "Message"),
        ("browser", "History", "Page"),
    )
    for app, window, item in browse:
        body.append(ev.window_state(advance(600, 1500), app, window))
        body.append(ev.view_click(advance(400, 1200), app, item))
        for _ in range(rng.randint(2, 5)):
            body.append(ev.scroll(advance(250, 900), app, ev.SCROLL_DOWN))
        if rng.random() < 0.5:
            body.append(ev.scroll(advance(250, 900), app, ev.SCROLL_UP))
        advance(2000, 6000)

    end = advance(500, 1500)
    captures = [ev.capture(ts, intruder)
                for ts in compute_capture_times(start, end, config.capture_interval_ms)]
    stream.extend(_merge_captures(body, captures))
    stream.append(ev.screen_off(end))
    return stream


def _social_share_events(rng: random.Random, config: FilterConfig,
                         portraits: tuple[tuple[float, ...], ...],
                         intruder: tuple[float, ...]) -> list[RawEvent]:
    owner_captures = rng.randint(1, 3)
    intruder_captures = rng.randint(2, 4)
    total = owner_captures + intruder_captures
    interval = config.capture_interval_ms

    t = _BASE_TS + rng.randrange(0, 6 * 3600 * 1000)
    start = t
    end = start + (total - 1) * interval + rng.randrange(1000, interval)
    capture_times = compute_capture_times(start, end, interval)

    stream: list[RawEvent] = [ev.unlock(start)]
    body: list[RawEvent] = [ev.window_state(start + rng.randrange(300, 900), "gallery", "Photo")]

    # Handoff: the borrower starts acting after the owner-face captures.
    handoff = capture_times[owner_captures - 1] + rng.randrange(500, interval // 2)
    t = handoff
    recipient = rng.choice(("mia@mail.test", "sam@mail.test", "alex@mail.test"))

    def advance(lo: int, hi: int) -> int:
        nonlocal t
        t += rng.randrange(lo, hi)
        return min(t, end)

    body.append(ev.view_click(advance(200, 800), "gallery", "Next"))
    body.append(ev.view_click(advance(400, 1200), "gallery", "Share"))
    for ch in recipient:
        body.append(ev.text_change(advance(60, 180), "gallery", "recipient", ch))
    body.append(ev.view_click(advance(400, 1200), "gallery", "Send"))
    body.append(ev.view_click(advance(300, 900), "gallery", "Previous"))

    captures = [ev.capture(ts, portraits[0] if i < owner_captures else intruder)
                for i, ts in enumerate(capture_times)]
    stream.extend(_merge_captures(body, captures))
    stream.append(ev.screen_off(end))
    return stream


def _random_events(rng: random.Random, config: FilterConfig,
                   portraits: tuple[tuple[float, ...], ...],
                   intruder: tuple[float, ...]) -> list[RawEvent]:
    apps = ("messages", "email", "browser", "gallery", "notes")
    fields = ("body", "subject", "search", "recipient")
    t = _BASE_TS + rng.randrange(0, 6 * 3600 * 1000)
    stream: list[RawEvent] = []
    for _ in range(rng.randint(0, 120)):
        t += rng.choice((0, rng.randrange(1, 3000)))
        roll = rng.random()
        app = rng.choice(apps)
        if roll < 0.08:
            stream.append(ev.unlock(t))
        elif roll < 0.16:
            stream.append(ev.screen_off(t))
        elif roll < 0.30:
            stream.append(ev.window_state(t, app, f"{app} window"))
        elif roll < 0.45:
            stream.append(ev.view_click(t, app, rng.choice(("OK", "Next", "Send", "Open"))))
        elif roll < 0.70:
            delta = ev.BACKSPACE if rng.random() < 0.2 else rng.choice("abcdefgh !?")
            stream.append(ev.text_change(t, app, rng.choice(fields), delta))
        elif roll < 0.85:
            stream.append(ev.scroll(t, app, rng.choice((ev.SCROLL_UP, ev.SCROLL_DOWN))))
        else:
            face = rng.choice((None, portraits[rng.randrange(3)], intruder))
            stream.append(ev.capture(t, face))
    return stream


def generate(name: str, seed: int, config: FilterConfig | None = None) -> Scenario:
    """Deterministically build a scenario for (name, seed, config)."""
    if name not in BUILTIN_SCENARIOS:
        raise UnknownScenario(name)
    config = config or FilterConfig()
    rng = random.Random(f"{name}:{seed}")
    portraits, intruder = _faces(rng)
    profile = EnrollmentProfile(owner_id=f"owner-{seed}", portraits=portraits,
                                created_ts=_BASE_TS)
    if name == "unattended":
        stream = _unattended_events(rng, config, intruder)
    elif name == "social-share":
        stream = _social_share_events(rng, config, portraits, intruder)
    else:
        stream = _random_events(rng, config, portraits, intruder)
    return Scenario(name=name, seed=seed, owner_profile=profile, events=tuple(stream),
                    expected=_expected_fixture(list(stream), profile, config))


def replay(scenario: Scenario, config: FilterConfig, store: Store,
           classifier: SampleClassifier = classify_sample) -> ReplayReport:
    """Ingest, append, then check the fixture against store queries.

    Diffs are prefixed with their category (``sessions:``, ``apps:``,
    ``flags:``) so callers can distinguish action-log mismatches from
    filter-outcome mismatches.
    """
    store.set_profile(scenario.owner_profile)
    sessions, _ = ingest(list(scenario.events), config, scenario.owner_profile, classifier)
    for record in sessions:
        store.append_session(record)

    diffs: list[str] = []
    expected = scenario.expected

    days = store.list_days()
    stored_count = sum(day.session_count for day in days)
    if stored_count != expected.session_count:
        diffs.append(f"sessions: expected {expected.session_count}, stored {stored_count}")

    ordered = [summary for day in days
               for summary in store.list_sessions(day.date)]
    ordered.sort(key=lambda s: (s.start_ts, s.session_id))
    for i, summary in enumerate(ordered):
        if i >= len(expected.app_lists):
            break
        apps = tuple(seg.app for seg in store.get_session(summary.session_id).segments)
        if apps != expected.app_lists[i]:
            diffs.append(f"apps: session {i}: expected {list(expected.app_lists[i])}, "
                         f"stored {list(apps)}")

    for expectation in expected.flags:
        flags = []
        any_flagged = False
        for day in store.list_days(threshold=expectation.threshold,
                                   aggregation=expectation.aggregation):
            any_flagged = any_flagged or day.flagged
        for day in days:
            for summary in store.list_sessions(day.date, threshold=expectation.threshold,
                                               aggregation=expectation.aggregation):
                flags.append((summary.start_ts, summary.session_id, summary.flagged))
        flags.sort(key=lambda item: (item[0], item[1]))
        got = tuple(flag for _, _, flag in flags)
        label = f"threshold={expectation.threshold} agg={expectation.aggregation}"
        if got != expectation.session_flags:
            diffs.append(f"flags: {label}: expected {list(expectation.session_flags)}, "
                         f"stored {list(got)}")
        if any_flagged != expectation.any_flagged:
            diffs.append(f"flags: {label}: expected any_flagged={expectation.any_flagged}, "
                         f"stored {any_flagged}")

    return ReplayReport(passed=not diffs, diffs=tuple(diffs),
                        session_ids=tuple(s.session_id for s in sessions))


# --- scenario files -----------------------------------------------------------

def _fixture_to_dict(fixture: Fixture) -> dict:
    return {
        "session_count": fixture.session_count,
        "app_lists": [list(apps) for apps in fixture.app_lists],
        "flags": [{"threshold": f.threshold, "aggregation": f.aggregation,
                   "session_flags": list(f.session_flags), "any_flagged": f.any_flagged}
                  for f in fixture.flags],
    }


def _fixture_from_dict(obj: dict) -> Fixture:
    return Fixture(
        session_count=obj["session_count"],
        app_lists=tuple(tuple(apps) for apps in obj["app_lists"]),
        flags=tuple(FlagExpectation(threshold=f["threshold"], aggregation=f["aggregation"],
                                    session_flags=tuple(f["session_flags"]),
                                    any_flagged=f["any_flagged"])
                    for f in obj["flags"]),
    )


def scenario_to_text(scenario: Scenario) -> str:
    """Fixture header, blank line, then event-stream lines."""
    header = {
        "name": scenario.name,
        "seed": scenario.seed,
        "owner": {
            "owner_id": scenario.owner_profile.owner_id,
            "created_ts": scenario.owner_profile.created_ts,
            "portraits": [list(p) for p in scenario.owner_profile.portraits],
        },
        "expected": _fixture_to_dict(scenario.expected),
    }
    lines = [canonical_json(header), ""]
    lines.extend(serialize_event_line(event) for event in scenario.events)
    return "\n".join(lines) + "\n"


def scenario_from_text(text: str) -> Scenario:
    header_text, _, body = text.partition("\n\n")
    try:
        header = json.loads(header_text)
    except json.JSONDecodeError as exc:
        raise MalformedLine(f"bad scenario header: {exc.msg}") from None
    owner = header["owner"]
    profile = EnrollmentProfile(
        owner_id=owner["owner_id"], created_ts=owner["created_ts"],
        portraits=tuple(tuple(float(x) for x in p) for p in owner["portraits"]),
    )
    stream = tuple(parse_event_line(line) for line in body.splitlines() if line.strip())
    report = validate_stream(stream)
    if not report.ok:
        pos, reason = report.line_errors[0]
        raise MalformedLine(f"scenario stream invalid at event {pos}: {reason}")
    return Scenario(name=header["name"], seed=header["seed"], owner_profile=profile,
                    events=stream, expected=_fixture_from_dict(header["expected"]))
