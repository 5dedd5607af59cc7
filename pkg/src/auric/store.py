"""Append-only, day-indexed session store.

Layout under the store root:

    profile.json           owner enrollment profile
    config.json            filter configuration (written on first change)
    config_events.jsonl    append-only log of enroll / config changes
    sessions/<day>/<session_id>.json
    captures/<sha256>.bin  content-addressed capture samples
    index.json             day -> session summaries (derivable from files)

Session files are never modified after append. Writes publish via
write-temp-then-rename, so readers only ever see fully written files;
the session-file rename is the commit point. A single writer is assumed,
any number of concurrent readers is fine.
"""

from __future__ import annotations

import datetime as dt
import json
import os
from dataclasses import dataclass
from pathlib import Path

from . import facegate
from .engine import CaptureRecord, FilterConfig, SessionRecord
from .errors import DuplicateSession, IoFailure, NotFound
from .events import canonical_json, check_embedding, sample_to_bytes
from .facegate import EnrollmentProfile
from .semantic import ActionRecord, AppSegment, OPENED, SCROLLED, TAPPED, TYPED

# Injection point for crash-consistency tests.
_replace = os.replace

_ACTION_PAYLOAD_FIELDS = {
    OPENED: (),
    TAPPED: ("widget",),
    TYPED: ("field", "text"),
    SCROLLED: ("direction", "count"),
}


# --- canonical serialization ------------------------------------------------

def action_to_dict(action: ActionRecord) -> dict:
    obj: dict = {"app": action.app, "ts_start": action.ts_start, "ts_end": action.ts_end,
                 "kind": action.kind}
    for name in _ACTION_PAYLOAD_FIELDS.get(action.kind, ()):
        obj[name] = getattr(action, name)
    obj["description"] = action.description
    obj["source_events"] = action.source_events
    return obj


def action_from_dict(obj: dict) -> ActionRecord:
    payload = {name: obj[name] for name in _ACTION_PAYLOAD_FIELDS.get(obj["kind"], ())}
    return ActionRecord(
        app=obj["app"], ts_start=obj["ts_start"], ts_end=obj["ts_end"], kind=obj["kind"],
        description=obj["description"], source_events=obj["source_events"], **payload,
    )


def segment_to_dict(segment: AppSegment) -> dict:
    return {"app": segment.app, "ts_start": segment.ts_start, "ts_end": segment.ts_end,
            "actions": [action_to_dict(a) for a in segment.actions]}


def segment_from_dict(obj: dict) -> AppSegment:
    return AppSegment(app=obj["app"], ts_start=obj["ts_start"], ts_end=obj["ts_end"],
                      actions=tuple(action_from_dict(a) for a in obj["actions"]))


def capture_to_dict(record: CaptureRecord) -> dict:
    obj: dict = {"ts": record.ts, "face_detected": record.face_detected}
    if record.face_detected:
        obj["best_score"] = record.best_score
    obj["sample_ref"] = record.sample_ref
    return obj


def capture_from_dict(obj: dict) -> CaptureRecord:
    return CaptureRecord(ts=obj["ts"], face_detected=obj["face_detected"],
                         best_score=obj.get("best_score"), sample_ref=obj["sample_ref"])


def session_to_dict(record: SessionRecord) -> dict:
    return {
        "session_id": record.session_id,
        "start_ts": record.start_ts,
        "end_ts": record.end_ts,
        "segments": [segment_to_dict(s) for s in record.segments],
        "captures": [capture_to_dict(c) for c in record.captures],
        "anomalies": list(record.anomalies),
    }


def session_from_dict(obj: dict) -> SessionRecord:
    return SessionRecord(
        session_id=obj["session_id"],
        start_ts=obj["start_ts"],
        end_ts=obj["end_ts"],
        segments=tuple(segment_from_dict(s) for s in obj["segments"]),
        captures=tuple(capture_from_dict(c) for c in obj["captures"]),
        anomalies=tuple(obj["anomalies"]),
    )


def serialize_session(record: SessionRecord) -> bytes:
    """Canonical byte form of a session file."""
    return canonical_json(session_to_dict(record)).encode("utf-8")


def profile_to_dict(profile: EnrollmentProfile) -> dict:
    return {"owner_id": profile.owner_id, "created_ts": profile.created_ts,
            "portraits": [list(p) for p in profile.portraits]}


def profile_from_dict(obj: dict) -> EnrollmentProfile:
    return EnrollmentProfile(
        owner_id=obj["owner_id"], created_ts=obj["created_ts"],
        portraits=tuple(check_embedding(p, "portrait") for p in obj["portraits"]),
    )


# --- query result types -------------------------------------------------------

@dataclass(frozen=True)
class DaySummary:
    """One calendar day with logs, flagged with respect to the query filter."""

    date: dt.date
    session_count: int
    flagged: bool


@dataclass(frozen=True)
class SessionSummary:
    """One session row in a day listing."""

    session_id: str
    start_ts: int
    end_ts: int
    flagged: bool
    capture_count: int
    app_count: int


@dataclass(frozen=True)
class StorageUsage:
    total_bytes: int
    sessions_bytes: int
    captures_bytes: int
    index_bytes: int


@dataclass(frozen=True)
class _IndexEntry:
    """Per-session summary kept in the index; derivable from the session file."""

    session_id: str
    start_ts: int
    end_ts: int
    capture_count: int
    app_count: int
    verdicts: tuple[tuple[bool, float | None], ...]

    @classmethod
    def from_record(cls, record: SessionRecord) -> "_IndexEntry":
        return cls(
            session_id=record.session_id,
            start_ts=record.start_ts,
            end_ts=record.end_ts,
            capture_count=len(record.captures),
            app_count=len(record.segments),
            verdicts=tuple((c.face_detected, c.best_score) for c in record.captures),
        )

    def to_json(self) -> dict:
        return {"session_id": self.session_id, "start_ts": self.start_ts,
                "end_ts": self.end_ts, "capture_count": self.capture_count,
                "app_count": self.app_count,
                "verdicts": [[fd, score] for fd, score in self.verdicts]}

    @classmethod
    def from_json(cls, obj: dict) -> "_IndexEntry":
        return cls(session_id=obj["session_id"], start_ts=obj["start_ts"],
                   end_ts=obj["end_ts"], capture_count=obj["capture_count"],
                   app_count=obj["app_count"],
                   verdicts=tuple((fd, score) for fd, score in obj["verdicts"]))


def _parse_date(value: str) -> dt.date:
    return dt.date.fromisoformat(value)


class Store:
    """Filesystem-backed store; open() never writes, so an empty store is empty."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self._index: dict[str, list[_IndexEntry]] = self._load_index()

    # -- paths ---------------------------------------------------------------

    @property
    def _sessions_dir(self) -> Path:
        return self.root / "sessions"

    @property
    def _captures_dir(self) -> Path:
        return self.root / "captures"

    @property
    def _index_path(self) -> Path:
        return self.root / "index.json"

    @property
    def _profile_path(self) -> Path:
        return self.root / "profile.json"

    @property
    def _config_path(self) -> Path:
        return self.root / "config.json"

    @property
    def _config_events_path(self) -> Path:
        return self.root / "config_events.jsonl"

    def _session_path(self, session_id: str) -> Path:
        day = session_id[:10]
        return self._sessions_dir / day / f"{session_id}.json"

    # -- profile and config ----------------------------------------------------

    def get_profile(self) -> EnrollmentProfile | None:
        if not self._profile_path.exists():
            return None
        try:
            return profile_from_dict(json.loads(self._profile_path.read_text("utf-8")))
        except (OSError, ValueError, KeyError) as exc:
            raise IoFailure(f"cannot read profile: {exc}") from exc

    def set_profile(self, profile: EnrollmentProfile, event_ts: int | None = None) -> None:
        """Persist (or replace) the enrollment profile as a config event."""
        data = canonical_json(profile_to_dict(profile)).encode("utf-8")
        self._atomic_write(self._profile_path, data)
        self._append_config_event({
            "ts": profile.created_ts if event_ts is None else event_ts,
            "event": "enroll",
            "owner_id": profile.owner_id,
        })

    def get_config(self) -> FilterConfig:
        if not self._config_path.exists():
            return FilterConfig()
        try:
            return FilterConfig.from_dict(json.loads(self._config_path.read_text("utf-8")))
        except OSError as exc:
            raise IoFailure(f"cannot read config: {exc}") from exc

    def set_config(self, config: FilterConfig, event_ts: int | None = None) -> None:
        self._atomic_write(self._config_path, canonical_json(config.to_dict()).encode("utf-8"))
        event: dict = {"event": "config_set", "config": config.to_dict()}
        if event_ts is not None:
            event = {"ts": event_ts, **event}
        self._append_config_event(event)

    def _append_config_event(self, event: dict) -> None:
        try:
            self.root.mkdir(parents=True, exist_ok=True)
            with open(self._config_events_path, "a", encoding="utf-8") as handle:
                handle.write(canonical_json(event) + "\n")
        except OSError as exc:
            raise IoFailure(f"cannot append config event: {exc}") from exc

    # -- append ------------------------------------------------------------------

    def append_session(self, record: SessionRecord) -> str:
        """Atomically persist a finalized session and update the index.

        Capture blobs are written first (content-addressed, idempotent), the
        session file rename is the commit point, the index write follows.
        """
        session_id = record.session_id
        path = self._session_path(session_id)
        day = session_id[:10]
        if path.exists() or any(e.session_id == session_id
                                for e in self._index.get(day, [])):
            raise DuplicateSession(session_id)
        for capture in record.captures:
            self._write_capture_blob(capture)
        self._atomic_write(path, serialize_session(record))

        entries = list(self._index.get(day, []))
        entries.append(_IndexEntry.from_record(record))
        entries.sort(key=lambda e: (e.start_ts, e.session_id))
        index = dict(self._index)
        index[day] = entries
        self._write_index(index)
        self._index = index
        return session_id

    def _write_capture_blob(self, capture: CaptureRecord) -> None:
        if not capture.sample_ref or capture.sample is None:
            return
        blob = self._captures_dir / f"{capture.sample_ref}.bin"
        if not blob.exists():
            self._atomic_write(blob, sample_to_bytes(capture.sample))

    # -- queries -------------------------------------------------------------------

    def list_days(self, date_from: dt.date | None = None, date_to: dt.date | None = None,
                  threshold: float | None = None,
                  aggregation: str = facegate.ANY) -> list[DaySummary]:
        """Days with at least one session, ascending; read-only."""
        if date_from is not None and date_to is not None and date_from > date_to:
            raise ValueError("date range is inverted")
        summaries = []
        for day in sorted(self._index):
            date = _parse_date(day)
            if date_from is not None and date < date_from:
                continue
            if date_to is not None and date > date_to:
                continue
            entries = self._index[day]
            if not entries:
                continue
            flagged = False
            if threshold is not None:
                flagged = any(facegate.flag_scores(e.verdicts, threshold, aggregation)
                              for e in entries)
            summaries.append(DaySummary(date=date, session_count=len(entries), flagged=flagged))
        return summaries

    def list_sessions(self, date: dt.date, threshold: float | None = None,
                      aggregation: str = facegate.ANY) -> list[SessionSummary]:
        """Chronological sessions of one day; unknown dates yield an empty list."""
        entries = self._index.get(date.isoformat(), [])
        out = []
        for entry in entries:
            flagged = False
            if threshold is not None:
                flagged = facegate.flag_scores(entry.verdicts, threshold, aggregation)
            out.append(SessionSummary(
                session_id=entry.session_id, start_ts=entry.start_ts, end_ts=entry.end_ts,
                flagged=flagged, capture_count=entry.capture_count, app_count=entry.app_count,
            ))
        return out

    def get_session(self, session_id: str) -> SessionRecord:
        path = self._session_path(session_id)
        if not path.is_file():
            raise NotFound(f"session {session_id}")
        try:
            return session_from_dict(json.loads(path.read_text("utf-8")))
        except (OSError, ValueError, KeyError) as exc:
            raise IoFailure(f"cannot read session {session_id}: {exc}") from exc

    def get_capture(self, sample_ref: str) -> bytes:
        if not sample_ref:
            raise NotFound("capture has no stored sample")
        blob = self._captures_dir / f"{sample_ref}.bin"
        if not blob.is_file():
            raise NotFound(f"capture {sample_ref}")
        try:
            return blob.read_bytes()
        except OSError as exc:
            raise IoFailure(f"cannot read capture {sample_ref}: {exc}") from exc

    # -- accounting ---------------------------------------------------------------

    def storage_usage(self) -> StorageUsage:
        """Exact byte sums of the files under the store root."""
        total = 0
        sessions = 0
        captures = 0
        if self.root.is_dir():
            for path in self.root.rglob("*"):
                if not path.is_file():
                    continue
                size = path.stat().st_size
                total += size
                rel = path.relative_to(self.root)
                if rel.parts[0] == "sessions":
                    sessions += size
                elif rel.parts[0] == "captures":
                    captures += size
        index = self._index_path.stat().st_size if self._index_path.is_file() else 0
        return StorageUsage(total_bytes=total, sessions_bytes=sessions,
                            captures_bytes=captures, index_bytes=index)

    def estimate(self, n_future_sessions: int) -> int:
        """Projected bytes for n more sessions at the stored mean size."""
        count = sum(len(entries) for entries in self._index.values())
        if count == 0:
            return 0
        usage = self.storage_usage()
        return n_future_sessions * (usage.sessions_bytes + usage.captures_bytes) // count

    # -- index --------------------------------------------------------------------

    def rebuild_index(self) -> dict[str, list[SessionSummary]]:
        """Rescan session files, rewrite index.json, and return the mapping."""
        index = self._scan_index()
        self._write_index(index)
        self._index = index
        return {day: [SessionSummary(e.session_id, e.start_ts, e.end_ts, False,
                                     e.capture_count, e.app_count) for e in entries]
                for day, entries in sorted(index.items())}

    def _scan_index(self) -> dict[str, list[_IndexEntry]]:
        index: dict[str, list[_IndexEntry]] = {}
        if not self._sessions_dir.is_dir():
            return index
        for day_dir in sorted(p for p in self._sessions_dir.iterdir() if p.is_dir()):
            entries = []
            for session_file in sorted(day_dir.glob("*.json")):
                try:
                    record = session_from_dict(json.loads(session_file.read_text("utf-8")))
                except (OSError, ValueError, KeyError) as exc:
                    raise IoFailure(f"cannot scan {session_file}: {exc}") from exc
                entries.append(_IndexEntry.from_record(record))
            if entries:
                entries.sort(key=lambda e: (e.start_ts, e.session_id))
                index[day_dir.name] = entries
        return index

    def _load_index(self) -> dict[str, list[_IndexEntry]]:
        if not self._index_path.is_file():
            return self._scan_index()
        try:
            obj = json.loads(self._index_path.read_text("utf-8"))
            return {day: [_IndexEntry.from_json(e) for e in entries]
                    for day, entries in obj["days"].items()}
        except (OSError, ValueError, KeyError, TypeError):
            # Corrupt index: fall back to the files, which are the truth.
            return self._scan_index()

    def _write_index(self, index: dict[str, list[_IndexEntry]]) -> None:
        obj = {"days": {day: [e.to_json() for e in index[day]] for day in sorted(index)}}
        self._atomic_write(self._index_path, canonical_json(obj).encode("utf-8"))

    # -- low-level ------------------------------------------------------------------

    def _atomic_write(self, path: Path, data: bytes) -> None:
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = path.with_name(path.name + ".tmp")
            tmp.write_bytes(data)
            _replace(str(tmp), str(path))
        except OSError as exc:
            raise IoFailure(f"cannot write {path.name}: {exc}") from exc
