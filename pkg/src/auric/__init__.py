"""Session-level device activity logging with face-similarity review filters."""

from .engine import FilterConfig, SessionRecord, ingest
from .events import RawEvent, parse_event_line, serialize_event_line, validate_stream
from .facegate import EnrollmentProfile, classify_sample, enroll, flag_day, flag_session
from .semantic import ActionRecord, AppSegment, Coalescer, coalesce, describe
from .store import Store

__version__ = "0.1.0"

__all__ = [
    "ActionRecord",
    "AppSegment",
    "Coalescer",
    "EnrollmentProfile",
    "FilterConfig",
    "RawEvent",
    "SessionRecord",
    "Store",
    "classify_sample",
    "coalesce",
    "describe",
    "enroll",
    "flag_day",
    "flag_session",
    "ingest",
    "parse_event_line",
    "serialize_event_line",
    "validate_stream",
]
