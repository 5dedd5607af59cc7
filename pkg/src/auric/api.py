"""HTTP review API mirroring the audit navigation: days, sessions, captures.

All query endpoints are read-only; the only mutating endpoints are enroll
and config. Errors come back as ``{"status", "code", "message"}`` with a
machine-stable code and status in {400, 404, 409, 500}.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from pathlib import Path

from fastapi import Body, FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response

from . import facegate
from .engine import FilterConfig
from .errors import (
    AuricError,
    BadEmbedding,
    DimensionMismatch,
    DuplicateSession,
    IoFailure,
    MalformedLine,
    NotFound,
    WrongPortraitCount,
)
from .facegate import enroll, now_ms
from .store import Store, session_to_dict


@dataclass(frozen=True)
class ApiError(Exception):
    status: int
    code: str
    message: str

    def response(self) -> JSONResponse:
        return JSONResponse(status_code=self.status, content={
            "status": self.status, "code": self.code, "message": self.message,
        })


def _to_api_error(exc: Exception) -> ApiError:
    if isinstance(exc, ApiError):
        return exc
    if isinstance(exc, NotFound):
        return ApiError(404, "not_found", str(exc))
    if isinstance(exc, DuplicateSession):
        return ApiError(409, "duplicate_session", str(exc))
    if isinstance(exc, IoFailure):
        return ApiError(500, "io_failure", str(exc))
    if isinstance(exc, (ValueError, BadEmbedding, WrongPortraitCount,
                        DimensionMismatch, MalformedLine, AuricError)):
        return ApiError(400, "validation", str(exc))
    return ApiError(500, "internal", str(exc))


def _parse_date(value: str, name: str) -> dt.date:
    try:
        return dt.date.fromisoformat(value)
    except ValueError:
        raise ApiError(400, "validation", f"{name} must be a YYYY-MM-DD date") from None


def _parse_filter(threshold: float | None, agg: str | None) -> tuple[float | None, str]:
    aggregation = facegate.ANY
    if agg is not None:
        try:
            aggregation = facegate.check_aggregation(agg.upper())
        except ValueError as exc:
            raise ApiError(400, "validation", str(exc)) from None
    if threshold is not None:
        try:
            facegate.check_threshold(threshold)
        except ValueError as exc:
            raise ApiError(400, "validation", str(exc)) from None
    return threshold, aggregation


def create_app(store: Store, ui_dir: Path | None = None) -> FastAPI:
    app = FastAPI(title="auric", docs_url=None, redoc_url=None)

    @app.exception_handler(ApiError)
    async def handle_api_error(request: Request, exc: ApiError) -> JSONResponse:
        return exc.response()

    @app.exception_handler(AuricError)
    async def handle_domain_error(request: Request, exc: AuricError) -> JSONResponse:
        return _to_api_error(exc).response()

    @app.exception_handler(ValueError)
    async def handle_value_error(request: Request, exc: ValueError) -> JSONResponse:
        return _to_api_error(exc).response()

    @app.exception_handler(RequestValidationError)
    async def handle_request_error(request: Request, exc: RequestValidationError) -> JSONResponse:
        return ApiError(400, "validation", str(exc)).response()

    @app.get("/api/days")
    def list_days(
        from_date: str | None = Query(default=None, alias="from"),
        to_date: str | None = Query(default=None, alias="to"),
        threshold: float | None = None,
        agg: str | None = None,
    ) -> list[dict]:
        threshold, aggregation = _parse_filter(threshold, agg)
        date_from = _parse_date(from_date, "from") if from_date else None
        date_to = _parse_date(to_date, "to") if to_date else None
        days = store.list_days(date_from, date_to, threshold, aggregation)
        return [{"date": d.date.isoformat(), "session_count": d.session_count,
                 "flagged": d.flagged} for d in days]

    @app.get("/api/days/{date}/sessions")
    def list_sessions(date: str, threshold: float | None = None,
                      agg: str | None = None) -> list[dict]:
        threshold, aggregation = _parse_filter(threshold, agg)
        rows = store.list_sessions(_parse_date(date, "date"), threshold, aggregation)
        return [{"session_id": r.session_id, "start_ts": r.start_ts, "end_ts": r.end_ts,
                 "flagged": r.flagged, "capture_count": r.capture_count,
                 "app_count": r.app_count} for r in rows]

    @app.get("/api/sessions/{session_id}")
    def get_session(session_id: str) -> dict:
        return session_to_dict(store.get_session(session_id))

    @app.get("/api/sessions/{session_id}/captures/{n}")
    def get_capture(session_id: str, n: int) -> Response:
        record = store.get_session(session_id)
        if n < 0 or n >= len(record.captures):
            raise ApiError(404, "not_found", f"capture {n} of session {session_id}")
        data = store.get_capture(record.captures[n].sample_ref)
        return Response(content=data, media_type="application/octet-stream")

    @app.get("/api/config")
    def get_config() -> dict:
        return store.get_config().to_dict()

    @app.put("/api/config")
    def put_config(payload: dict = Body(...)) -> dict:
        merged = store.get_config().to_dict()
        if not isinstance(payload, dict):
            raise ApiError(400, "validation", "config body must be an object")
        merged.update(payload)
        config = FilterConfig.from_dict(merged)
        store.set_config(config, event_ts=now_ms())
        return config.to_dict()

    @app.post("/api/enroll")
    def post_enroll(payload: dict = Body(...)) -> dict:
        if not isinstance(payload, dict) or "owner_id" not in payload or "portraits" not in payload:
            raise ApiError(400, "validation",
                           "enroll body must contain owner_id and portraits")
        profile = enroll(payload["owner_id"], payload["portraits"],
                         created_ts=payload.get("created_ts"))
        store.set_profile(profile, event_ts=now_ms())
        return {"owner_id": profile.owner_id, "dimension": profile.dimension,
                "created_ts": profile.created_ts}

    @app.get("/api/banner")
    def get_banner() -> dict:
        return {"visible": store.get_config().notifications_visible}

    if ui_dir is not None and ui_dir.is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
