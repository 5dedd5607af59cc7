"""Operator command line: ingest/replay, queries, config, banner, serve.

Output is line-oriented and stable for scripting. Exit codes: 0 success,
1 domain error, 2 usage error. The store directory comes from --store,
then the AURIC_STORE environment variable, then ./auric-store.
"""

from __future__ import annotations

import argparse
import datetime as dt
import json
import os
import sys
from pathlib import Path

from . import facegate
from .engine import FilterConfig, ingest
from .errors import AuricError
from .events import validate_lines
from .facegate import enroll, now_ms
from .scenarios import generate, replay, scenario_from_text
from .store import Store

DEFAULT_STORE = "./auric-store"
STORE_ENV_VAR = "AURIC_STORE"

CONFIG_KEYS = ("threshold", "aggregation", "capture_interval_ms",
               "coalesce_gap_ms", "notifications_visible")


def _iso(ts_ms: int) -> str:
    moment = dt.datetime.fromtimestamp(ts_ms / 1000, tz=dt.timezone.utc)
    return moment.isoformat(timespec="milliseconds").replace("+00:00", "Z")


def _bool_text(value: bool) -> str:
    return "true" if value else "false"


def _aggregation(value: str) -> str:
    return facegate.check_aggregation(value.upper())


def _open_store(args: argparse.Namespace) -> Store:
    root = args.store or os.environ.get(STORE_ENV_VAR) or DEFAULT_STORE
    return Store(root)


def _parse_day(value: str) -> dt.date:
    try:
        return dt.date.fromisoformat(value)
    except ValueError:
        raise ValueError(f"invalid date {value!r}, expected YYYY-MM-DD") from None


# --- commands -----------------------------------------------------------------

def _cmd_enroll(args: argparse.Namespace) -> int:
    store = _open_store(args)
    try:
        payload = json.loads(Path(args.portraits_file).read_text("utf-8"))
    except OSError as exc:
        raise AuricError(f"cannot read {args.portraits_file}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise AuricError(f"invalid portraits file: {exc.msg}") from None
    if not isinstance(payload, dict) or "owner_id" not in payload or "portraits" not in payload:
        raise AuricError("portraits file must be an object with owner_id and portraits")
    profile = enroll(payload["owner_id"], payload["portraits"],
                     created_ts=payload.get("created_ts"))
    store.set_profile(profile, event_ts=now_ms())
    print(f"enrolled {profile.owner_id} dimension={profile.dimension}")
    return 0


def _cmd_ingest(args: argparse.Namespace) -> int:
    store = _open_store(args)
    try:
        text = Path(args.events_file).read_text("utf-8")
    except OSError as exc:
        raise AuricError(f"cannot read {args.events_file}: {exc}") from exc
    events, report = validate_lines(text.splitlines())
    if not report.ok:
        for lineno, reason in report.line_errors:
            print(f"line {lineno}: {reason}", file=sys.stderr)
        return 1
    profile = store.get_profile()
    if profile is None:
        raise AuricError("no enrollment profile in store; run enroll first")
    sessions, global_anomalies = ingest(events, store.get_config(), profile)
    for record in sessions:
        store.append_session(record)
        print(f"{record.session_id} segments={len(record.segments)} "
              f"captures={len(record.captures)} anomalies={len(record.anomalies)}")
    if global_anomalies:
        print(f"stream anomalies: {','.join(global_anomalies)}")
    print(f"ingested {len(sessions)} session(s)")
    return 0


def _cmd_replay(args: argparse.Namespace) -> int:
    store = _open_store(args)
    config = store.get_config()
    if args.file:
        try:
            scenario = scenario_from_text(Path(args.file).read_text("utf-8"))
        except OSError as exc:
            raise AuricError(f"cannot read {args.file}: {exc}") from exc
    else:
        scenario = generate(args.scenario, args.seed, config)
    report = replay(scenario, config, store)
    for session_id in report.session_ids:
        print(f"appended {session_id}")
    for diff in report.diffs:
        print(f"diff: {diff}")
    verdict = "PASS" if report.passed else "FAIL"
    print(f"replay {scenario.name} seed={scenario.seed}: {verdict}")
    return 0 if report.passed else 1


def _cmd_days(args: argparse.Namespace) -> int:
    store = _open_store(args)
    date_from = _parse_day(args.from_date) if args.from_date else None
    date_to = _parse_day(args.to_date) if args.to_date else None
    threshold = None
    if args.threshold is not None:
        threshold = facegate.check_threshold(args.threshold)
    for day in store.list_days(date_from, date_to, threshold, _aggregation(args.agg)):
        print(f"{day.date.isoformat()} sessions={day.session_count} "
              f"flagged={_bool_text(day.flagged)}")
    return 0


def _cmd_sessions(args: argparse.Namespace) -> int:
    store = _open_store(args)
    threshold = None
    if args.threshold is not None:
        threshold = facegate.check_threshold(args.threshold)
    for row in store.list_sessions(_parse_day(args.date), threshold, _aggregation(args.agg)):
        print(f"{row.session_id} start={_iso(row.start_ts)} end={_iso(row.end_ts)} "
              f"captures={row.capture_count} apps={row.app_count} "
              f"flagged={_bool_text(row.flagged)}")
    return 0


def _cmd_show(args: argparse.Namespace) -> int:
    store = _open_store(args)
    record = store.get_session(args.session_id)
    anomalies = ",".join(record.anomalies) if record.anomalies else "none"
    print(f"session {record.session_id}")
    print(f"start={_iso(record.start_ts)} end={_iso(record.end_ts)} anomalies={anomalies}")
    print(f"apps: {','.join(seg.app for seg in record.segments) or 'none'}")
    for segment in record.segments:
        print(f"[{segment.app}] {_iso(segment.ts_start)} .. {_iso(segment.ts_end)}")
        for action in segment.actions:
            print(f"  {_iso(action.ts_start)} {action.description}")
    print(f"captures: {len(record.captures)}")
    for capture in record.captures:
        if capture.face_detected:
            detail = f"face=yes score={capture.best_score:.4f}"
        else:
            detail = "face=no"
        ref = capture.sample_ref[:12] if capture.sample_ref else "-"
        print(f"  {_iso(capture.ts)} {detail} ref={ref}")
    return 0


def _cmd_du(args: argparse.Namespace) -> int:
    store = _open_store(args)
    usage = store.storage_usage()
    print(f"total={usage.total_bytes} sessions={usage.sessions_bytes} "
          f"captures={usage.captures_bytes} index={usage.index_bytes}")
    if args.estimate is not None:
        print(f"estimate({args.estimate})={store.estimate(args.estimate)}")
    return 0


def _coerce_config_value(key: str, value: str):
    if key == "threshold":
        try:
            return float(value)
        except ValueError:
            raise ValueError("threshold must be in [0,1]") from None
    if key == "aggregation":
        return value.upper()
    if key in ("capture_interval_ms", "coalesce_gap_ms"):
        try:
            return int(value)
        except ValueError:
            raise ValueError(f"{key} must be a positive integer") from None
    if key == "notifications_visible":
        if value.lower() in ("true", "1", "yes"):
            return True
        if value.lower() in ("false", "0", "no"):
            return False
        raise ValueError("notifications_visible must be true or false")
    raise ValueError(f"unknown config key {key!r}; known: {', '.join(CONFIG_KEYS)}")


def _cmd_config(args: argparse.Namespace) -> int:
    store = _open_store(args)
    config = store.get_config()
    if args.action == "get":
        if args.key not in CONFIG_KEYS:
            raise ValueError(f"unknown config key {args.key!r}; known: {', '.join(CONFIG_KEYS)}")
        value = getattr(config, args.key)
        print(_bool_text(value) if isinstance(value, bool) else value)
        return 0
    merged = config.to_dict()
    merged[args.key] = _coerce_config_value(args.key, args.value)
    new_config = FilterConfig.from_dict(merged)
    store.set_config(new_config, event_ts=now_ms())
    value = getattr(new_config, args.key)
    print(f"{args.key}={_bool_text(value) if isinstance(value, bool) else value}")
    return 0


def _cmd_banner(args: argparse.Namespace) -> int:
    store = _open_store(args)
    print("visible" if store.get_config().notifications_visible else "hidden")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .api import create_app

    store = Store(args.serve_store or args.store
                  or os.environ.get(STORE_ENV_VAR) or DEFAULT_STORE)
    ui_dir = Path(args.ui) if args.ui else None
    app = create_app(store, ui_dir=ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


# --- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="auric",
        description="Session activity log: ingest event streams, review by day/session/app.",
    )
    parser.add_argument("--store", help=f"store directory (default ${STORE_ENV_VAR} or {DEFAULT_STORE})")
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("enroll", help="enroll the owner from a portraits file")
    sub.add_argument("portraits_file")
    sub.set_defaults(func=_cmd_enroll)

    sub = commands.add_parser("ingest", help="ingest an event-stream file into the store")
    sub.add_argument("events_file")
    sub.set_defaults(func=_cmd_ingest)

    sub = commands.add_parser("replay", help="generate and replay a scenario")
    sub.add_argument("--scenario", default="unattended")
    sub.add_argument("--seed", type=int, default=1)
    sub.add_argument("--file", help="replay a scenario file instead of a builtin")
    sub.set_defaults(func=_cmd_replay)

    sub = commands.add_parser("days", help="list days with logs")
    sub.add_argument("--from", dest="from_date")
    sub.add_argument("--to", dest="to_date")
    sub.add_argument("--threshold", type=float)
    sub.add_argument("--agg", choices=("any", "majority"), default="any")
    sub.set_defaults(func=_cmd_days)

    sub = commands.add_parser("sessions", help="list the sessions of a day")
    sub.add_argument("date")
    sub.add_argument("--threshold", type=float)
    sub.add_argument("--agg", choices=("any", "majority"), default="any")
    sub.set_defaults(func=_cmd_sessions)

    sub = commands.add_parser("show", help="print one session's apps, actions, captures")
    sub.add_argument("session_id")
    sub.set_defaults(func=_cmd_show)

    sub = commands.add_parser("du", help="storage accounting")
    sub.add_argument("--estimate", type=int)
    sub.set_defaults(func=_cmd_du)

    sub = commands.add_parser("config", help="get or set filter configuration")
    config_actions = sub.add_subparsers(dest="action", required=True)
    getter = config_actions.add_parser("get")
    getter.add_argument("key")
    getter.set_defaults(func=_cmd_config)
    setter = config_actions.add_parser("set")
    setter.add_argument("key")
    setter.add_argument("value")
    setter.set_defaults(func=_cmd_config)

    sub = commands.add_parser("banner", help="deterrence banner state")
    banner_actions = sub.add_subparsers(dest="action", required=True)
    status = banner_actions.add_parser("status")
    status.set_defaults(func=_cmd_banner)

    sub = commands.add_parser("serve", help="serve the HTTP review API")
    sub.add_argument("--port", type=int, default=8600)
    sub.add_argument("--host", default="127.0.0.1")
    sub.add_argument("--store", dest="serve_store")
    sub.add_argument("--ui", help="directory of static review-UI files to serve at /")
    sub.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (AuricError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
