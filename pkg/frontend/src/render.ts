/**
 * Pure HTML builders for every view. Rendering never invents audit facts:
 * day and session flags come straight from the API's `flagged` fields, and
 * action text is shown verbatim from the store. The only client-side visual
 * judgment is the capture strip's non-owner tint (score below the current
 * threshold), which the capture metadata itself supports.
 */

import type { CalendarCell } from "./calendar.js";
import type { ViewState } from "./state.js";
import type {
  AppSegment,
  CaptureRecord,
  DaySummary,
  SessionDetail,
  SessionSummary,
} from "./types.js";
import { glyphSvg } from "./identicon.js";

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;")
    .replaceAll("'", "&#39;");
}

export function formatTime(tsMs: number): string {
  return new Date(tsMs).toISOString().slice(11, 19);
}

export function renderCalendar(month: string, cells: CalendarCell[], state: ViewState): string {
  const weekdays = ["Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"]
    .map((d) => `<div class="weekday">${d}</div>`)
    .join("");
  const body = cells
    .map((cell) => {
      const classes = ["day"];
      if (!cell.inMonth) classes.push("outside");
      if (cell.marked) classes.push("marked");
      if (cell.flagged) classes.push("flagged");
      if (state.selectedDate === cell.date) classes.push("selected");
      const label = cell.marked
        ? `<span class="count">${cell.sessionCount}</span>`
        : "";
      return `<button class="${classes.join(" ")}" data-date="${cell.date}" ` +
        `${cell.marked ? "" : "disabled"}>` +
        `<span class="num">${Number(cell.date.slice(8, 10))}</span>${label}</button>`;
    })
    .join("");
  return `
    <div class="calendar-head">
      <button id="prev-month" aria-label="previous month">&lsaquo;</button>
      <h2>${month}</h2>
      <button id="next-month" aria-label="next month">&rsaquo;</button>
    </div>
    <div class="calendar-grid">${weekdays}${body}</div>`;
}

export function renderSessionList(date: string | null, rows: SessionSummary[],
                                  state: ViewState): string {
  if (date === null) {
    return `<p class="hint">Select a marked day to list its sessions.</p>`;
  }
  if (rows.length === 0) {
    return `<p class="hint">No sessions recorded on ${date}.</p>`;
  }
  const items = rows
    .map((row) => {
      const classes = ["session"];
      if (row.flagged) classes.push("flagged");
      if (state.selectedSession === row.session_id) classes.push("selected");
      return `<li><button class="${classes.join(" ")}" data-session="${row.session_id}">
        <span class="time">${formatTime(row.start_ts)}</span>
        <span class="meta">${row.app_count} apps &middot; ${row.capture_count} captures</span>
        ${row.flagged ? '<span class="flag-mark">non-owner face</span>' : ""}
      </button></li>`;
    })
    .join("");
  return `<h3>Sessions on ${date}</h3><ul class="session-list">${items}</ul>`;
}

function renderFilmRoll(detail: SessionDetail, threshold: number): string {
  if (detail.captures.length === 0) {
    return `<p class="hint">No captures in this session.</p>`;
  }
  const frames = detail.captures
    .map((capture: CaptureRecord, i: number) => {
      const nonOwner = capture.face_detected &&
        capture.best_score !== undefined && capture.best_score < threshold;
      const classes = ["frame"];
      if (nonOwner) classes.push("non-owner");
      if (!capture.face_detected) classes.push("no-face");
      const score = capture.face_detected && capture.best_score !== undefined
        ? capture.best_score.toFixed(2)
        : "no face";
      return `<figure class="${classes.join(" ")}" data-capture="${i}">
        ${glyphSvg(capture.sample_ref, 36, nonOwner)}
        <figcaption>${formatTime(capture.ts)}<br>${score}</figcaption>
      </figure>`;
    })
    .join("");
  return `<div class="film-roll">${frames}</div>`;
}

export function renderSessionView(detail: SessionDetail | null, state: ViewState): string {
  if (state.selectedSession === null) {
    return `<p class="hint">Select a session to see its app timeline.</p>`;
  }
  if (detail === null) {
    return `<p class="error-view">session not found</p>`;
  }
  const header = `<h3>Session ${detail.session_id}</h3>
    <p class="meta">${formatTime(detail.start_ts)} &rarr; ${formatTime(detail.end_ts)}
    ${detail.anomalies.length ? `&middot; anomalies: ${detail.anomalies.map(escapeHtml).join(", ")}` : ""}</p>`;
  if (detail.segments.length === 0) {
    return `${header}<p class="hint">no activity recorded</p>${renderFilmRoll(detail, state.threshold)}`;
  }
  const apps = detail.segments
    .map((segment: AppSegment, i: number) => {
      const classes = ["app"];
      if (state.selectedApp === i) classes.push("selected");
      return `<li><button class="${classes.join(" ")}" data-segment="${i}">
        <span class="app-name">${escapeHtml(segment.app)}</span>
        <span class="meta">${formatTime(segment.ts_start)} &middot; ${segment.actions.length} actions</span>
      </button></li>`;
    })
    .join("");
  return `${header}
    <ol class="app-timeline">${apps}</ol>
    ${renderFilmRoll(detail, state.threshold)}`;
}

export function renderActionList(detail: SessionDetail | null, state: ViewState): string {
  if (detail === null || state.selectedApp === null) {
    return `<p class="hint">Select an app to see what was done in it.</p>`;
  }
  const segment = detail.segments[state.selectedApp];
  if (segment === undefined) {
    return `<p class="error-view">app segment not found</p>`;
  }
  const rows = segment.actions
    .map((action) => `<li>
      <span class="time">${formatTime(action.ts_start)}</span>
      <span class="desc">${escapeHtml(action.description)}</span>
    </li>`)
    .join("");
  return `<h3>${escapeHtml(segment.app)}</h3><ul class="action-list">${rows}</ul>`;
}

export function renderControls(state: ViewState): string {
  return `
    <label class="control">similarity threshold
      <input id="threshold" type="range" min="0" max="1" step="0.05" value="${state.threshold}">
      <span id="threshold-value">${state.threshold.toFixed(2)}</span>
    </label>
    <label class="control">aggregation
      <select id="aggregation">
        <option value="ANY" ${state.aggregation === "ANY" ? "selected" : ""}>any</option>
        <option value="MAJORITY" ${state.aggregation === "MAJORITY" ? "selected" : ""}>majority</option>
      </select>
    </label>`;
}

export function renderBanner(visible: boolean | null): string {
  if (visible === null) return "";
  return visible
    ? `<div class="banner">Activity recording notice is shown on this device.</div>`
    : `<div class="banner hidden-banner">Recording notice is hidden.</div>`;
}

export function renderError(message: string | null, stale: boolean): string {
  if (message === null) return "";
  const staleNote = stale ? ` <em>(showing stale data)</em>` : "";
  return `<div class="error-bar" role="alert">${escapeHtml(message)}${staleNote}</div>`;
}

export function summarizeDays(days: DaySummary[]): string {
  const flagged = days.filter((d) => d.flagged).length;
  return `${days.length} day(s) with logs, ${flagged} flagged`;
}
