/**
 * Bootstrap: owns the view state, queries the API, re-renders panels.
 * In-flight queries resolve last-write-wins per panel via query epochs.
 */

import { ApiClient } from "./api.js";
import { buildMonthGrid, monthOf, monthRange, shiftMonth } from "./calendar.js";
import {
  ViewState,
  initialState,
  selectApp,
  selectDate,
  selectSession,
  setAggregation,
  setBanner,
  setThreshold,
} from "./state.js";
import {
  renderActionList,
  renderBanner,
  renderCalendar,
  renderControls,
  renderError,
  renderSessionList,
  renderSessionView,
  summarizeDays,
} from "./render.js";
import type { DaySummary, SessionDetail, SessionSummary } from "./types.js";

const api = new ApiClient("");

let state: ViewState = initialState(new Date().toISOString().slice(0, 7));
let days: DaySummary[] = [];
let sessions: SessionSummary[] = [];
let detail: SessionDetail | null = null;
let errorMessage: string | null = null;
let haveData = false;
const epochs = { days: 0, sessions: 0, detail: 0 };

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing element #${id}`);
  return node;
}

function render(): void {
  el("error-slot").innerHTML = renderError(errorMessage, haveData);
  el("banner-slot").innerHTML = renderBanner(state.bannerVisible);
  el("controls").innerHTML = renderControls(state);
  el("calendar").innerHTML = renderCalendar(
    state.month, buildMonthGrid(state.month, days), state);
  el("day-summary").textContent = summarizeDays(days);
  el("sessions").innerHTML = renderSessionList(state.selectedDate, sessions, state);
  el("session-view").innerHTML = renderSessionView(detail, state);
  el("actions").innerHTML = renderActionList(detail, state);
  wire();
}

function wire(): void {
  el("prev-month").onclick = () => {
    state = { ...state, month: shiftMonth(state.month, -1) };
    void refreshDays();
  };
  el("next-month").onclick = () => {
    state = { ...state, month: shiftMonth(state.month, 1) };
    void refreshDays();
  };
  document.querySelectorAll<HTMLButtonElement>(".day.marked").forEach((button) => {
    button.onclick = () => {
      state = selectDate(state, button.dataset.date ?? null);
      void refreshSessions();
    };
  });
  document.querySelectorAll<HTMLButtonElement>(".session").forEach((button) => {
    button.onclick = () => {
      state = selectSession(state, button.dataset.session ?? null);
      void refreshDetail();
    };
  });
  document.querySelectorAll<HTMLButtonElement>(".app").forEach((button) => {
    button.onclick = () => {
      state = selectApp(state, Number(button.dataset.segment));
      render();
    };
  });
  const slider = el("threshold") as HTMLInputElement;
  slider.oninput = () => {
    state = setThreshold(state, Number(slider.value));
    void refreshFilterDependent();
  };
  const agg = el("aggregation") as HTMLSelectElement;
  agg.onchange = () => {
    state = setAggregation(state, agg.value === "MAJORITY" ? "MAJORITY" : "ANY");
    void refreshFilterDependent();
  };
}

async function guarded<T>(run: () => Promise<T>, apply: (value: T) => void): Promise<void> {
  try {
    apply(await run());
    errorMessage = null;
    haveData = true;
  } catch (error) {
    errorMessage = error instanceof Error ? error.message : String(error);
  }
  render();
}

async function refreshDays(): Promise<void> {
  const epoch = ++epochs.days;
  const range = monthRange(state.month);
  await guarded(
    () => api.getDays({ ...range, threshold: state.threshold, agg: state.aggregation }),
    (value) => {
      if (epoch === epochs.days) days = value;
    },
  );
}

async function refreshSessions(): Promise<void> {
  if (state.selectedDate === null) {
    sessions = [];
    render();
    return;
  }
  const epoch = ++epochs.sessions;
  const date = state.selectedDate;
  await guarded(
    () => api.getSessions(date, state.threshold, state.aggregation),
    (value) => {
      if (epoch === epochs.sessions) sessions = value;
    },
  );
}

async function refreshDetail(): Promise<void> {
  if (state.selectedSession === null) {
    detail = null;
    render();
    return;
  }
  const epoch = ++epochs.detail;
  const sessionId = state.selectedSession;
  await guarded(
    () => api.getSession(sessionId),
    (value) => {
      if (epoch === epochs.detail) detail = value;
    },
  );
}

/** Threshold/aggregation re-query everything visible; selections survive. */
async function refreshFilterDependent(): Promise<void> {
  await refreshDays();
  if (state.selectedDate !== null) await refreshSessions();
  if (state.selectedSession !== null) await refreshDetail();
}

async function boot(): Promise<void> {
  try {
    const [banner, config] = await Promise.all([api.getBanner(), api.getConfig()]);
    state = setBanner(state, banner.visible);
    state = setThreshold(state, config.threshold);
    state = setAggregation(state, config.aggregation);
  } catch (error) {
    errorMessage = error instanceof Error ? error.message : String(error);
  }
  // Jump the calendar to the latest logged month so fixtures show up.
  try {
    const all = await api.getDays({});
    if (all.length > 0) {
      state = { ...state, month: monthOf(all[all.length - 1].date) };
    }
  } catch {
    // keep the current month; the error bar already reports API trouble
  }
  await refreshDays();
}

document.addEventListener("DOMContentLoaded", () => {
  void boot();
});
