/**
 * View state and its transitions. Selections always form a path:
 * an app selection implies a session, a session implies a date.
 * Every transition returns a new state and preserves that invariant;
 * filter changes never drop the navigation path.
 */

import type { Aggregation } from "./types.js";

export interface ViewState {
  month: string; // "YYYY-MM"
  selectedDate: string | null;
  selectedSession: string | null;
  selectedApp: number | null; // segment index within the selected session
  threshold: number;
  aggregation: Aggregation;
  bannerVisible: boolean | null;
}

export function initialState(month: string, threshold = 0.6): ViewState {
  return {
    month,
    selectedDate: null,
    selectedSession: null,
    selectedApp: null,
    threshold: clampThreshold(threshold),
    aggregation: "ANY",
    bannerVisible: null,
  };
}

export function clampThreshold(value: number): number {
  if (Number.isNaN(value)) return 0;
  return Math.min(1, Math.max(0, value));
}

export function selectionsFormPath(state: ViewState): boolean {
  if (state.selectedApp !== null && state.selectedSession === null) return false;
  if (state.selectedSession !== null && state.selectedDate === null) return false;
  return true;
}

export function gotoMonth(state: ViewState, month: string): ViewState {
  return { ...state, month };
}

export function selectDate(state: ViewState, date: string | null): ViewState {
  if (date === null) {
    return { ...state, selectedDate: null, selectedSession: null, selectedApp: null };
  }
  return { ...state, selectedDate: date, selectedSession: null, selectedApp: null };
}

export function selectSession(state: ViewState, sessionId: string | null): ViewState {
  if (sessionId === null) {
    return { ...state, selectedSession: null, selectedApp: null };
  }
  // A session id starts with its date, so selecting one fixes the date too.
  return {
    ...state,
    selectedDate: sessionId.slice(0, 10),
    selectedSession: sessionId,
    selectedApp: null,
  };
}

export function selectApp(state: ViewState, segmentIndex: number | null): ViewState {
  if (segmentIndex === null) return { ...state, selectedApp: null };
  if (state.selectedSession === null) return state; // no path to hang the app on
  return { ...state, selectedApp: segmentIndex };
}

export function setThreshold(state: ViewState, threshold: number): ViewState {
  return { ...state, threshold: clampThreshold(threshold) };
}

export function setAggregation(state: ViewState, aggregation: Aggregation): ViewState {
  return { ...state, aggregation };
}

export function setBanner(state: ViewState, visible: boolean): ViewState {
  return { ...state, bannerVisible: visible };
}
