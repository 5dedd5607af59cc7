/** Month-grid arithmetic for the calendar view. Weeks start on Monday. */

import type { DaySummary } from "./types.js";

export interface CalendarCell {
  date: string; // ISO date
  inMonth: boolean;
  marked: boolean; // logs exist for this day
  flagged: boolean; // the applied filter colors this day
  sessionCount: number;
}

export function monthOf(date: string): string {
  return date.slice(0, 7);
}

export function shiftMonth(month: string, delta: number): string {
  const [year, mon] = month.split("-").map(Number);
  const index = year * 12 + (mon - 1) + delta;
  const newYear = Math.floor(index / 12);
  const newMon = (index % 12 + 12) % 12 + 1;
  return `${String(newYear).padStart(4, "0")}-${String(newMon).padStart(2, "0")}`;
}

export function monthRange(month: string): { from: string; to: string } {
  const [year, mon] = month.split("-").map(Number);
  const last = new Date(Date.UTC(year, mon, 0)).getUTCDate();
  return { from: `${month}-01`, to: `${month}-${String(last).padStart(2, "0")}` };
}

function isoOf(utcMs: number): string {
  return new Date(utcMs).toISOString().slice(0, 10);
}

/** A fixed 6x7 grid covering the month, decorated from the day summaries. */
export function buildMonthGrid(month: string, days: DaySummary[]): CalendarCell[] {
  const [year, mon] = month.split("-").map(Number);
  const firstMs = Date.UTC(year, mon - 1, 1);
  const firstWeekday = (new Date(firstMs).getUTCDay() + 6) % 7; // Monday = 0
  const startMs = firstMs - firstWeekday * 86_400_000;

  const byDate = new Map(days.map((d) => [d.date, d]));
  const cells: CalendarCell[] = [];
  for (let i = 0; i < 42; i++) {
    const date = isoOf(startMs + i * 86_400_000);
    const summary = byDate.get(date);
    cells.push({
      date,
      inMonth: monthOf(date) === month,
      marked: summary !== undefined,
      flagged: summary?.flagged ?? false,
      sessionCount: summary?.session_count ?? 0,
    });
  }
  return cells;
}
