/** Wire types of the activity-log review API (field names are the contract). */

export type Aggregation = "ANY" | "MAJORITY";

export interface DaySummary {
  date: string;
  session_count: number;
  flagged: boolean;
}

export interface SessionSummary {
  session_id: string;
  start_ts: number;
  end_ts: number;
  flagged: boolean;
  capture_count: number;
  app_count: number;
}

export interface ActionRecord {
  app: string;
  ts_start: number;
  ts_end: number;
  kind: "OPENED" | "TAPPED" | "TYPED" | "SCROLLED";
  widget?: string;
  field?: string;
  text?: string;
  direction?: string;
  count?: number;
  description: string;
  source_events: number;
}

export interface AppSegment {
  app: string;
  ts_start: number;
  ts_end: number;
  actions: ActionRecord[];
}

export interface CaptureRecord {
  ts: number;
  face_detected: boolean;
  best_score?: number;
  sample_ref: string;
}

export interface SessionDetail {
  session_id: string;
  start_ts: number;
  end_ts: number;
  segments: AppSegment[];
  captures: CaptureRecord[];
  anomalies: string[];
}

export interface FilterConfig {
  threshold: number;
  aggregation: Aggregation;
  capture_interval_ms: number;
  coalesce_gap_ms: number;
  notifications_visible: boolean;
}

export interface BannerState {
  visible: boolean;
}

export interface ApiErrorBody {
  status: number;
  code: string;
  message: string;
}
