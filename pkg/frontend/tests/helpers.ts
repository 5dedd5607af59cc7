import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { FetchLike } from "../src/api.js";

const here = dirname(fileURLToPath(import.meta.url));

export function serverBaseUrl(): string {
  const info = JSON.parse(readFileSync(join(here, ".server.json"), "utf-8"));
  return info.baseUrl as string;
}

export interface RecordedRequest {
  method: string;
  url: string;
}

/** Wraps fetch, logging every request so tests can prove read-only behavior. */
export function recordingFetch(log: RecordedRequest[]): FetchLike {
  return (url, init) => {
    log.push({ method: (init?.method ?? "GET").toUpperCase(), url: String(url) });
    return fetch(url, init);
  };
}
