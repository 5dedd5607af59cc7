/**
 * Boots the real review API for the test run: seeds a temp store with the
 * unattended fixture via the CLI, starts `auric serve`, and hands the base
 * URL to tests through tests/.server.json.
 */

import { ChildProcess, spawn, spawnSync } from "node:child_process";
import { mkdtempSync, rmSync, writeFileSync, unlinkSync } from "node:fs";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join, dirname } from "node:path";
import { fileURLToPath } from "node:url";

const here = dirname(fileURLToPath(import.meta.url));
export const serverInfoPath = join(here, ".server.json");

const PYTHON = process.env.AURIC_PYTHON ?? "python3";

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const probe = createServer();
    probe.once("error", reject);
    probe.listen(0, "127.0.0.1", () => {
      const address = probe.address();
      if (address === null || typeof address === "string") {
        reject(new Error("could not allocate a port"));
        return;
      }
      probe.close(() => resolve(address.port));
    });
  });
}

async function waitForReady(baseUrl: string, child: ChildProcess): Promise<void> {
  const deadline = Date.now() + 30000;
  while (Date.now() < deadline) {
    if (child.exitCode !== null) {
      throw new Error(`API server exited early with code ${child.exitCode}`);
    }
    try {
      const response = await fetch(`${baseUrl}/api/banner`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 150));
  }
  throw new Error(`API server did not become ready at ${baseUrl}`);
}

export default async function setup(): Promise<() => void> {
  const storeDir = mkdtempSync(join(tmpdir(), "auric-ui-store-"));

  const seed = spawnSync(
    PYTHON,
    ["-m", "auric.cli", "--store", storeDir, "replay", "--scenario", "unattended", "--seed", "1"],
    { encoding: "utf-8" },
  );
  if (seed.status !== 0) {
    throw new Error(`fixture replay failed: ${seed.stderr || seed.stdout}`);
  }

  const port = await freePort();
  const baseUrl = `http://127.0.0.1:${port}`;
  const server = spawn(
    PYTHON,
    ["-m", "auric.cli", "serve", "--port", String(port), "--store", storeDir],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  let serverLog = "";
  server.stdout?.on("data", (chunk) => { serverLog += chunk; });
  server.stderr?.on("data", (chunk) => { serverLog += chunk; });

  try {
    await waitForReady(baseUrl, server);
  } catch (error) {
    server.kill();
    throw new Error(`${error}\nserver output:\n${serverLog}`);
  }

  writeFileSync(serverInfoPath, JSON.stringify({ baseUrl, storeDir }), "utf-8");

  return () => {
    server.kill();
    try {
      unlinkSync(serverInfoPath);
    } catch {
      // already gone
    }
    rmSync(storeDir, { recursive: true, force: true });
  };
}
