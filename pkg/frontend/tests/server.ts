/**
 * Spawns the real backend (`oms serve --seed`) for end-to-end tests and
 * hands back a base URL plus a raw fetch helper that bypasses every client
 * abstraction (the "direct" side of the contract tests).
 */

import { ChildProcess, spawn } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";

export interface Backend {
  baseUrl: string;
  stop: () => Promise<void>;
  dates: string[]; // today .. today+7 (the seeded world)
}

export const PASSWORD = "demo-pass-1";

export const USERS = {
  director: "dprince",
  administrator: "sokafor",
  supervisor: "lhart",
  staff: ["asilva", "bcole", "cyoung"],
  customer: "pat@example.net",
  supplier: "brightsupply",
};

async function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const probe = createServer();
    probe.listen(0, "127.0.0.1", () => {
      const address = probe.address();
      if (address && typeof address === "object") {
        const port = address.port;
        probe.close(() => resolve(port));
      } else {
        reject(new Error("no port"));
      }
    });
  });
}

export async function startBackend(): Promise<Backend> {
  const port = await freePort();
  const dir = mkdtempSync(join(tmpdir(), "oms-ui-"));
  const configPath = join(dir, "config.json");
  writeFileSync(configPath, JSON.stringify({
    host: "127.0.0.1",
    port,
    pbkdf2_iterations: 1000,
    webhook_targets: { A: "https://hooks.example/a" },
  }));
  const child: ChildProcess = spawn(
    "python3", ["-m", "oms.cli", "serve", "--config", configPath, "--seed"],
    { stdio: "ignore" });
  const baseUrl = `http://127.0.0.1:${port}`;
  const today = new Date();
  const dates = Array.from({ length: 8 }, (_, offset) => {
    const day = new Date(today);
    day.setDate(day.getDate() + offset);
    return day.toISOString().slice(0, 10);
  });
  const deadline = Date.now() + 30_000;
  for (;;) {
    try {
      const response = await fetch(`${baseUrl}/menu?date=${dates[0]}`);
      if (response.ok) break;
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) {
      child.kill();
      throw new Error("backend did not come up");
    }
    await new Promise((r) => setTimeout(r, 200));
  }
  return {
    baseUrl,
    dates,
    stop: () => new Promise((resolve) => {
      child.once("exit", () => resolve());
      child.kill();
    }),
  };
}

export interface DirectOutcome {
  status: number;
  ok: boolean;
  body: Record<string, unknown>;
}

export interface DirectSession {
  token: string;
  csrf: string;
  account: { id: number; role: string; username: string };
}

/** Raw HTTP, no client code involved. */
export async function direct(baseUrl: string, method: string, path: string,
                             body?: unknown,
                             session?: DirectSession): Promise<DirectOutcome> {
  const headers: Record<string, string> = { "Content-Type": "application/json" };
  if (session) {
    headers.Authorization = `Bearer ${session.token}`;
    headers["X-CSRF-Token"] = session.csrf;
  }
  const response = await fetch(baseUrl + path, {
    method,
    headers,
    body: body === undefined ? undefined : JSON.stringify(body),
  });
  const payload = await response.json().catch(() => ({}));
  return { status: response.status, ok: response.ok, body: payload };
}

export async function directLogin(baseUrl: string, username: string,
                                  password = PASSWORD): Promise<DirectSession> {
  const outcome = await direct(baseUrl, "POST", "/auth/login",
                               { username, password });
  if (!outcome.ok) throw new Error(`login failed for ${username}`);
  const body = outcome.body as { token: string; csrf_token: string;
                                 account: DirectSession["account"] };
  return { token: body.token, csrf: body.csrf_token, account: body.account };
}

/** Wait until an async condition holds (jsdom renders are async). */
export async function waitFor(check: () => boolean, timeoutMs = 8000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    if (check()) return;
    await new Promise((r) => setTimeout(r, 40));
  }
  throw new Error("condition never became true");
}
