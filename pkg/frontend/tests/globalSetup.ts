// Starts the real dxsim service on the 5-case fixture corpus for the
// scripted UI tests, and tears it down afterwards.

import { type ChildProcess, spawn } from "node:child_process";
import { existsSync } from "node:fs";
import { createServer } from "node:net";
import { join } from "node:path";
import type { TestProject } from "vitest/node";

let service: ChildProcess | null = null;

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const probe = createServer();
    probe.once("error", reject);
    probe.listen(0, "127.0.0.1", () => {
      const address = probe.address();
      if (address && typeof address === "object") {
        const port = address.port;
        probe.close(() => resolve(port));
      } else {
        reject(new Error("could not allocate a port"));
      }
    });
  });
}

async function waitForHealth(url: string, timeoutMs: number): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  let lastError: unknown = null;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${url}/api/health`);
      if (response.ok) return;
    } catch (error) {
      lastError = error;
    }
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
  throw new Error(`service did not come up at ${url}: ${lastError}`);
}

export default async function setup(project: TestProject): Promise<() => Promise<void>> {
  const repoRoot = join(import.meta.dirname, "..", "..");
  const corpus = join(repoRoot, "tests", "data", "cases_small.jsonl");
  if (!existsSync(corpus)) throw new Error(`fixture corpus missing: ${corpus}`);

  const port = await freePort();
  const url = `http://127.0.0.1:${port}`;
  service = spawn(
    "python3",
    ["-m", "dxsim.cli", "serve", "--corpus", corpus, "--port", String(port)],
    { cwd: repoRoot, stdio: ["ignore", "inherit", "inherit"] },
  );
  service.on("exit", (code) => {
    if (code && code !== 0) console.error(`dxsim service exited with ${code}`);
  });
  await waitForHealth(url, 30_000);
  project.provide("serviceUrl", url);

  return async () => {
    if (service && !service.killed) {
      service.kill("SIGINT");
      await new Promise((resolve) => setTimeout(resolve, 300));
      if (service.exitCode === null) service.kill("SIGKILL");
    }
  };
}

declare module "vitest" {
  export interface ProvidedContext {
    serviceUrl: string;
  }
}
