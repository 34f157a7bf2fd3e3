/**
 * Contract test against the real training service.
 *
 * Spawns the Python backend on a scratch copy of the bundled project,
 * drives a full acquisition session through the API client (create, two
 * overrides, confirms to completion, finish), and checks that the written
 * log replays cleanly and the dashboard ratio matches the script.
 */
import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { cpSync, mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { Client } from "../src/api.js";
import { sampleActions } from "../src/palette.js";

const DATA_DIR = join(__dirname, "..", "..", "src", "parsebench", "data");
const PORT = 8761 + (process.pid % 100);
const BASE = `http://127.0.0.1:${PORT}`;

let proc: ChildProcess;
let projectFile: string;
const client = new Client(BASE);

async function waitReady(timeoutMs = 30000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      await client.corpus();
      return;
    } catch {
      await new Promise((r) => setTimeout(r, 200));
    }
  }
  throw new Error("service did not come up");
}

beforeAll(async () => {
  const scratch = mkdtempSync(join(tmpdir(), "parsebench-ui-"));
  cpSync(DATA_DIR, scratch, { recursive: true });
  projectFile = join(scratch, "project.json");
  proc = spawn("python3", ["-m", "parsebench.cli", "--project", projectFile,
    "serve", "--port", String(PORT)], { stdio: "ignore" });
  await waitReady();
}, 40000);

afterAll(() => {
  proc?.kill();
});

describe("console contract against the live service", () => {
  it("every palette-generated action parses without a 422", async () => {
    for (const action of sampleActions()) {
      const result = await client.validateAction(action);
      expect(result.ok, `${action} should be well-formed`).toBe(true);
      expect(result.canonical).toBe(action);
    }
  });

  it("scripted session: 2 overrides, confirms to the end, replayable log",
    async () => {
      const stats = await client.retrain("hybrid");
      expect(stats.trainingAccuracy).toBe(1.0);

      let view = await client.createSession("John bought a book.");
      expect(view.input).toHaveLength(5);
      expect(view.proposal).toBe("(S)");

      // override 1: same effect as the proposal, different action text
      view = await client.postAction(view.id, "(S NOUN)");
      expect(view.overrides).toBe(1);

      // override 2: an extra mark the model would never propose
      expect(view.proposal).toBe("(R 1 TO NP AS PRED)");
      view = await client.postAction(view.id, "(M -1 NOTE X1)");
      expect(view.overrides).toBe(2);

      let confirms = 0;
      while (!view.done) {
        expect(view.proposal, "model must keep proposing").not.toBeNull();
        view = await client.postAction(view.id, "CONFIRM");
        confirms += 1;
        expect(confirms).toBeLessThan(30);
      }
      expect(view.confirms).toBe(confirms);
      expect(view.overrides).toBe(2);
      expect(confirms).toBe(8);

      const finished = await client.finish(view.id);
      expect(finished.log).toMatch(/^w\d+$/);

      // the dashboard ratio equals the scripted counts
      const { logs } = await client.corpus();
      const entry = logs.find((l) => l.id === finished.log);
      expect(entry).toBeDefined();
      expect(entry!.confirms).toBe(confirms);
      expect(entry!.overrides).toBe(2);

      // the written log replays with exit 0 through the CLI
      const replay = spawnSync("python3", ["-m", "parsebench.cli",
        "--project", projectFile, "replay", finished.log],
        { encoding: "utf-8" });
      expect(replay.status, replay.stdout + replay.stderr).toBe(0);
      expect(replay.stdout).toContain("OK");
    }, 30000);

  it("undo and error handling keep the session consistent", async () => {
    let view = await client.createSession("Mary won.");
    const before = JSON.stringify(await client.getSession(view.id));
    await expect(client.postAction(view.id, "(R 5 TO")).rejects.toMatchObject({
      status: 422,
      body: { code: "MALFORMED_ACTION" },
    });
    expect(JSON.stringify(await client.getSession(view.id))).toBe(before);

    view = await client.postAction(view.id, "(S)");
    view = await client.undo(view.id);
    expect(JSON.stringify(view)).toBe(before);
    await expect(client.undo(view.id)).rejects.toMatchObject({ status: 409 });
  });
});
