// @vitest-environment node
/**
 * End-to-end conformance against a real served simulator: a scripted
 * press-hold-release driven through the panel's own socket, model and
 * protocol stack must trace the same trajectory as the command line
 * replay of the identical touch script, within one tick of timing
 * jitter. Sensor noise is turned off so the comparison is exact.
 */

import { execFileSync, spawn, ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import WebSocket from "ws";

import { SessionModel } from "../src/model";
import { SessionSocket, WebSocketLike } from "../src/socket";
import { ServerMessage, Tick, validateClientMessage } from "../src/protocol";

const PATCH = "wrist_upper";
const MAGNITUDE = 8;
const BETA = 32;
const HOLD_TICKS = 40; // matches the 40 associations on the tape
const PORT = 8900 + (process.pid % 50);

let work = "";
let server: ChildProcess | null = null;
let reference: number[][] = [];

function run(args: string[]): string {
  return execFileSync("touchmem", args, { cwd: work, encoding: "utf8" });
}

async function healthy(timeoutMs: number): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    try {
      const res = await fetch(`http://127.0.0.1:${PORT}/healthz`);
      const body = (await res.json()) as { status: string };
      if (body.status === "ok") return;
    } catch {
      /* not up yet */
    }
    if (Date.now() > deadline) throw new Error("server never became healthy");
    await new Promise((r) => setTimeout(r, 100));
  }
}

beforeAll(async () => {
  work = mkdtempSync(join(tmpdir(), "panel-e2e-"));

  // noiseless config so live and offline runs are bit-identical
  execFileSync(
    "python3",
    [
      "-c",
      [
        "import dataclasses",
        "from touchmem.config import default_config, save_config",
        "cfg = default_config()",
        "cfg = dataclasses.replace(cfg, sim=dataclasses.replace(cfg.sim, noise_sigma=0.0))",
        "save_config(cfg, 'config.yaml')",
      ].join("\n"),
    ],
    { cwd: work },
  );

  // the tape starts where a fresh server starts (all joints at zero),
  // so the live run and the offline replay share their initial pose
  run([
    "--config", "config.yaml", "record", "--kind", "sequence",
    "--patch", PATCH, "--magnitude", String(MAGNITUDE),
    "--waypoints", "0,0,0;0,0.6,0", "--ticks-per-segment", String(HOLD_TICKS),
    "--out", "seq.jsonl",
  ]);
  run([
    "--config", "config.yaml", "train",
    "--recording", "seq.jsonl", "--patch", PATCH, "--out", "bank.json",
  ]);

  // the command line equivalent of holding the patch for the whole
  // tape: constant touch at the same magnitude and temperature
  run([
    "--config", "config.yaml", "replay",
    "--bank", `${PATCH}=bank.json`, "--recording", "seq.jsonl",
    "--patch", PATCH, "--magnitude", String(MAGNITUDE),
    "--beta", String(BETA), "--out", "traj.csv",
  ]);
  const rows = readFileSync(join(work, "traj.csv"), "utf8").trim().split("\n");
  const header = rows[0]!.split(",");
  expect(header.slice(0, 4)).toEqual(["t", "lift", "flex", "roll"]);
  reference = rows.slice(1).map((row) => row.split(",").slice(1, 4).map(Number));
  expect(reference.length).toBe(HOLD_TICKS + 1);

  server = spawn(
    "touchmem",
    ["--config", "config.yaml", "serve", "--bank", `${PATCH}=bank.json`,
     "--port", String(PORT)],
    { cwd: work, stdio: "ignore" },
  );
  await healthy(15_000);
}, 30_000);

afterAll(() => {
  if (server) server.kill();
  if (work) rmSync(work, { recursive: true, force: true });
});

describe("served simulator through the panel stack", () => {
  it(
    "press-hold-release matches the command line trajectory",
    async () => {
      const frames: ServerMessage[] = [];
      let cursor = 0;
      let waiter: (() => void) | null = null;
      let released = false;

      const model = new SessionModel((text) => socket.send(text));
      const socket = new SessionSocket(
        `ws://127.0.0.1:${PORT}/session`,
        {
          onOpen: () => model.onOpen(),
          onMessage(msg, now) {
            model.onServerMessage(msg, now);
            frames.push(msg);
            // event-driven release, exactly like a pointerup handler:
            // let go once the hold has covered the whole tape
            if (!released && touchedTicks().length >= HOLD_TICKS) {
              released = true;
              model.release(PATCH);
            }
            if (waiter) {
              const w = waiter;
              waiter = null;
              w();
            }
          },
          onClose: () => model.onClose(),
          onBadFrame(reason) {
            throw new Error(`undecodable server frame: ${reason}`);
          },
        },
        (url) => new WebSocket(url) as unknown as WebSocketLike,
      );

      const touchedTicks = () =>
        frames.filter((m): m is Tick => m.type === "tick" && PATCH in m.touches);

      async function waitFor<T extends ServerMessage>(
        pred: (m: ServerMessage) => m is T,
        what: string,
        timeoutMs = 10_000,
      ): Promise<T> {
        const deadline = Date.now() + timeoutMs;
        for (;;) {
          while (cursor < frames.length) {
            const msg = frames[cursor++]!;
            if (pred(msg)) return msg;
          }
          if (Date.now() > deadline) throw new Error(`timed out waiting for ${what}`);
          await new Promise<void>((resolve) => {
            waiter = resolve;
            setTimeout(resolve, 250);
          });
        }
      }

      socket.connect();
      await waitFor(
        (m): m is ServerMessage => m.type === "welcome",
        "welcome",
      );
      expect(model.welcome!.version).toBe(1);
      expect(model.welcome!.banks).toContain(PATCH);

      model.setBetaSlider(BETA);
      await waitFor(
        (m): m is ServerMessage => m.type === "ack" && m.of === "set_beta",
        "set_beta ack",
      );

      model.setMagnitude(PATCH, MAGNITUDE);
      model.press(PATCH);
      await waitFor(
        (m): m is ServerMessage => m.type === "ack" && m.of === "touch",
        "press ack",
      );

      // hold until the release fires, then read one more settled pose
      const after = await waitFor(
        (m): m is Tick => m.type === "tick" && released && !(PATCH in m.touches),
        "first post-release tick",
        20_000,
      );
      socket.close();

      const held = touchedTicks();
      expect(held.every((t) => t.beta === BETA)).toBe(true);
      expect(held.some((t) => typeof t.entropy === "number")).toBe(true);

      // one tick of jitter is allowed between the scripted hold and
      // what the socket latency actually produced
      const K = held.length;
      expect(Math.abs(K - HOLD_TICKS)).toBeLessThanOrEqual(1);

      const live = [...held.map((t) => t.angles), after.angles];

      // reference rows are the pre-move poses plus the closing pose
      const overlap = Math.min(live.length, reference.length);
      expect(overlap).toBeGreaterThanOrEqual(HOLD_TICKS);
      let worst = 0;
      for (let i = 0; i < overlap; i++) {
        for (let j = 0; j < 3; j++) {
          worst = Math.max(worst, Math.abs(live[i]![j]! - reference[i]![j]!));
        }
      }
      expect(worst).toBeLessThan(1e-9);

      // independent check at the measured hold length: the offline
      // closed loop with the identical touch script traces the same
      // poses at every tick, closing pose included
      const exact = JSON.parse(
        execFileSync(
          "python3",
          [
            "-c",
            [
              "import json, sys",
              "from touchmem.config import load_config",
              "from touchmem.memory import MemoryBank",
              "from touchmem.scenarios import constant_touch",
              "from touchmem.sim import run_closed_loop",
              "cfg = load_config('config.yaml')",
              `bank = MemoryBank.load('bank.json')`,
              `K = ${K}`,
              `log = run_closed_loop(cfg, {'${PATCH}': bank}, constant_touch('${PATCH}', ${MAGNITUDE}, K), K, beta=${BETA})`,
              "print(json.dumps([[float(a) for a in row] for row in log.angles()]))",
            ].join("\n"),
          ],
          { cwd: work, encoding: "utf8" },
        ),
      ) as number[][];
      expect(exact.length).toBe(live.length);
      let worstExact = 0;
      for (let i = 0; i < live.length; i++) {
        for (let j = 0; j < 3; j++) {
          worstExact = Math.max(worstExact, Math.abs(live[i]![j]! - exact[i]![j]!));
        }
      }
      expect(worstExact).toBeLessThan(1e-9);

      // everything the panel emitted during the run was schema-valid
      expect(model.sent.length).toBeGreaterThanOrEqual(3);
      for (const msg of model.sent) {
        expect(validateClientMessage(msg)).toBeNull();
      }
    },
    40_000,
  );

  it(
    "closing and reopening the panel leaves the simulator alone",
    async () => {
      const before = await fetch(`http://127.0.0.1:${PORT}/healthz`).then((r) =>
        r.json() as Promise<{ clients: number }>,
      );

      // open a panel, hold a touch, then leave like a page unload does
      const model = new SessionModel((text) => socket.send(text));
      const socket = new SessionSocket(
        `ws://127.0.0.1:${PORT}/session`,
        {
          onOpen: () => model.onOpen(),
          onMessage: (msg, now) => model.onServerMessage(msg, now),
          onClose: () => model.onClose(),
          onBadFrame: () => {},
        },
        (url) => new WebSocket(url) as unknown as WebSocketLike,
      );
      socket.connect();
      await new Promise((r) => setTimeout(r, 300));
      model.press(PATCH);
      await new Promise((r) => setTimeout(r, 200));
      model.releaseAll();
      socket.close();
      await new Promise((r) => setTimeout(r, 300));

      // reopen: the arm must be wherever physics left it, not reset,
      // and no touch may remain active from the dead panel
      const model2 = new SessionModel((text) => socket2.send(text));
      let settled: Tick | null = null;
      const socket2 = new SessionSocket(
        `ws://127.0.0.1:${PORT}/session`,
        {
          onOpen: () => model2.onOpen(),
          onMessage(msg, now) {
            model2.onServerMessage(msg, now);
            if (msg.type === "tick") settled = msg;
          },
          onClose: () => model2.onClose(),
          onBadFrame: () => {},
        },
        (url) => new WebSocket(url) as unknown as WebSocketLike,
      );
      socket2.connect();
      await new Promise((r) => setTimeout(r, 400));
      const first = settled! as Tick;
      await new Promise((r) => setTimeout(r, 400));
      const second = settled! as Tick;
      socket2.close();

      expect(first).not.toBeNull();
      expect(Object.keys(second.touches)).toEqual([]); // released on unload
      expect(second.angles).toEqual(first.angles); // nothing keeps moving
      expect(second.tick).toBeGreaterThan(first.tick); // but time does

      const after = await fetch(`http://127.0.0.1:${PORT}/healthz`).then((r) =>
        r.json() as Promise<{ clients: number }>,
      );
      expect(after.clients).toBe(before.clients);
    },
    30_000,
  );
});
