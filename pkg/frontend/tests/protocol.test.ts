// @vitest-environment node
/**
 * Wire schema conformance against a session recorded from a live
 * server (tests/fixtures/session.jsonl, regenerate with
 * scripts/record-fixture.mjs). Every received frame must parse, every
 * frame the panel may emit must validate, and round trips must be
 * lossless.
 */

import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import {
  ClientMessage,
  hello,
  loadBank,
  parseServerMessage,
  reset,
  setBeta,
  touchPressed,
  touchReleased,
  validateClientMessage,
  encodeClientMessage,
} from "../src/protocol";

interface FixtureLine {
  dir: "recv" | "send" | "send_invalid";
  frame: string;
}

const fixturePath = fileURLToPath(new URL("fixtures/session.jsonl", import.meta.url));
const fixture: FixtureLine[] = readFileSync(fixturePath, "utf8")
  .trim()
  .split("\n")
  .map((line) => JSON.parse(line));

const recv = fixture.filter((l) => l.dir === "recv");
const sent = fixture.filter((l) => l.dir === "send");

describe("recorded server frames", () => {
  it("covers every frame type the schema defines", () => {
    const types = new Set(recv.map((l) => JSON.parse(l.frame).type));
    expect(types).toEqual(new Set(["welcome", "tick", "ack", "error"]));
  });

  it("parses every recorded frame", () => {
    expect(recv.length).toBeGreaterThan(20);
    for (const line of recv) {
      const msg = parseServerMessage(line.frame);
      expect(["welcome", "tick", "ack", "error"]).toContain(msg.type);
    }
  });

  it("includes ticks with and without an active recall", () => {
    const ticks = recv
      .map((l) => parseServerMessage(l.frame))
      .filter((m) => m.type === "tick");
    expect(ticks.some((t) => t.entropy === null)).toBe(true);
    expect(ticks.some((t) => typeof t.entropy === "number")).toBe(true);
    expect(ticks.some((t) => Object.keys(t.touches).length > 0)).toBe(true);
  });

  it("round-trips losslessly through parse and re-serialize", () => {
    for (const line of recv) {
      const msg = parseServerMessage(line.frame);
      const again = parseServerMessage(JSON.stringify(msg));
      expect(again).toEqual(msg);
    }
  });
});

describe("recorded client frames", () => {
  it("validates every frame the recorder sent", () => {
    expect(sent.length).toBeGreaterThan(5);
    for (const line of sent) {
      expect(validateClientMessage(JSON.parse(line.frame))).toBeNull();
    }
  });

  it("includes the zero-magnitude press", () => {
    const zero = sent
      .map((l) => JSON.parse(l.frame))
      .find((m) => m.type === "touch" && m.event === "pressed" && m.magnitude === 0);
    expect(zero).toBeDefined();
    expect(validateClientMessage(zero)).toBeNull();
  });

  it("flags the deliberately broken frame as invalid", () => {
    const bad = fixture.filter((l) => l.dir === "send_invalid");
    expect(bad.length).toBeGreaterThan(0);
    for (const line of bad) {
      expect(() => {
        const parsed = JSON.parse(line.frame);
        if (validateClientMessage(parsed) !== null) throw new Error("invalid");
      }).toThrow();
    }
  });
});

describe("parseServerMessage rejections", () => {
  const bad: [string, string][] = [
    ["not json", "not valid JSON"],
    ["[1,2,3]", "must be a JSON object"],
    ['{"type":"mystery"}', "unknown server message type"],
    ['{"type":"ack"}', "ack frame without of"],
    ['{"type":"error"}', "error frame without message"],
    ['{"type":"tick","tick":1}', "malformed tick"],
    [
      '{"type":"tick","tick":1,"t":0.1,"angles":["a"],"touches":{},"patch":"","rho":0,"entropy":null,"beta":8}',
      "malformed tick",
    ],
    [
      '{"type":"tick","tick":1,"t":0.1,"angles":[0,0,0],"touches":{},"patch":"","rho":0,"entropy":"low","beta":8}',
      "malformed tick",
    ],
    ['{"type":"welcome","version":1}', "malformed welcome"],
  ];

  it.each(bad)("rejects %s", (frame, why) => {
    expect(() => parseServerMessage(frame)).toThrow(why);
  });

  it("rejects a welcome from a different protocol version", () => {
    const line = recv.find((l) => JSON.parse(l.frame).type === "welcome")!;
    const frame = JSON.parse(line.frame);
    frame.version = 2;
    expect(() => parseServerMessage(JSON.stringify(frame))).toThrow("version");
  });
});

describe("message builders", () => {
  it("only build schema-valid messages", () => {
    const built: ClientMessage[] = [
      hello(),
      touchPressed("wrist_upper", 8),
      touchPressed("wrist_upper", 0),
      touchReleased("wrist_upper"),
      setBeta(32),
      loadBank("wrist_upper", "/tmp/bank.json"),
      reset(),
    ];
    for (const msg of built) {
      expect(validateClientMessage(msg)).toBeNull();
      expect(JSON.parse(encodeClientMessage(msg))).toEqual(msg);
    }
  });

  it("refuses to encode schema violations", () => {
    expect(() => encodeClientMessage(touchPressed("wrist_upper", -1))).toThrow(
      "magnitude",
    );
    expect(() => encodeClientMessage(touchPressed("wrist_upper", Infinity))).toThrow(
      "magnitude",
    );
    expect(() => encodeClientMessage(touchPressed("", 5))).toThrow("patch");
    expect(() => encodeClientMessage(setBeta(0))).toThrow("beta");
    expect(() => encodeClientMessage(setBeta(-4))).toThrow("beta");
    expect(() => encodeClientMessage(setBeta(NaN))).toThrow("beta");
  });
});

// seeded generator so the randomized round trip is reproducible
function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

describe("randomized tick round trip", () => {
  it("survives 200 generated frames (seed 7)", () => {
    const rng = mulberry32(7);
    for (let i = 0; i < 200; i++) {
      const touched = rng() < 0.5;
      const frame = {
        type: "tick",
        tick: Math.floor(rng() * 1e6),
        t: rng() * 100,
        angles: [rng() * 2 - 1, rng() * 2.4 - 1.2, rng() * 3.2 - 1.6],
        touches: touched ? { wrist_upper: rng() * 20 } : {},
        patch: touched ? "wrist_upper" : "",
        rho: rng(),
        entropy: touched ? rng() * 4 : null,
        beta: 0.5 + rng() * 63.5,
      };
      const msg = parseServerMessage(JSON.stringify(frame));
      expect(msg).toEqual(frame);
    }
  });
});
