/**
 * Wire protocol: types, parsers and builders for the /session socket.
 *
 * This module is the client side of the published schema (see
 * docs/protocol.md at the repository root). Parsers reject anything
 * the schema does not promise, and builders only construct messages
 * the server accepts, so a passing round trip here is a protocol
 * conformance statement, not just a type check.
 */

export const PROTOCOL_VERSION = 1;

export interface PatchInfo {
  axis: [number, number, number];
  theta_sign: 1 | -1;
  joint: string;
}

export interface Welcome {
  type: "welcome";
  version: number;
  joints: string[];
  limits: [number, number][];
  patches: Record<string, PatchInfo>;
  tick_rate: number;
  beta: number;
  banks: string[];
  tick: number;
}

export interface Tick {
  type: "tick";
  tick: number;
  t: number;
  angles: number[];
  touches: Record<string, number>;
  patch: string;
  rho: number;
  entropy: number | null;
  beta: number;
}

export interface Ack {
  type: "ack";
  of: string;
  [extra: string]: unknown;
}

export interface ErrorMsg {
  type: "error";
  message: string;
}

export type ServerMessage = Welcome | Tick | Ack | ErrorMsg;

export type TouchEvent_ = "pressed" | "released";

export type ClientMessage =
  | { type: "hello" }
  | { type: "touch"; event: "pressed"; patch: string; magnitude: number }
  | { type: "touch"; event: "released"; patch: string }
  | { type: "set_beta"; beta: number }
  | { type: "load_bank"; patch: string; path: string }
  | { type: "reset" };

const isObject = (x: unknown): x is Record<string, unknown> =>
  typeof x === "object" && x !== null && !Array.isArray(x);

const isFiniteNumber = (x: unknown): x is number =>
  typeof x === "number" && Number.isFinite(x);

const isNumberArray = (x: unknown): x is number[] =>
  Array.isArray(x) && x.every(isFiniteNumber);

function isPatchInfo(x: unknown): x is PatchInfo {
  return (
    isObject(x) &&
    isNumberArray(x.axis) &&
    x.axis.length === 3 &&
    (x.theta_sign === 1 || x.theta_sign === -1) &&
    typeof x.joint === "string"
  );
}

function isWelcome(m: Record<string, unknown>): m is Welcome & Record<string, unknown> {
  return (
    m.type === "welcome" &&
    isFiniteNumber(m.version) &&
    Array.isArray(m.joints) &&
    m.joints.every((j) => typeof j === "string") &&
    Array.isArray(m.limits) &&
    m.limits.every((l) => isNumberArray(l) && l.length === 2) &&
    isObject(m.patches) &&
    Object.values(m.patches).every(isPatchInfo) &&
    isFiniteNumber(m.tick_rate) &&
    m.tick_rate > 0 &&
    isFiniteNumber(m.beta) &&
    Array.isArray(m.banks) &&
    m.banks.every((b) => typeof b === "string") &&
    isFiniteNumber(m.tick)
  );
}

function isTick(m: Record<string, unknown>): m is Tick & Record<string, unknown> {
  return (
    m.type === "tick" &&
    isFiniteNumber(m.tick) &&
    isFiniteNumber(m.t) &&
    isNumberArray(m.angles) &&
    isObject(m.touches) &&
    Object.values(m.touches).every(isFiniteNumber) &&
    typeof m.patch === "string" &&
    isFiniteNumber(m.rho) &&
    (m.entropy === null || isFiniteNumber(m.entropy)) &&
    isFiniteNumber(m.beta)
  );
}

/**
 * Parse one server frame. Throws on anything outside the published
 * schema so protocol drift fails loudly instead of rendering garbage.
 */
export function parseServerMessage(text: string): ServerMessage {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch {
    throw new Error("server frame is not valid JSON");
  }
  if (!isObject(raw)) throw new Error("server frame must be a JSON object");
  const m = raw;
  switch (m.type) {
    case "welcome":
      if (!isWelcome(m)) throw new Error("malformed welcome frame");
      if (m.version !== PROTOCOL_VERSION) {
        throw new Error(`unsupported protocol version ${m.version}`);
      }
      return m;
    case "tick":
      if (!isTick(m)) throw new Error("malformed tick frame");
      return m;
    case "ack":
      if (typeof m.of !== "string") throw new Error("ack frame without of");
      return m as unknown as Ack;
    case "error":
      if (typeof m.message !== "string") throw new Error("error frame without message");
      return m as unknown as ErrorMsg;
    default:
      throw new Error(`unknown server message type ${JSON.stringify(m.type)}`);
  }
}

/**
 * Validate an outbound message against the published client schema.
 * Mirrors the server's own checks: this is what "schema-valid" means
 * in the conformance tests.
 */
export function validateClientMessage(msg: unknown): string | null {
  if (!isObject(msg)) return "message must be a JSON object";
  switch (msg.type) {
    case "hello":
    case "reset":
      return null;
    case "touch": {
      if (typeof msg.patch !== "string" || msg.patch === "") {
        return "touch needs a patch name";
      }
      if (msg.event === "released") return null;
      if (msg.event !== "pressed") {
        return "touch event must be 'pressed' or 'released'";
      }
      if (!isFiniteNumber(msg.magnitude) || msg.magnitude < 0) {
        return "pressed touch needs a finite magnitude >= 0";
      }
      return null;
    }
    case "set_beta":
      if (!isFiniteNumber(msg.beta) || msg.beta <= 0) {
        return "set_beta needs a positive finite beta";
      }
      return null;
    case "load_bank":
      if (typeof msg.patch !== "string" || typeof msg.path !== "string") {
        return "load_bank needs a patch name and a file path";
      }
      return null;
    default:
      return `unknown message type ${JSON.stringify(msg.type)}`;
  }
}

export const hello = (): ClientMessage => ({ type: "hello" });

export const touchPressed = (patch: string, magnitude: number): ClientMessage => ({
  type: "touch",
  event: "pressed",
  patch,
  magnitude,
});

export const touchReleased = (patch: string): ClientMessage => ({
  type: "touch",
  event: "released",
  patch,
});

export const setBeta = (beta: number): ClientMessage => ({ type: "set_beta", beta });

export const loadBank = (patch: string, path: string): ClientMessage => ({
  type: "load_bank",
  patch,
  path,
});

export const reset = (): ClientMessage => ({ type: "reset" });

/** Serialize an outbound message, refusing to send schema violations. */
export function encodeClientMessage(msg: ClientMessage): string {
  const problem = validateClientMessage(msg);
  if (problem) throw new Error(problem);
  return JSON.stringify(msg);
}
