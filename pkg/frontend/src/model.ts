/**
 * UI session state and the only two ways it changes: socket events and
 * user input handlers. The model owns nothing about the simulation;
 * rendered joint angles always come from the most recent tick frame,
 * never from extrapolation, and closing the panel releases held
 * touches but changes nothing else server-side.
 */

import {
  ClientMessage,
  ServerMessage,
  Tick,
  Welcome,
  encodeClientMessage,
  hello,
  loadBank,
  reset,
  setBeta,
  touchPressed,
  touchReleased,
} from "./protocol";

export type ConnectionStatus = "connecting" | "open" | "closed";

export interface PatchControl {
  pressed: boolean;
  magnitude: number;
}

export const STALE_AFTER_MS = 500;

export class SessionModel {
  status: ConnectionStatus = "connecting";
  welcome: Welcome | null = null;
  lastTick: Tick | null = null;
  lastTickAt: number | null = null;
  patches = new Map<string, PatchControl>();
  betaSlider = 8;
  selectedBank = "";
  lastError: string | null = null;
  /** Every message this panel ever sent, for conformance auditing. */
  sent: ClientMessage[] = [];

  constructor(private rawSend: (text: string) => void) {}

  private send(msg: ClientMessage, involvedPatch?: string): boolean {
    try {
      const text = encodeClientMessage(msg);
      this.rawSend(text);
      this.sent.push(msg);
      return true;
    } catch (err) {
      // a failed send must be visible and must not leave a phantom hold
      this.lastError = err instanceof Error ? err.message : String(err);
      if (involvedPatch) {
        const control = this.patches.get(involvedPatch);
        if (control) control.pressed = false;
      }
      return false;
    }
  }

  // -- socket events -------------------------------------------------

  onOpen(): void {
    this.status = "open";
    this.lastError = null;
  }

  onClose(): void {
    this.status = "closed";
    // the socket is gone; nothing is held anymore as far as this
    // panel is concerned (releaseAll on page hide handles the server)
    for (const control of this.patches.values()) control.pressed = false;
  }

  onServerMessage(msg: ServerMessage, now: number): void {
    switch (msg.type) {
      case "welcome":
        this.welcome = msg;
        this.betaSlider = msg.beta;
        for (const name of Object.keys(msg.patches)) {
          if (!this.patches.has(name)) {
            this.patches.set(name, { pressed: false, magnitude: 8 });
          }
        }
        break;
      case "tick":
        this.lastTick = msg;
        this.lastTickAt = now;
        break;
      case "error":
        this.lastError = msg.message;
        break;
      case "ack":
        break;
    }
  }

  /** True when connected but the tick stream has gone quiet. */
  isStale(now: number): boolean {
    if (this.status !== "open" || this.lastTickAt === null) return false;
    return now - this.lastTickAt > STALE_AFTER_MS;
  }

  // -- user input handlers -------------------------------------------

  private control(patch: string): PatchControl {
    let control = this.patches.get(patch);
    if (!control) {
      control = { pressed: false, magnitude: 8 };
      this.patches.set(patch, control);
    }
    return control;
  }

  press(patch: string): void {
    const control = this.control(patch);
    if (control.pressed) return;
    control.pressed = true;
    this.send(touchPressed(patch, control.magnitude), patch);
  }

  release(patch: string): void {
    const control = this.control(patch);
    if (!control.pressed) return;
    control.pressed = false;
    this.send(touchReleased(patch), patch);
  }

  /** Slider move: remember the value, re-press live if currently held. */
  setMagnitude(patch: string, magnitude: number): void {
    const control = this.control(patch);
    control.magnitude = magnitude;
    if (control.pressed) {
      this.send(touchPressed(patch, magnitude), patch);
    }
  }

  setBetaSlider(beta: number): void {
    this.betaSlider = beta;
    this.send(setBeta(beta));
  }

  requestLoadBank(patch: string, path: string): void {
    this.selectedBank = path;
    this.send(loadBank(patch, path));
  }

  requestReset(): void {
    this.send(reset());
  }

  requestHello(): void {
    this.send(hello());
  }

  /** Page is going away: let go of everything we hold, nothing more. */
  releaseAll(): void {
    for (const name of this.patches.keys()) this.release(name);
  }
}
