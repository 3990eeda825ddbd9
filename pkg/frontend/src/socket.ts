/**
 * One socket, event-driven. Wraps a WebSocket, decodes frames through
 * the protocol parser, and reports everything to a single handler set
 * so the model stays the only state holder. Reconnection is manual
 * (a visible control), not automatic: silently re-attaching could
 * re-press nothing but would hide that the session was lost.
 */

import { ServerMessage, parseServerMessage } from "./protocol";

export interface SocketHandlers {
  onOpen(): void;
  onMessage(msg: ServerMessage, now: number): void;
  onClose(): void;
  onBadFrame(reason: string): void;
}

// structural shim covering both the DOM WebSocket and the ws package,
// so tests can inject either; handler params stay loose on purpose
export interface WebSocketLike {
  onopen: ((ev: any) => void) | null;
  onmessage: ((ev: any) => void) | null;
  onclose: ((ev: any) => void) | null;
  onerror: ((ev: any) => void) | null;
  send(data: string): void;
  close(code?: number, reason?: string): void;
}

export type SocketFactory = (url: string) => WebSocketLike;

export class SessionSocket {
  private ws: WebSocketLike | null = null;

  constructor(
    private url: string,
    private handlers: SocketHandlers,
    private factory: SocketFactory = (u) => new WebSocket(u),
    private clock: () => number = () => Date.now(),
  ) {}

  connect(): void {
    this.close();
    const ws = this.factory(this.url);
    this.ws = ws;
    ws.onopen = () => this.handlers.onOpen();
    ws.onclose = () => this.handlers.onClose();
    ws.onerror = () => {
      /* the close event carries the state change */
    };
    ws.onmessage = (ev: { data: unknown }) => {
      try {
        const msg = parseServerMessage(String(ev.data));
        this.handlers.onMessage(msg, this.clock());
      } catch (err) {
        this.handlers.onBadFrame(err instanceof Error ? err.message : String(err));
      }
    };
  }

  send(text: string): void {
    if (!this.ws) throw new Error("not connected");
    this.ws.send(text);
  }

  close(): void {
    if (this.ws) {
      const ws = this.ws;
      this.ws = null;
      ws.onopen = ws.onmessage = ws.onclose = ws.onerror = null;
      try {
        ws.close();
      } catch {
        /* already closed */
      }
    }
  }
}
