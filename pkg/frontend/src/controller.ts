// Session controller: owns a transport, feeds the buffers, reconnects with
// backoff (buffers preserved), and guards the flight-termination command
// behind an explicit arm step. Transport is injected so tests can drive the
// controller over a raw TCP line socket against a real server.

import { SessionBuffers } from "./buffers.js";
import { CommandKind, commandLine, parseFrame } from "./protocol.js";

export interface Transport {
  send(line: string): void;
  close(): void;
}

export type TransportFactory = (
  url: string,
  onLine: (line: string) => void,
  onOpen: () => void,
  onClose: () => void,
) => Transport;

export type ConnectionState = "connecting" | "live" | "reconnecting" | "closed";

export interface ControllerOptions {
  backoffInitialMs?: number;
  backoffMaxMs?: number;
  now?: () => number;
}

export class SessionController {
  readonly buffers = new SessionBuffers();
  state: ConnectionState = "closed";
  lastError = "";
  poppetArmed = false;
  private transport: Transport | null = null;
  private url = "";
  private factory: TransportFactory;
  private listeners: (() => void)[] = [];
  private backoffMs: number;
  private readonly backoff0: number;
  private readonly backoffMax: number;
  private reconnectTimer: ReturnType<typeof setTimeout> | null = null;
  private closedByUser = false;
  private now: () => number;

  constructor(factory: TransportFactory, opts: ControllerOptions = {}) {
    this.factory = factory;
    this.backoff0 = opts.backoffInitialMs ?? 1000;
    this.backoffMax = opts.backoffMaxMs ?? 15000;
    this.backoffMs = this.backoff0;
    this.now = opts.now ?? (() => Date.now());
  }

  onChange(cb: () => void): void {
    this.listeners.push(cb);
  }

  private notify(): void {
    for (const cb of this.listeners) cb();
  }

  connect(url: string): void {
    this.url = url;
    this.closedByUser = false;
    this.open("connecting");
  }

  private open(state: ConnectionState): void {
    this.state = state;
    this.notify();
    try {
      this.transport = this.factory(
        this.url,
        (line) => this.handleLine(line),
        () => {
          this.state = "live";
          this.backoffMs = this.backoff0;
          this.notify();
        },
        () => this.handleClose(),
      );
    } catch (e) {
      this.lastError = String(e);
      this.handleClose();
    }
  }

  private handleClose(): void {
    this.transport = null;
    this.buffers.clearPending();      // a dead link cannot confirm anything
    if (this.closedByUser) {
      this.state = "closed";
      this.notify();
      return;
    }
    this.state = "reconnecting";
    this.notify();
    this.reconnectTimer = setTimeout(() => this.open("reconnecting"),
      this.backoffMs);
    this.backoffMs = Math.min(this.backoffMs * 2, this.backoffMax);
  }

  private handleLine(line: string): void {
    const frame = parseFrame(line);
    if (frame.kind === "error") {
      this.lastError = frame.message;
      this.buffers.addFeed(this.buffers.latest()?.t ?? 0,
        `server: ${frame.message}`);
    } else {
      this.buffers.push(frame.state);
    }
    this.notify();
  }

  // poppet termination is irreversible: the first call arms, the second fires
  armPoppet(): void {
    this.poppetArmed = true;
    this.notify();
  }

  disarmPoppet(): void {
    this.poppetArmed = false;
    this.notify();
  }

  send(cmd: CommandKind): boolean {
    if (this.transport === null || this.state !== "live") {
      this.lastError = "not connected";
      this.notify();
      return false;
    }
    if (cmd === "poppet_open" && !this.poppetArmed) {
      this.lastError = "poppet requires confirmation";
      this.notify();
      return false;
    }
    try {
      this.transport.send(commandLine(cmd));
    } catch (e) {
      this.lastError = `send failed: ${e}`;
      this.buffers.clearPending();
      this.notify();
      return false;
    }
    this.buffers.markPending(cmd, this.now());
    if (cmd === "poppet_open") this.poppetArmed = false;
    this.notify();
    return true;
  }

  close(): void {
    this.closedByUser = true;
    if (this.reconnectTimer !== null) clearTimeout(this.reconnectTimer);
    this.transport?.close();
    this.transport = null;
    this.state = "closed";
    this.notify();
  }
}

// Browser transport: WebSocket carrying one JSON object per text message
// (the server also accepts newline-joined batches).
export const webSocketTransport: TransportFactory = (
  url, onLine, onOpen, onClose,
) => {
  const ws = new WebSocket(url);
  ws.onopen = () => onOpen();
  ws.onmessage = (ev) => {
    for (const line of String(ev.data).split("\n")) {
      if (line.trim()) onLine(line);
    }
  };
  ws.onclose = () => onClose();
  ws.onerror = () => { /* the close handler drives reconnection */ };
  return {
    send: (line) => ws.send(line),
    close: () => ws.close(),
  };
};
