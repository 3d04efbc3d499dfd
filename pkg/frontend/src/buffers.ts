// Rolling session state: frame history, actuator shading intervals, the
// pending-command indicator, and the event feed. Pure data - everything
// here is unit-testable without a DOM or a socket.

import { CommandKind, StateFrame, frameReflects } from "./protocol.js";

export interface ShadeInterval {
  kind: "vent" | "pump";
  t0: number;
  t1: number;          // == latest frame t while still active
  open: boolean;
}

export interface PendingCommand {
  cmd: CommandKind;
  sentAt: number;      // wall-clock ms
  framesSinceSend: number;
}

export interface FeedItem {
  t: number;
  text: string;
}

export class SessionBuffers {
  readonly capacity: number;
  frames: StateFrame[] = [];
  gaps: number[] = [];             // frame times preceded by a discontinuity
  feed: FeedItem[] = [];
  pending: PendingCommand | null = null;
  private lastT: number | null = null;

  constructor(capacity = 7200) {   // two hours at the 1 Hz frame cadence
    this.capacity = capacity;
  }

  push(frame: StateFrame): void {
    // a reconnect to a restarted server shows up as time jumping backwards;
    // a long outage as a forward jump well beyond the cadence
    if (this.lastT !== null) {
      const dt = frame.t - this.lastT;
      const cadence = this.estimateCadence();
      if (dt <= 0 || (cadence !== null && dt > 5 * cadence)) {
        this.gaps.push(frame.t);
        this.addFeed(frame.t, `stream gap (${dt.toFixed(1)} s jump)`);
      }
    }
    this.lastT = frame.t;
    this.frames.push(frame);
    if (this.frames.length > this.capacity) {
      this.frames.splice(0, this.frames.length - this.capacity);
    }
    if (frame.event) {
      this.addFeed(frame.t, frame.event);
    }
    if (this.pending) {
      this.pending.framesSinceSend += 1;
      if (frameReflects(this.pending.cmd, frame)) {
        this.addFeed(frame.t, `${this.pending.cmd} confirmed after ` +
          `${this.pending.framesSinceSend} frame(s)`);
        this.pending = null;
      }
    }
  }

  markPending(cmd: CommandKind, now: number): void {
    this.pending = { cmd, sentAt: now, framesSinceSend: 0 };
  }

  clearPending(): void {
    this.pending = null;
  }

  addFeed(t: number, text: string): void {
    this.feed.push({ t, text });
    if (this.feed.length > 400) {
      this.feed.splice(0, this.feed.length - 400);
    }
  }

  latest(): StateFrame | null {
    return this.frames.length ? this.frames[this.frames.length - 1] : null;
  }

  private estimateCadence(): number | null {
    const n = this.frames.length;
    if (n < 2) return null;
    return (this.frames[n - 1].t - this.frames[0].t) / (n - 1);
  }

  column(key: keyof StateFrame): number[] {
    return this.frames.map((f) => f[key] as number);
  }

  // reservoir gauge pressure relative to the outer chamber
  superpressure(): number[] {
    return this.frames.map((f) => f.p_sp - f.p_zp);
  }

  // contiguous actuator-on runs become chart shading (vent green, pump red,
  // mirroring the flight-report convention)
  shading(): ShadeInterval[] {
    const out: ShadeInterval[] = [];
    let vent: ShadeInterval | null = null;
    let pump: ShadeInterval | null = null;
    for (const f of this.frames) {
      if (f.vent && !vent) {
        vent = { kind: "vent", t0: f.t, t1: f.t, open: true };
        out.push(vent);
      } else if (f.vent && vent) {
        vent.t1 = f.t;
      } else if (!f.vent && vent) {
        vent.open = false;
        vent = null;
      }
      if (f.pump && !pump) {
        pump = { kind: "pump", t0: f.t, t1: f.t, open: true };
        out.push(pump);
      } else if (f.pump && pump) {
        pump.t1 = f.t;
      } else if (!f.pump && pump) {
        pump.open = false;
        pump = null;
      }
    }
    return out;
  }
}
