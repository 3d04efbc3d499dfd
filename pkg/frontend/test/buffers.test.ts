import { describe, expect, it } from "vitest";

import { SessionBuffers } from "../src/buffers.js";
import { StateFrame } from "../src/protocol.js";

function frame(t: number, over: Partial<StateFrame> = {}): StateFrame {
  return {
    t, alt: 1700 + t * 0.1, vz: 0.1, p_sp: 98000, p_zp: 86000,
    t_zp: 297, t_sp: 299, m_sp: 1.3, m_zp: 6.6,
    pump: false, vent: false, mode: "slack", event: null, ...over,
  };
}

describe("SessionBuffers", () => {
  it("keeps the rolling window bounded at capacity", () => {
    const b = new SessionBuffers(100);
    for (let k = 0; k < 250; k++) b.push(frame(k));
    expect(b.frames.length).toBe(100);
    expect(b.frames[0].t).toBe(150);
    expect(b.latest()!.t).toBe(249);
  });

  it("default capacity covers two hours at 1 Hz", () => {
    expect(new SessionBuffers().capacity).toBeGreaterThanOrEqual(7200);
  });

  it("stores values verbatim", () => {
    const b = new SessionBuffers();
    b.push(frame(1, { alt: 1712.3456789 }));
    expect(b.column("alt")[0]).toBe(1712.3456789);
    expect(b.superpressure()[0]).toBe(98000 - 86000);
  });

  it("marks a gap when time jumps backwards (server restart)", () => {
    const b = new SessionBuffers();
    for (let k = 0; k < 5; k++) b.push(frame(k));
    b.push(frame(0.5));
    expect(b.gaps).toEqual([0.5]);
    expect(b.feed.some((i) => i.text.includes("gap"))).toBe(true);
  });

  it("marks a gap on a long dropout", () => {
    const b = new SessionBuffers();
    for (let k = 0; k < 10; k++) b.push(frame(k));
    b.push(frame(100));
    expect(b.gaps).toEqual([100]);
  });

  it("builds vent/pump shading intervals from actuator flags", () => {
    const b = new SessionBuffers();
    for (let k = 0; k < 20; k++) {
      b.push(frame(k, { vent: k >= 5 && k < 10, pump: k >= 12 }));
    }
    const sh = b.shading();
    expect(sh).toHaveLength(2);
    expect(sh[0]).toMatchObject({ kind: "vent", t0: 5, t1: 9, open: false });
    expect(sh[1]).toMatchObject({ kind: "pump", t0: 12, t1: 19, open: true });
  });

  it("clears pending on the first frame reflecting the command", () => {
    const b = new SessionBuffers();
    b.push(frame(0));
    b.markPending("vent_open", 1000);
    b.push(frame(1));                       // not yet reflected
    expect(b.pending).not.toBeNull();
    b.push(frame(2, { vent: true }));
    expect(b.pending).toBeNull();
    expect(b.feed.some((i) => i.text.includes("vent_open confirmed after 2")))
      .toBe(true);
  });

  it("collects event feed items from frames", () => {
    const b = new SessionBuffers();
    b.push(frame(3, { event: "mode:fully-inflated" }));
    expect(b.feed[0]).toEqual({ t: 3, text: "mode:fully-inflated" });
  });
});
