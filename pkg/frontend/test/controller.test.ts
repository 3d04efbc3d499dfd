import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { SessionController, Transport, TransportFactory } from "../src/controller.js";

class FakeLink implements Transport {
  sent: string[] = [];
  onLine: (line: string) => void;
  onClose: () => void;

  constructor(onLine: (l: string) => void, onOpen: () => void,
              onClose: () => void) {
    this.onLine = onLine;
    this.onClose = onClose;
    queueMicrotask(onOpen);
  }

  send(line: string): void { this.sent.push(line); }
  close(): void { /* the test drives onClose explicitly */ }

  pushState(t: number, over: Record<string, unknown> = {}): void {
    this.onLine(JSON.stringify({
      t, alt: 1700, vz: 0, p_sp: 98000, p_zp: 86000, t_zp: 297, t_sp: 299,
      m_sp: 1.3, m_zp: 6.6, pump: false, vent: false, mode: "slack",
      event: null, ...over,
    }));
  }
}

function harness() {
  const links: FakeLink[] = [];
  const factory: TransportFactory = (_url, onLine, onOpen, onClose) => {
    const link = new FakeLink(onLine, onOpen, onClose);
    links.push(link);
    return link;
  };
  const ctl = new SessionController(factory, { backoffInitialMs: 50 });
  return { ctl, links };
}

describe("SessionController", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("goes live on open and feeds frames to the buffers", async () => {
    const { ctl, links } = harness();
    ctl.connect("fake://");
    await vi.runAllTimersAsync();
    expect(ctl.state).toBe("live");
    links[0].pushState(1);
    links[0].pushState(2);
    expect(ctl.buffers.frames).toHaveLength(2);
  });

  it("surfaces server error frames without dropping the session", async () => {
    const { ctl, links } = harness();
    ctl.connect("fake://");
    await vi.runAllTimersAsync();
    links[0].onLine('{"error":"bad command frame: warp"}');
    expect(ctl.lastError).toContain("bad command frame");
    links[0].pushState(5);
    expect(ctl.state).toBe("live");
    expect(ctl.buffers.frames).toHaveLength(1);
  });

  it("reconnects with backoff and preserves buffers", async () => {
    const { ctl, links } = harness();
    ctl.connect("fake://");
    await vi.runAllTimersAsync();
    links[0].pushState(1);
    links[0].pushState(2);
    links[0].onClose();
    expect(ctl.state).toBe("reconnecting");
    expect(ctl.buffers.frames).toHaveLength(2);     // history survives
    await vi.advanceTimersByTimeAsync(60);
    expect(links).toHaveLength(2);                  // second transport opened
    expect(ctl.state).toBe("live");
    links[1].pushState(0.5);                        // restarted server: gap
    expect(ctl.buffers.frames).toHaveLength(3);
    expect(ctl.buffers.gaps).toHaveLength(1);
  });

  it("refuses to send while not live", () => {
    const { ctl } = harness();
    expect(ctl.send("vent_open")).toBe(false);
    expect(ctl.lastError).toContain("not connected");
  });

  it("marks pending on send and clears on the reflecting frame", async () => {
    const { ctl, links } = harness();
    ctl.connect("fake://");
    await vi.runAllTimersAsync();
    expect(ctl.send("vent_open")).toBe(true);
    expect(links[0].sent).toEqual(['{"cmd":"vent_open"}\n']);
    expect(ctl.buffers.pending?.cmd).toBe("vent_open");
    links[0].pushState(1, { vent: true });
    expect(ctl.buffers.pending).toBeNull();
  });

  it("requires the poppet to be armed first", async () => {
    const { ctl, links } = harness();
    ctl.connect("fake://");
    await vi.runAllTimersAsync();
    expect(ctl.send("poppet_open")).toBe(false);    // guard: nothing sent
    expect(links[0].sent).toHaveLength(0);
    expect(ctl.lastError).toContain("confirmation");
    ctl.armPoppet();
    expect(ctl.send("poppet_open")).toBe(true);
    expect(links[0].sent).toEqual(['{"cmd":"poppet_open"}\n']);
    expect(ctl.poppetArmed).toBe(false);            // one shot per arm
  });

  it("clears pending when the link drops", async () => {
    const { ctl, links } = harness();
    ctl.connect("fake://");
    await vi.runAllTimersAsync();
    ctl.send("pump_on");
    links[0].onClose();
    expect(ctl.buffers.pending).toBeNull();
  });
});
