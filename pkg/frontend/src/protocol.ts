// Wire protocol of the live session server: one JSON object per line
// (or per WebSocket text message). State frames carry the physics snapshot;
// error frames report rejected input. Values are rendered exactly as
// received - the console runs no physics and no smoothing.

export type CommandKind =
  | "pump_on"
  | "pump_off"
  | "vent_open"
  | "vent_close"
  | "poppet_open";

export const COMMANDS: CommandKind[] = [
  "pump_on", "pump_off", "vent_open", "vent_close", "poppet_open",
];

export interface StateFrame {
  t: number;
  alt: number;
  vz: number;
  p_sp: number;
  p_zp: number;
  t_zp: number;
  t_sp: number;
  m_sp: number;
  m_zp: number;
  pump: boolean;
  vent: boolean;
  mode: string;
  event: string | null;
}

export interface ErrorFrame {
  error: string;
}

export type ServerFrame =
  | { kind: "state"; state: StateFrame }
  | { kind: "error"; message: string };

const NUMERIC: (keyof StateFrame)[] = [
  "t", "alt", "vz", "p_sp", "p_zp", "t_zp", "t_sp", "m_sp", "m_zp",
];

export function parseFrame(line: string): ServerFrame {
  let obj: Record<string, unknown>;
  try {
    obj = JSON.parse(line);
  } catch {
    return { kind: "error", message: `unparseable frame: ${line.slice(0, 80)}` };
  }
  if (typeof obj !== "object" || obj === null) {
    return { kind: "error", message: "frame is not an object" };
  }
  if (typeof obj.error === "string") {
    return { kind: "error", message: obj.error };
  }
  for (const key of NUMERIC) {
    if (typeof obj[key] !== "number" || !isFinite(obj[key] as number)) {
      return { kind: "error", message: `frame missing numeric field ${key}` };
    }
  }
  if (typeof obj.pump !== "boolean" || typeof obj.vent !== "boolean") {
    return { kind: "error", message: "frame missing actuator flags" };
  }
  const state: StateFrame = {
    t: obj.t as number,
    alt: obj.alt as number,
    vz: obj.vz as number,
    p_sp: obj.p_sp as number,
    p_zp: obj.p_zp as number,
    t_zp: obj.t_zp as number,
    t_sp: obj.t_sp as number,
    m_sp: obj.m_sp as number,
    m_zp: obj.m_zp as number,
    pump: obj.pump as boolean,
    vent: obj.vent as boolean,
    mode: typeof obj.mode === "string" ? obj.mode : "",
    event: typeof obj.event === "string" ? obj.event : null,
  };
  return { kind: "state", state };
}

export function commandLine(cmd: CommandKind): string {
  return JSON.stringify({ cmd }) + "\n";
}

// A command is considered reflected once a frame shows its effect: actuator
// flags for pump/vent, the command event for the one-way poppet.
export function frameReflects(cmd: CommandKind, frame: StateFrame): boolean {
  switch (cmd) {
    case "pump_on": return frame.pump;
    case "pump_off": return !frame.pump;
    case "vent_open": return frame.vent;
    case "vent_close": return !frame.vent;
    case "poppet_open":
      return frame.event !== null && frame.event.includes("poppet_open");
  }
}
