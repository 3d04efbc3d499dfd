// Canvas strip charts and the altitude tape. Pure rendering: values are
// drawn exactly as received, and vent/pump intervals shade the altitude
// panel green/red the way the flight reports mark them.

import { SessionBuffers, ShadeInterval } from "./buffers.js";

export interface Series {
  label: string;
  values: number[];
  color: string;
}

function bounds(values: number[][]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const vs of values) {
    for (const v of vs) {
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  if (!isFinite(lo)) return [0, 1];
  if (hi - lo < 1e-9) {
    const pad = Math.max(Math.abs(hi) * 1e-3, 0.5);
    return [lo - pad, hi + pad];
  }
  const pad = 0.08 * (hi - lo);
  return [lo - pad, hi + pad];
}

export function drawStrip(
  canvas: HTMLCanvasElement,
  ts: number[],
  series: Series[],
  shading: ShadeInterval[] = [],
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx || ts.length === 0) return;
  const w = canvas.width;
  const h = canvas.height;
  ctx.clearRect(0, 0, w, h);
  const t0 = ts[0];
  const t1 = ts[ts.length - 1];
  const span = Math.max(t1 - t0, 1e-9);
  const [lo, hi] = bounds(series.map((s) => s.values));
  const x = (t: number) => ((t - t0) / span) * (w - 58) + 50;
  const y = (v: number) => h - 16 - ((v - lo) / (hi - lo)) * (h - 26);

  for (const sh of shading) {
    ctx.fillStyle = sh.kind === "vent"
      ? "rgba(46, 160, 67, 0.18)" : "rgba(248, 81, 73, 0.18)";
    ctx.fillRect(x(sh.t0), 8, Math.max(x(sh.t1) - x(sh.t0), 2), h - 24);
  }

  ctx.strokeStyle = "#33384a";
  ctx.lineWidth = 1;
  ctx.strokeRect(50, 8, w - 58, h - 24);
  ctx.fillStyle = "#8b93a7";
  ctx.font = "10px system-ui";
  ctx.fillText(hi.toPrecision(6), 2, 16);
  ctx.fillText(lo.toPrecision(6), 2, h - 12);
  ctx.fillText(`${(span).toFixed(0)} s window`, w - 90, h - 2);

  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.lineWidth = 1.4;
    ctx.beginPath();
    s.values.forEach((v, i) => {
      const px = x(ts[i]);
      const py = y(v);
      if (i === 0) ctx.moveTo(px, py);
      else ctx.lineTo(px, py);
    });
    ctx.stroke();
  }
  let lx = 56;
  for (const s of series) {
    ctx.fillStyle = s.color;
    ctx.fillText(s.label, lx, 18);
    lx += ctx.measureText(s.label).width + 14;
  }
}

export function drawAltitudeTape(
  canvas: HTMLCanvasElement,
  alt: number | null,
  vz: number | null,
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const w = canvas.width;
  const h = canvas.height;
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#33384a";
  ctx.strokeRect(0.5, 0.5, w - 1, h - 1);
  if (alt === null) return;
  const center = alt;
  const halfSpan = 250;            // meters shown above/below
  const y = (a: number) => h / 2 + ((center - a) / halfSpan) * (h / 2);
  const step = 50;
  const first = Math.ceil((center - halfSpan) / step) * step;
  ctx.font = "10px system-ui";
  for (let a = first; a <= center + halfSpan; a += step) {
    const py = y(a);
    const major = a % 250 === 0;
    ctx.strokeStyle = "#4a5165";
    ctx.beginPath();
    ctx.moveTo(w - (major ? 26 : 14), py);
    ctx.lineTo(w - 4, py);
    ctx.stroke();
    if (major) {
      ctx.fillStyle = "#8b93a7";
      ctx.fillText(String(a), 4, py + 3);
    }
  }
  ctx.fillStyle = "#e8ecf5";
  ctx.font = "bold 13px system-ui";
  ctx.fillText(`${alt.toFixed(1)} m`, 6, h / 2 - 6);
  ctx.font = "11px system-ui";
  ctx.fillStyle = (vz ?? 0) >= 0 ? "#2ea043" : "#f85149";
  ctx.fillText(`${(vz ?? 0) >= 0 ? "▲" : "▼"} ${(vz ?? 0).toFixed(2)} m/s`,
    6, h / 2 + 12);
  ctx.strokeStyle = "#e8ecf5";
  ctx.beginPath();
  ctx.moveTo(0, h / 2);
  ctx.lineTo(w, h / 2);
  ctx.stroke();
}

export function renderAll(
  buffers: SessionBuffers,
  panels: {
    altitude: HTMLCanvasElement;
    superpressure: HTMLCanvasElement;
    temperatures: HTMLCanvasElement;
    masses: HTMLCanvasElement;
    tape: HTMLCanvasElement;
  },
): void {
  const ts = buffers.column("t");
  drawStrip(panels.altitude, ts,
    [{ label: "altitude m", values: buffers.column("alt"), color: "#6cb6ff" }],
    buffers.shading());
  drawStrip(panels.superpressure, ts,
    [{ label: "superpressure Pa", values: buffers.superpressure(),
       color: "#d2a8ff" }]);
  drawStrip(panels.temperatures, ts, [
    { label: "T outer gas K", values: buffers.column("t_zp"), color: "#ffa657" },
    { label: "T reservoir K", values: buffers.column("t_sp"), color: "#ff7b72" },
  ]);
  drawStrip(panels.masses, ts, [
    { label: "m reservoir kg", values: buffers.column("m_sp"), color: "#79c0ff" },
    { label: "m outer kg", values: buffers.column("m_zp"), color: "#56d364" },
  ]);
  const last = buffers.latest();
  drawAltitudeTape(panels.tape, last ? last.alt : null, last ? last.vz : null);
}
