// Console entry point: wires the session controller to the chart panels,
// the command buttons (with the poppet arm/confirm step), the connection
// banner, and the event feed.

import { renderAll } from "./charts.js";
import { SessionController, webSocketTransport } from "./controller.js";
import { CommandKind } from "./protocol.js";

const $ = <T extends HTMLElement>(id: string) =>
  document.getElementById(id) as T;

const controller = new SessionController(webSocketTransport);

const panels = {
  altitude: $<HTMLCanvasElement>("chart-alt"),
  superpressure: $<HTMLCanvasElement>("chart-sp"),
  temperatures: $<HTMLCanvasElement>("chart-temp"),
  masses: $<HTMLCanvasElement>("chart-mass"),
  tape: $<HTMLCanvasElement>("alt-tape"),
};

function banner(): void {
  const el = $("banner");
  el.dataset.state = controller.state;
  if (controller.state === "live") {
    el.textContent = "live";
  } else if (controller.state === "reconnecting") {
    el.textContent = `reconnecting... (${controller.lastError || "link lost"})`;
  } else if (controller.state === "connecting") {
    el.textContent = "connecting...";
  } else {
    el.textContent = controller.lastError
      ? `disconnected: ${controller.lastError}` : "disconnected";
  }
}

function readouts(): void {
  const f = controller.buffers.latest();
  $("readout").textContent = f
    ? `t=${f.t.toFixed(0)} s   mode=${f.mode}   pump=${f.pump ? "ON" : "off"}` +
      `   vent=${f.vent ? "OPEN" : "shut"}`
    : "no data";
  const pending = controller.buffers.pending;
  $("pending").textContent = pending ? `pending: ${pending.cmd}` : "";
  for (const kind of ["pump_on", "pump_off", "vent_open", "vent_close"]) {
    const btn = $<HTMLButtonElement>(`btn-${kind}`);
    btn.disabled = controller.state !== "live";
    btn.classList.toggle("pending", pending?.cmd === kind);
  }
  const poppet = $<HTMLButtonElement>("btn-poppet");
  poppet.disabled = controller.state !== "live";
  poppet.textContent = controller.poppetArmed
    ? "CONFIRM TERMINATE" : "terminate (poppet)";
  poppet.classList.toggle("armed", controller.poppetArmed);
  const feed = $("feed");
  feed.innerHTML = controller.buffers.feed.slice(-12).reverse()
    .map((i) => `<div>${i.t.toFixed(0)} s — ${i.text}</div>`).join("");
}

controller.onChange(() => {
  banner();
  readouts();
});

let raf = false;
controller.onChange(() => {
  if (raf) return;
  raf = true;
  requestAnimationFrame(() => {
    raf = false;
    renderAll(controller.buffers, panels);
  });
});

for (const kind of ["pump_on", "pump_off", "vent_open", "vent_close"]) {
  $(`btn-${kind}`).addEventListener("click", () =>
    controller.send(kind as CommandKind));
}
$("btn-poppet").addEventListener("click", () => {
  if (controller.poppetArmed) {
    controller.send("poppet_open");
  } else {
    controller.armPoppet();
    setTimeout(() => controller.disarmPoppet(), 5000);  // arm window
  }
});

$("btn-connect").addEventListener("click", () => {
  const url = $<HTMLInputElement>("url").value;
  controller.close();
  controller.connect(url);
});

const defaultUrl = `ws://${location.hostname || "127.0.0.1"}:8751/session`;
$<HTMLInputElement>("url").value = defaultUrl;
controller.connect(defaultUrl);
banner();
readouts();
