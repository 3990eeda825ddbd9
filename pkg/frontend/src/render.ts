/**
 * DOM rendering: a 2-segment arm schematic with a roll indicator,
 * patch markers whose intensity tracks the held force, and the recall
 * diagnostics (beta, entropy, density) straight off the latest tick.
 * Pure functions of (model, now): no hidden state, no extrapolation.
 */

import { SessionModel } from "./model";

const SVG_NS = "http://www.w3.org/2000/svg";

const BASE_X = 150;
const BASE_Y = 260;
const SEG1 = 100;
const SEG2 = 80;

/** Screen-space offsets for the four wrist patch markers. */
const PATCH_SLOTS: Record<string, [number, number]> = {
  upper: [0, -18],
  under: [0, 18],
  left: [-18, 0],
  right: [18, 0],
};

function slotFor(name: string, index: number): [number, number] {
  for (const key of Object.keys(PATCH_SLOTS)) {
    if (name.includes(key)) return PATCH_SLOTS[key]!;
  }
  const angle = (index * Math.PI) / 2;
  return [18 * Math.cos(angle), 18 * Math.sin(angle)];
}

export interface PanelElements {
  arm: SVGSVGElement;
  status: HTMLElement;
  stale: HTMLElement;
  tickInfo: HTMLElement;
  betaNow: HTMLElement;
  entropy: HTMLElement;
  rho: HTMLElement;
  activePatch: HTMLElement;
  error: HTMLElement;
  overlay: HTMLElement;
}

function el(tag: string, attrs: Record<string, string>): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  return node;
}

/** Redraw the schematic from the latest tick (reference pose if none). */
export function renderArm(svg: SVGSVGElement, model: SessionModel): void {
  svg.replaceChildren();
  const angles = model.lastTick?.angles ?? [0, 0, 0];
  const [lift = 0, flex = 0, roll = 0] = angles;
  const touches = model.lastTick?.touches ?? {};

  // segment 1 rotates about the base by lift; segment 2 adds flex
  const a1 = lift;
  const elbowX = BASE_X + SEG1 * Math.sin(a1);
  const elbowY = BASE_Y - SEG1 * Math.cos(a1);
  const a2 = lift + flex;
  const wristX = elbowX + SEG2 * Math.sin(a2);
  const wristY = elbowY - SEG2 * Math.cos(a2);

  svg.appendChild(el("line", {
    x1: String(BASE_X - 24), y1: String(BASE_Y),
    x2: String(BASE_X + 24), y2: String(BASE_Y),
    class: "ground",
  }));
  svg.appendChild(el("line", {
    x1: String(BASE_X), y1: String(BASE_Y),
    x2: String(elbowX), y2: String(elbowY),
    class: "segment",
  }));
  svg.appendChild(el("line", {
    x1: String(elbowX), y1: String(elbowY),
    x2: String(wristX), y2: String(wristY),
    class: "segment",
  }));
  svg.appendChild(el("circle", {
    cx: String(BASE_X), cy: String(BASE_Y), r: "5", class: "joint",
  }));
  svg.appendChild(el("circle", {
    cx: String(elbowX), cy: String(elbowY), r: "5", class: "joint",
  }));
  svg.appendChild(el("circle", {
    cx: String(wristX), cy: String(wristY), r: "9", class: "wrist",
  }));

  // roll shown as a spoke on the wrist disc
  svg.appendChild(el("line", {
    x1: String(wristX), y1: String(wristY),
    x2: String(wristX + 9 * Math.cos(roll - Math.PI / 2)),
    y2: String(wristY + 9 * Math.sin(roll - Math.PI / 2)),
    class: "roll-spoke",
  }));

  const patchNames = model.welcome ? Object.keys(model.welcome.patches) : [];
  patchNames.forEach((name, i) => {
    const [dx, dy] = slotFor(name, i);
    const held = touches[name];
    const intensity = held === undefined ? 0 : Math.min(1, held / 20);
    const marker = el("circle", {
      cx: String(wristX + dx),
      cy: String(wristY + dy),
      r: "6",
      class: "patch-marker",
      "data-patch": name,
      "fill-opacity": intensity.toFixed(3),
    });
    svg.appendChild(marker);
  });
}

/** Update the text diagnostics and the connection overlays. */
export function renderPanel(els: PanelElements, model: SessionModel, now: number): void {
  els.status.textContent = model.status;
  els.status.dataset.status = model.status;

  const stale = model.isStale(now);
  els.stale.hidden = !stale;

  const tick = model.lastTick;
  els.tickInfo.textContent = tick ? `tick ${tick.tick} t=${tick.t.toFixed(2)}s` : "no ticks yet";
  els.betaNow.textContent = tick ? String(tick.beta) : "-";
  // mirror the latest value verbatim; null means nothing was recalled
  els.entropy.textContent = tick ? (tick.entropy === null ? "null" : String(tick.entropy)) : "-";
  els.rho.textContent = tick ? tick.rho.toFixed(3) : "-";
  els.activePatch.textContent = tick && tick.patch !== "" ? tick.patch : "(none)";

  els.error.textContent = model.lastError ?? "";
  els.error.hidden = model.lastError === null;

  // a dead socket greys the display and surfaces the reconnect control
  els.overlay.hidden = model.status === "open";

  renderArm(els.arm, model);
}
