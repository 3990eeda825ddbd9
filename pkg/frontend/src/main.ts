/**
 * Bootstrap: one socket, one model, DOM controls. Everything reacts
 * to socket events and input handlers; the only timer is the stale
 * watchdog, which reads the model and never writes it.
 */

import { SessionModel, STALE_AFTER_MS } from "./model";
import { PanelElements, renderPanel } from "./render";
import { SessionSocket } from "./socket";

const WS_URL = `ws://${location.hostname || "127.0.0.1"}:8787/session`;

function grab<T extends Element>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as unknown as T;
}

const els: PanelElements = {
  arm: grab<SVGSVGElement>("arm"),
  status: grab<HTMLElement>("status"),
  stale: grab<HTMLElement>("stale"),
  tickInfo: grab<HTMLElement>("tick-info"),
  betaNow: grab<HTMLElement>("beta-now"),
  entropy: grab<HTMLElement>("entropy"),
  rho: grab<HTMLElement>("rho"),
  activePatch: grab<HTMLElement>("active-patch"),
  error: grab<HTMLElement>("error"),
  overlay: grab<HTMLElement>("overlay"),
};

const patchesBox = grab<HTMLElement>("patches");
const betaSlider = grab<HTMLInputElement>("beta-slider");
const betaSliderValue = grab<HTMLOutputElement>("beta-slider-value");
const bankPath = grab<HTMLInputElement>("bank-path");
const bankPatch = grab<HTMLSelectElement>("bank-patch");

const model = new SessionModel((text) => socket.send(text));
const socket = new SessionSocket(WS_URL, {
  onOpen() {
    model.onOpen();
    repaint();
  },
  onMessage(msg, now) {
    model.onServerMessage(msg, now);
    if (msg.type === "welcome") buildPatchControls();
    repaint();
  },
  onClose() {
    model.onClose();
    repaint();
  },
  onBadFrame(reason) {
    model.lastError = `bad server frame: ${reason}`;
    repaint();
  },
});

function repaint(): void {
  renderPanel(els, model, Date.now());
}

/** Per-patch press-and-hold button and magnitude slider, plus 1..9 keys. */
function buildPatchControls(): void {
  if (!model.welcome) return;
  patchesBox.replaceChildren();
  bankPatch.replaceChildren();
  const names = Object.keys(model.welcome.patches);

  names.forEach((name, i) => {
    const row = document.createElement("div");
    row.className = "patch-row";

    const button = document.createElement("button");
    const key = i + 1;
    button.textContent = key <= 9 ? `${name} [${key}]` : name;
    button.dataset.patch = name;
    button.dataset.held = "false";

    const hold = () => {
      model.press(name);
      button.dataset.held = "true";
      repaint();
    };
    const letGo = () => {
      model.release(name);
      button.dataset.held = "false";
      repaint();
    };
    button.addEventListener("pointerdown", hold);
    button.addEventListener("pointerup", letGo);
    button.addEventListener("pointerleave", letGo);
    button.addEventListener("pointercancel", letGo);

    const slider = document.createElement("input");
    slider.type = "range";
    slider.min = "0";
    slider.max = "20";
    slider.step = "0.5";
    slider.value = String(model.patches.get(name)?.magnitude ?? 8);
    const value = document.createElement("output");
    value.textContent = `${slider.value} N`;
    slider.addEventListener("input", () => {
      value.textContent = `${slider.value} N`;
      model.setMagnitude(name, Number(slider.value));
      repaint();
    });

    row.append(button, slider, value);
    patchesBox.appendChild(row);

    const option = document.createElement("option");
    option.value = name;
    option.textContent = name;
    bankPatch.appendChild(option);
  });
}

// keyboard hold: digit down presses, digit up releases (bound once;
// the current patch order comes from the latest welcome)
function patchForKey(key: string): string | undefined {
  const names = model.welcome ? Object.keys(model.welcome.patches) : [];
  return names[Number(key) - 1];
}

document.addEventListener("keydown", (ev) => {
  if (ev.repeat) return;
  const name = patchForKey(ev.key);
  if (name !== undefined) {
    model.press(name);
    repaintHeld(name, true);
  }
});
document.addEventListener("keyup", (ev) => {
  const name = patchForKey(ev.key);
  if (name !== undefined) {
    model.release(name);
    repaintHeld(name, false);
  }
});

function repaintHeld(name: string, held: boolean): void {
  const button = patchesBox.querySelector<HTMLButtonElement>(`button[data-patch="${name}"]`);
  if (button) button.dataset.held = String(held);
  repaint();
}

betaSlider.addEventListener("change", () => {
  betaSliderValue.textContent = betaSlider.value;
  model.setBetaSlider(Number(betaSlider.value));
  repaint();
});
betaSlider.addEventListener("input", () => {
  betaSliderValue.textContent = betaSlider.value;
});

grab<HTMLButtonElement>("reset").addEventListener("click", () => {
  model.requestReset();
  repaint();
});

grab<HTMLButtonElement>("load-bank").addEventListener("click", () => {
  if (bankPath.value && bankPatch.value) {
    model.requestLoadBank(bankPatch.value, bankPath.value);
    repaint();
  }
});

grab<HTMLButtonElement>("reconnect").addEventListener("click", () => {
  model.status = "connecting";
  repaint();
  socket.connect();
});

// leaving the page releases held touches and nothing else
window.addEventListener("pagehide", () => {
  model.releaseAll();
});

// the stale watchdog only reads; 100 ms keeps the 500 ms promise
setInterval(repaint, 100);

socket.connect();
repaint();
