/* Animation playback driven by display-refresh callbacks.
 *
 * Client components get a continuous linear interpolation; server-script
 * scenes step through the same sampled values the generator pre-rendered,
 * so every displayed frame has an image. Both repeat loopcount times, rest
 * at the end value, and deliver `end` bit-exactly at the terminus.
 */
import type { AnimationSpec } from "./manifest";

export interface Ticker {
  now(): number;
  request(cb: () => void): number;
  cancel(id: number): void;
}

/** Display-refresh ticker bound to one window. */
export function windowTicker(win: Window): Ticker {
  return {
    now: () => win.performance.now(),
    request: (cb) => win.requestAnimationFrame(() => cb()),
    cancel: (id) => win.cancelAnimationFrame(id),
  };
}

export const frameTicker: Ticker = {
  now: () => performance.now(),
  request: (cb) => requestAnimationFrame(() => cb()),
  cancel: (id) => cancelAnimationFrame(id),
};

export interface AnimationHandle {
  cancel(): void;
}

/** The generator's sampling rule: linspace with exact endpoints. */
export function sampleValues(spec: AnimationSpec, defaultFrames: number): number[] {
  const count = spec.frames ?? defaultFrames;
  if (count <= 1) return [spec.end];
  const out: number[] = [];
  for (let i = 0; i < count; i++) {
    if (i === 0) out.push(spec.start);
    else if (i === count - 1) out.push(spec.end);
    else out.push(spec.start + (i * (spec.end - spec.start)) / (count - 1));
  }
  return out;
}

function run(
  spec: AnimationSpec,
  ticker: Ticker,
  valueAt: (loopElapsed: number) => number,
  apply: (value: number) => void
): AnimationHandle {
  const duration = Math.max(1, spec.durationMs);
  const loops = Math.max(1, spec.loopcount ?? 1);
  const total = duration * loops;
  const started = ticker.now();
  let frame = 0;
  let cancelled = false;
  let lastApplied: number | null = null;

  const tick = () => {
    if (cancelled) return;
    const elapsed = ticker.now() - started;
    if (elapsed >= total) {
      if (lastApplied !== spec.end) apply(spec.end);
      return;
    }
    const value = valueAt(elapsed % duration);
    if (value !== lastApplied) {
      lastApplied = value;
      apply(value);
    }
    frame = ticker.request(tick);
  };
  frame = ticker.request(tick);

  return {
    cancel() {
      cancelled = true;
      ticker.cancel(frame);
    },
  };
}

export function animateContinuous(
  spec: AnimationSpec,
  apply: (value: number) => void,
  ticker: Ticker = frameTicker
): AnimationHandle {
  const duration = Math.max(1, spec.durationMs);
  return run(
    spec,
    ticker,
    (loopElapsed) => spec.start + (spec.end - spec.start) * (loopElapsed / duration),
    apply
  );
}

export function animateSampled(
  spec: AnimationSpec,
  defaultFrames: number,
  apply: (value: number) => void,
  ticker: Ticker = frameTicker
): AnimationHandle {
  const values = sampleValues(spec, defaultFrames);
  const duration = Math.max(1, spec.durationMs);
  return run(
    spec,
    ticker,
    (loopElapsed) => {
      const slot = Math.floor((loopElapsed / duration) * values.length);
      return values[Math.min(values.length - 1, slot)];
    },
    apply
  );
}

/** One replay button per stage container; shown for stages with animations. */
export function ensureReplayButton(
  container: HTMLElement,
  onReplay: () => void
): HTMLButtonElement {
  let button = container.querySelector<HTMLButtonElement>("button.replay-button");
  if (!button) {
    button = container.ownerDocument.createElement("button");
    button.type = "button";
    button.className = "replay-button";
    button.textContent = "Replay";
    container.appendChild(button);
  }
  button.onclick = onReplay;
  return button;
}
