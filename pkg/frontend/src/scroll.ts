/* Scroll-trigger engine for the scroller layout.
 *
 * A stage activates when its top crosses the midline of the viewport. The
 * switch points sit 5% of the viewport above and below the 50% line (a
 * Schmitt trigger), so small scroll jitter at a boundary cannot flap
 * between stages. Rapid scrolling coalesces: only the final stage under
 * the midline activates, and each activation fires exactly once.
 *
 * Geometry is injectable so the decision rule can be tested without a
 * layout engine.
 */
export interface StageGeometry {
  top: number;
  bottom: number;
}

export interface ScrollEngineOptions {
  threshold?: number;
  hysteresis?: number;
  viewportHeight?: () => number;
  rectFor?: (el: HTMLElement) => StageGeometry;
}

export type ActivateCallback = (index: number, el: HTMLElement) => void;

export class ScrollEngine {
  readonly threshold: number;
  readonly hysteresis: number;
  private viewportHeight: () => number;
  private rectFor: (el: HTMLElement) => StageGeometry;
  private activeIndex = -1;
  private detachFns: Array<() => void> = [];

  constructor(
    private stages: HTMLElement[],
    private onActivate: ActivateCallback,
    options: ScrollEngineOptions = {}
  ) {
    this.threshold = options.threshold ?? 0.5;
    this.hysteresis = options.hysteresis ?? 0.05;
    this.viewportHeight =
      options.viewportHeight ?? (() => window.innerHeight);
    this.rectFor =
      options.rectFor ?? ((el) => el.getBoundingClientRect());
  }

  get active(): number {
    return this.activeIndex;
  }

  /** Last stage whose top sits above `line`; stage 0 when none do. */
  private candidate(line: number): number {
    let found = 0;
    for (let i = 0; i < this.stages.length; i++) {
      if (this.rectFor(this.stages[i]).top <= line) found = i;
    }
    return found;
  }

  evaluate(): void {
    if (this.stages.length === 0) return;
    const vh = this.viewportHeight();
    const mid = vh * this.threshold;
    const band = vh * this.hysteresis;
    let next: number;
    if (this.activeIndex < 0) {
      next = this.candidate(mid);
    } else {
      const forward = this.candidate(mid - band);
      const backward = this.candidate(mid + band);
      if (forward > this.activeIndex) next = forward;
      else if (backward < this.activeIndex) next = backward;
      else return;
    }
    if (next === this.activeIndex) return;
    this.activeIndex = next;
    this.onActivate(next, this.stages[next]);
  }

  attach(win: Window): void {
    const handler = () => this.evaluate();
    win.addEventListener("scroll", handler, { passive: true });
    win.addEventListener("resize", handler);
    this.detachFns.push(() => {
      win.removeEventListener("scroll", handler);
      win.removeEventListener("resize", handler);
    });
    this.evaluate();
  }

  detach(): void {
    for (const fn of this.detachFns) fn();
    this.detachFns = [];
  }
}
