/* Slide navigation for the stepper target.
 *
 * Owns visibility, the prev/next buttons, arrow keys, the #slide-N hash,
 * and the counter. What happens on slide entry (params, animations) is the
 * caller's business via onActivate, same shape as the scroll engine.
 */

export interface StepperOptions {
  onActivate?: (index: number, slide: HTMLElement, previous: HTMLElement | null) => void;
}

const HASH_RE = /^#slide-(\d+)$/;

export function parseSlideHash(hash: string): number | null {
  const match = HASH_RE.exec(hash);
  if (!match) return null;
  const index = Number(match[1]) - 1; // hash is 1-based
  return Number.isInteger(index) && index >= 0 ? index : null;
}

export class Stepper {
  private slides: HTMLElement[];
  private counter: HTMLElement | null;
  private index = -1;
  private onActivate: StepperOptions["onActivate"];

  constructor(doc: Document, options: StepperOptions = {}) {
    this.slides = Array.from(doc.querySelectorAll<HTMLElement>(".slide[data-slide]"));
    this.counter = doc.getElementById("slide-counter");
    this.onActivate = options.onActivate;
  }

  get length(): number {
    return this.slides.length;
  }

  get current(): number {
    return this.index;
  }

  slideAt(index: number): HTMLElement | null {
    return this.slides[index] ?? null;
  }

  go(raw: number): void {
    if (!this.slides.length) return;
    const index = Math.min(Math.max(raw, 0), this.slides.length - 1);
    if (index === this.index) return;
    const previous = this.slides[this.index] ?? null;
    this.index = index;
    for (let i = 0; i < this.slides.length; i++) {
      if (i === index) {
        this.slides[i].removeAttribute("hidden");
      } else {
        this.slides[i].setAttribute("hidden", "");
      }
    }
    if (this.counter) {
      this.counter.textContent = `${index + 1} / ${this.slides.length}`;
    }
    this.writeHash(index);
    this.onActivate?.(index, this.slides[index], previous);
  }

  next(): void {
    this.go(this.index + 1);
  }

  prev(): void {
    this.go(this.index - 1);
  }

  private writeHash(index: number): void {
    const win = this.slides[index]?.ownerDocument?.defaultView;
    if (!win) return;
    const hash = `#slide-${index + 1}`;
    if (win.location.hash === hash) return;
    if (win.history?.replaceState) {
      win.history.replaceState(null, "", hash);
    } else {
      win.location.hash = hash;
    }
  }

  /** Bind nav buttons, arrow keys, and the location hash; show the first slide. */
  attach(win: Window): void {
    const doc = win.document;
    doc.getElementById("slide-prev")?.addEventListener("click", () => this.prev());
    doc.getElementById("slide-next")?.addEventListener("click", () => this.next());
    doc.addEventListener("keydown", (event) => {
      const target = event.target as HTMLElement | null;
      const tag = target?.tagName;
      if (tag === "INPUT" || tag === "SELECT" || tag === "TEXTAREA") return;
      if (event.key === "ArrowRight") {
        event.preventDefault();
        this.next();
      } else if (event.key === "ArrowLeft") {
        event.preventDefault();
        this.prev();
      }
    });
    win.addEventListener("hashchange", () => {
      const index = parseSlideHash(win.location.hash);
      if (index !== null) this.go(index);
    });
    this.go(parseSlideHash(win.location.hash) ?? 0);
  }
}
