import { describe, expect, it, vi } from "vitest";
import { parseSlideHash, Stepper } from "../src/stepper";
import { dom } from "./helpers";

const SLIDES = `
<main>
  <section class="slide" id="scene-0-stage-0" data-scene="0" data-stage="0" data-slide="0"></section>
  <section class="slide" id="scene-0-stage-1" data-scene="0" data-stage="1" data-slide="1" hidden></section>
  <section class="slide" id="scene-1-stage-0" data-scene="1" data-stage="0" data-slide="2" hidden></section>
</main>
<nav>
  <button id="slide-prev" type="button">Previous</button>
  <span id="slide-counter"></span>
  <button id="slide-next" type="button">Next</button>
</nav>
`;

function rig(url = "https://example.test/") {
  const page = dom(SLIDES, url);
  const win = page.window as unknown as Window;
  const doc = win.document;
  const onActivate = vi.fn();
  const stepper = new Stepper(doc, { onActivate });
  const visible = () =>
    Array.from(doc.querySelectorAll<HTMLElement>(".slide"))
      .filter((el) => !el.hasAttribute("hidden"))
      .map((el) => Number(el.getAttribute("data-slide")));
  return { page, win, doc, stepper, onActivate, visible };
}

describe("parseSlideHash", () => {
  it("reads 1-based slide numbers", () => {
    expect(parseSlideHash("#slide-1")).toBe(0);
    expect(parseSlideHash("#slide-12")).toBe(11);
  });

  it("rejects everything else", () => {
    expect(parseSlideHash("")).toBeNull();
    expect(parseSlideHash("#slide-")).toBeNull();
    expect(parseSlideHash("#slide-0")).toBeNull();
    expect(parseSlideHash("#other")).toBeNull();
  });
});

describe("Stepper", () => {
  it("shows only the first slide after attach", () => {
    const { stepper, win, visible, onActivate } = rig();
    stepper.attach(win);
    expect(visible()).toEqual([0]);
    expect(stepper.current).toBe(0);
    expect(onActivate).toHaveBeenCalledTimes(1);
    const [index, el, previous] = onActivate.mock.calls[0];
    expect(index).toBe(0);
    expect(el.id).toBe("scene-0-stage-0");
    expect(previous).toBeNull();
  });

  it("navigates with the on-screen buttons and updates the counter", () => {
    const { stepper, win, doc, visible } = rig();
    stepper.attach(win);
    (doc.getElementById("slide-next") as HTMLElement).click();
    expect(visible()).toEqual([1]);
    expect(doc.getElementById("slide-counter")!.textContent).toBe("2 / 3");
    (doc.getElementById("slide-prev") as HTMLElement).click();
    expect(visible()).toEqual([0]);
    expect(doc.getElementById("slide-counter")!.textContent).toBe("1 / 3");
  });

  it("hands the previous slide to onActivate", () => {
    const { stepper, win, onActivate } = rig();
    stepper.attach(win);
    stepper.next();
    const [, el, previous] = onActivate.mock.calls[1];
    expect(el.id).toBe("scene-0-stage-1");
    expect(previous.id).toBe("scene-0-stage-0");
  });

  it("clamps at both ends without re-activating", () => {
    const { stepper, win, onActivate } = rig();
    stepper.attach(win);
    stepper.prev();
    expect(stepper.current).toBe(0);
    stepper.go(99);
    expect(stepper.current).toBe(2);
    stepper.next();
    expect(stepper.current).toBe(2);
    expect(onActivate).toHaveBeenCalledTimes(2);
  });

  it("deep links from the URL hash", () => {
    const { stepper, win, visible } = rig("https://example.test/#slide-3");
    stepper.attach(win);
    expect(stepper.current).toBe(2);
    expect(visible()).toEqual([2]);
  });

  it("writes the hash back on navigation", () => {
    const { stepper, win } = rig();
    stepper.attach(win);
    stepper.next();
    expect(win.location.hash).toBe("#slide-2");
  });

  it("follows external hash changes", () => {
    const { stepper, win } = rig();
    stepper.attach(win);
    win.location.hash = "#slide-3";
    win.dispatchEvent(new (win as any).HashChangeEvent("hashchange"));
    expect(stepper.current).toBe(2);
  });

  it("responds to arrow keys except while typing", () => {
    const { stepper, win, doc } = rig();
    stepper.attach(win);
    const key = (target: EventTarget, key: string) =>
      target.dispatchEvent(
        new (win as any).KeyboardEvent("keydown", { key, bubbles: true })
      );
    key(doc, "ArrowRight");
    expect(stepper.current).toBe(1);
    key(doc, "ArrowLeft");
    expect(stepper.current).toBe(0);

    const input = doc.createElement("input");
    doc.querySelector(".slide")!.appendChild(input);
    key(input, "ArrowRight");
    expect(stepper.current).toBe(0);
  });
});
