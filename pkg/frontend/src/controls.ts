/* Control widgets: sliders, selects, and toggles rendered by the compiler.
 *
 * The runtime only wires behavior onto the server-rendered inputs. Slider
 * values snap to the declared step so every reachable value has a
 * pre-rendered image; a widget whose whole domain is missing from the
 * asset map is disabled with a tooltip naming the missing configuration.
 */
import { AssetIndex, describeParams } from "./encode";
import type {
  ControlSpec,
  ParamMap,
  ParamValue,
  RangeDomain,
  RuntimeManifest,
} from "./manifest";

const DOMAIN_CAP = 1000;

function decimalsOf(value: number): number {
  const text = String(value);
  const dot = text.indexOf(".");
  if (dot < 0) {
    const exp = text.indexOf("e-");
    return exp < 0 ? 0 : Number(text.slice(exp + 2));
  }
  return text.length - dot - 1;
}

function places(domain: RangeDomain): number {
  return Math.max(decimalsOf(domain.min), decimalsOf(domain.step));
}

/** Snap a raw slider value to the nearest step, clamped to the range. */
export function quantize(raw: number, domain: RangeDomain): number {
  if (!(domain.step > 0)) return raw;
  const steps = Math.round((raw - domain.min) / domain.step);
  let value = Number((domain.min + steps * domain.step).toFixed(places(domain)));
  if (value < domain.min) value = domain.min;
  if (value > domain.max) value = domain.max;
  return value;
}

/** Every value a control can take, in domain order. */
export function domainValues(spec: ControlSpec): ParamValue[] {
  const domain = spec.domain;
  if (domain.kind === "toggle") return [false, true];
  if (domain.kind === "choice") return [...domain.values];
  const values: ParamValue[] = [];
  for (let i = 0; i <= DOMAIN_CAP; i++) {
    const value = Number((domain.min + i * domain.step).toFixed(places(domain)));
    if (value > domain.max) break;
    values.push(value);
  }
  return values;
}

function canonicalText(value: ParamValue): string {
  if (typeof value === "boolean") return value ? "true" : "false";
  return String(value);
}

function widgetValue(
  input: HTMLInputElement | HTMLSelectElement,
  spec: ControlSpec
): ParamValue {
  if (spec.domain.kind === "toggle") {
    return (input as HTMLInputElement).checked;
  }
  if (spec.domain.kind === "range") {
    return quantize(Number(input.value), spec.domain);
  }
  // selects carry canonical strings; map back to the typed domain value
  for (const value of spec.domain.values) {
    if (canonicalText(value) === input.value) return value;
  }
  return input.value;
}

export type ControlApply = (
  sceneId: number,
  stageId: number,
  patch: ParamMap
) => void;

/** Attach input handlers to every compiler-rendered control group under root. */
export function wireControls(
  root: ParentNode,
  manifest: RuntimeManifest,
  apply: ControlApply
): void {
  for (const group of root.querySelectorAll<HTMLElement>(".control-group")) {
    const sceneId = Number(group.getAttribute("data-scene"));
    const stageId = Number(group.getAttribute("data-stage"));
    const stage = manifest.scenes[sceneId]?.stages[stageId];
    if (!stage) continue;
    const inputs = group.querySelectorAll<HTMLInputElement>("[data-param]");
    for (const input of inputs) {
      const name = input.getAttribute("data-param")!;
      const spec = stage.controls[name];
      if (!spec) continue;
      input.addEventListener("input", () => {
        apply(sceneId, stageId, { [name]: widgetValue(input, spec) });
      });
    }
  }
}

/**
 * Disable widgets with no reachable pre-rendered image.
 *
 * `base` is the configuration the widget would vary: a widget stays enabled
 * if at least one value in its domain resolves to a known asset.
 */
export function refreshAvailability(
  group: HTMLElement,
  manifest: RuntimeManifest,
  base: ParamMap,
  assets: AssetIndex | null
): void {
  if (!assets) return; // client components render any configuration
  const sceneId = Number(group.getAttribute("data-scene"));
  const stageId = Number(group.getAttribute("data-stage"));
  const stage = manifest.scenes[sceneId]?.stages[stageId];
  if (!stage) return;
  for (const input of group.querySelectorAll<HTMLInputElement>("[data-param]")) {
    const name = input.getAttribute("data-param")!;
    const spec = stage.controls[name];
    if (!spec) continue;
    const reachable = domainValues(spec).some((value) =>
      assets.has({ ...base, [name]: value })
    );
    input.disabled = !reachable;
    if (!reachable) {
      const rest = { ...base };
      delete rest[name];
      const where = Object.keys(rest).length
        ? ` with ${describeParams(rest)}`
        : "";
      input.title = `no image for any ${name}${where}`;
    } else {
      input.removeAttribute("title");
    }
  }
}

/** Reflect externally-applied params back into a group's widgets. */
export function syncWidgets(
  group: HTMLElement,
  manifest: RuntimeManifest,
  params: ParamMap
): void {
  const sceneId = Number(group.getAttribute("data-scene"));
  const stageId = Number(group.getAttribute("data-stage"));
  const stage = manifest.scenes[sceneId]?.stages[stageId];
  if (!stage) return;
  for (const input of group.querySelectorAll<HTMLInputElement>("[data-param]")) {
    const name = input.getAttribute("data-param")!;
    if (!(name in params) || !(name in stage.controls)) continue;
    const value = params[name];
    if (typeof value === "boolean") {
      input.checked = value;
    } else {
      input.value = canonicalText(value);
    }
  }
}
