/* Asset filename decoding and parameter identity.
 *
 * The compiler names each pre-rendered image `<graphic>__<k>=<v>__....png`
 * with keys sorted and values percent-escaped. Rather than re-encoding
 * (which would have to reproduce the generator's float formatting byte for
 * byte), the runtime decodes every name in the manifest's asset map once
 * and looks images up by a canonical identity of the decoded parameters.
 * Hash-fallback names (`__h=<16 hex>`) carry no parameters and are skipped.
 */
import type { ParamMap, ParamValue, SceneSpec } from "./manifest";

const NUMBER_RE = /^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$/;
const INT_RE = /^[+-]?\d+$/;
const HASH_PAIR_RE = /^h=[0-9a-f]{16}$/;

function decodeToken(token: string): ParamValue {
  if (token === "true") return true;
  if (token === "false") return false;
  if (NUMBER_RE.test(token)) {
    return INT_RE.test(token) ? parseInt(token, 10) : Number(token);
  }
  try {
    return decodeURIComponent(token);
  } catch {
    return token;
  }
}

export interface DecodedName {
  graphic: string;
  params: ParamMap;
}

/** Invert the generator's plain filename encoding; null for hash names. */
export function decodeFilename(name: string): DecodedName | null {
  if (!name.endsWith(".png")) return null;
  const segments = name.slice(0, -".png".length).split("__");
  const graphic = segments[0];
  if (segments.length === 2 && HASH_PAIR_RE.test(segments[1])) return null;
  const raw: Record<string, string> = {};
  let lastKey: string | null = null;
  for (const segment of segments.slice(1)) {
    const eq = segment.indexOf("=");
    if (eq >= 0) {
      lastKey = segment.slice(0, eq);
      raw[lastKey] = segment.slice(eq + 1);
    } else if (lastKey !== null) {
      // a segment without "=" continues the previous percent-decoded value
      raw[lastKey] = `${raw[lastKey]}__${segment}`;
    } else {
      return null;
    }
  }
  const params: ParamMap = {};
  for (const key of Object.keys(raw)) params[key] = decodeToken(raw[key]);
  return { graphic, params };
}

/** Type-tagged identity so true, 1, and "1" stay distinct. */
export function canonicalKey(params: ParamMap): string {
  const entries = Object.keys(params)
    .sort()
    .map((name) => {
      const value = params[name];
      if (typeof value === "boolean") return [name, "b", value ? "true" : "false"];
      if (typeof value === "number") return [name, "n", String(value)];
      return [name, "s", value];
    });
  return JSON.stringify(entries);
}

export function describeParams(params: ParamMap): string {
  return Object.keys(params)
    .sort()
    .map((name) => `${name}=${String(params[name])}`)
    .join(", ");
}

/** Pre-rendered image lookup for one server-script scene. */
export class AssetIndex {
  private byKey = new Map<string, string>();

  constructor(scene: SceneSpec) {
    for (const name of Object.keys(scene.assets)) {
      const decoded = decodeFilename(name);
      if (decoded) this.byKey.set(canonicalKey(decoded.params), scene.assets[name]);
    }
  }

  pathFor(params: ParamMap): string | null {
    return this.byKey.get(canonicalKey(params)) ?? null;
  }

  has(params: ParamMap): boolean {
    return this.byKey.has(canonicalKey(params));
  }

  get size(): number {
    return this.byKey.size;
  }
}
