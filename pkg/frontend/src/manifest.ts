export type ParamValue = boolean | number | string;
export type ParamMap = Record<string, ParamValue>;

export interface RangeDomain {
  kind: "range";
  min: number;
  max: number;
  step: number;
}

export interface ChoiceDomain {
  kind: "choice";
  values: ParamValue[];
}

export interface ToggleDomain {
  kind: "toggle";
}

export type ControlDomain = RangeDomain | ChoiceDomain | ToggleDomain;

export interface ControlSpec {
  widget: "slider" | "select" | "toggle";
  domain: ControlDomain;
}

export interface AnimationSpec {
  start: number;
  end: number;
  durationMs: number;
  loopcount: number | null;
  frames: number | null;
  columns: number | null;
}

export interface StageSpec {
  id: number;
  domId: string;
  params: ParamMap;
  text: string;
  summary: string | null;
  animations: Record<string, AnimationSpec>;
  controls: Record<string, ControlSpec>;
}

export interface SceneSpec {
  id: number;
  sourceIndex: number;
  graphic: { kind: "serverScript" | "clientComponent"; name: string };
  width: number;
  height: number;
  parameterSpace: string[];
  /** encoded asset filename -> relative path, for server-script scenes */
  assets: Record<string, string>;
  stages: StageSpec[];
}

export interface RuntimeManifest {
  schemaVersion: number;
  target: string;
  title: string;
  subtitle: string | null;
  authors: string[];
  defaultFrames: number;
  scenes: SceneSpec[];
}

export const SUPPORTED_SCHEMA = 1;

export class ManifestError extends Error {}

/** Parse the JSON island the compiler inlines into every page. */
export function readManifest(doc: Document): RuntimeManifest {
  const tag = doc.getElementById("fidyll-manifest");
  if (!tag || !tag.textContent) {
    throw new ManifestError("no #fidyll-manifest element in the document");
  }
  return parseManifest(tag.textContent);
}

export function parseManifest(text: string): RuntimeManifest {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch (err) {
    throw new ManifestError(`manifest is not valid JSON: ${err}`);
  }
  const manifest = raw as RuntimeManifest;
  if (manifest.schemaVersion !== SUPPORTED_SCHEMA) {
    throw new ManifestError(
      `manifest schemaVersion ${manifest.schemaVersion} is not supported ` +
        `(expected ${SUPPORTED_SCHEMA})`
    );
  }
  if (!Array.isArray(manifest.scenes)) {
    throw new ManifestError("manifest has no scenes array");
  }
  if (typeof manifest.defaultFrames !== "number") {
    manifest.defaultFrames = 4;
  }
  return manifest;
}

/** Warn about stages whose container is missing; returns the ones found. */
export function checkStageElements(
  manifest: RuntimeManifest,
  doc: Document
): Map<string, HTMLElement> {
  const found = new Map<string, HTMLElement>();
  for (const scene of manifest.scenes) {
    for (const stage of scene.stages) {
      const el = doc.getElementById(stage.domId);
      if (el) {
        found.set(stage.domId, el);
      } else {
        console.warn(`stage element #${stage.domId} missing; stage skipped`);
      }
    }
  }
  return found;
}
