/* Graphic mounting: pre-rendered image swapping and client components.
 *
 * Server-script scenes swap the <img> source to the pre-rendered asset for
 * the current parameters; an unknown configuration keeps the last good
 * image. Client components register a factory under their manifest name
 * (possibly after the runtime booted) and get created once per container.
 *
 * A scene has one "active" mount fed from the scene's state store (the
 * pinned pane in the scroller, the visible slide in the stepper), plus any
 * number of inline mounts with their own fixed parameters (the per-stage
 * figures of the low-motion column).
 */
import { AssetIndex } from "./encode";
import type { ParamMap, RuntimeManifest, SceneSpec } from "./manifest";
import type { StateStore } from "./state";

export interface GraphicHandle {
  update(params: ParamMap): void;
  resize?(widthPx: number, heightPx: number): void;
}

export type GraphicFactory = (
  container: HTMLElement,
  initialParams: ParamMap
) => GraphicHandle;

interface SceneMount {
  scene: SceneSpec;
  assets: AssetIndex | null;
  active: HTMLElement | null;
  handles: WeakMap<HTMLElement, GraphicHandle>;
  inline: Map<HTMLElement, ParamMap>;
}

export class GraphicManager {
  private factories = new Map<string, GraphicFactory>();
  private mounts: SceneMount[] = [];

  constructor(manifest: RuntimeManifest, private store: StateStore) {
    for (const scene of manifest.scenes) {
      this.mounts.push({
        scene,
        assets: scene.graphic.kind === "serverScript" ? new AssetIndex(scene) : null,
        active: null,
        handles: new WeakMap(),
        inline: new Map(),
      });
      store.subscribe(scene.id, (params) => this.deliver(scene.id, params));
    }
  }

  register(name: string, factory: GraphicFactory): void {
    this.factories.set(name, factory);
    // mounts already on screen were waiting for this component
    for (const mount of this.mounts) {
      if (mount.scene.graphic.name !== name) continue;
      if (mount.active) {
        const params = this.store.snapshot(mount.scene.id);
        this.ensureHandle(mount, mount.active, params)?.update(params);
      }
      for (const [container, params] of mount.inline) {
        this.ensureHandle(mount, container, params)?.update(params);
      }
    }
  }

  assetsFor(sceneId: number): AssetIndex | null {
    return this.mounts[sceneId]?.assets ?? null;
  }

  /** Make `container` the scene's live mount (the visible slide or pane). */
  attach(sceneId: number, container: HTMLElement): void {
    const mount = this.mounts[sceneId];
    if (!mount) return;
    mount.active = container;
    const params = this.store.snapshot(sceneId);
    this.ensureHandle(mount, container, params)?.update(params);
  }

  /** Mount a figure with its own parameters, independent of scene state. */
  mountInline(sceneId: number, container: HTMLElement, params: ParamMap): void {
    const mount = this.mounts[sceneId];
    if (!mount) return;
    mount.inline.set(container, params);
    this.ensureHandle(mount, container, params)?.update(params);
  }

  /** Re-parameterize one inline mount (low-motion control edits). */
  updateInline(sceneId: number, container: HTMLElement, params: ParamMap): void {
    const mount = this.mounts[sceneId];
    if (!mount || !mount.inline.has(container)) return;
    mount.inline.set(container, params);
    mount.handles.get(container)?.update(params);
  }

  private ensureHandle(
    mount: SceneMount,
    container: HTMLElement,
    initialParams: ParamMap
  ): GraphicHandle | null {
    const existing = mount.handles.get(container);
    if (existing) return existing;
    const { scene } = mount;
    let handle: GraphicHandle;
    if (scene.graphic.kind === "serverScript") {
      handle = imageHandle(container, mount.assets!);
    } else {
      const factory = this.factories.get(scene.graphic.name);
      if (!factory) return null; // created later, when the component registers
      handle = factory(container, initialParams);
      handle.resize?.(scene.width, scene.height);
    }
    mount.handles.set(container, handle);
    return handle;
  }

  private deliver(sceneId: number, params: ParamMap): void {
    const mount = this.mounts[sceneId];
    if (!mount || !mount.active) return;
    mount.handles.get(mount.active)?.update(params);
  }
}

function imageHandle(container: HTMLElement, assets: AssetIndex): GraphicHandle {
  return {
    update(params: ParamMap) {
      const img = container.querySelector("img");
      if (!img) return;
      const path = assets.pathFor(params);
      if (path) img.setAttribute("src", path);
    },
  };
}
