/* Per-scene parameter store.
 *
 * Each scene owns an isolated ParamMap seeded from its first stage; writes
 * merge a patch and notify only that scene's listeners, so the last writer
 * (stage entry, control input, or sync message) always wins.
 */
import type { ParamMap, RuntimeManifest } from "./manifest";

export type StateListener = (params: ParamMap) => void;

export interface SceneState {
  params: ParamMap;
  activeStage: number;
}

export class StateStore {
  private scenes: SceneState[] = [];
  private listeners: StateListener[][] = [];

  constructor(manifest: RuntimeManifest) {
    for (const scene of manifest.scenes) {
      const first = scene.stages[0];
      this.scenes.push({
        params: first ? { ...first.params } : {},
        activeStage: 0,
      });
      this.listeners.push([]);
    }
  }

  snapshot(sceneId: number): ParamMap {
    return { ...this.scenes[sceneId].params };
  }

  activeStage(sceneId: number): number {
    return this.scenes[sceneId].activeStage;
  }

  setActiveStage(sceneId: number, stageId: number): void {
    this.scenes[sceneId].activeStage = stageId;
  }

  /** Merge a patch into one scene's params and notify its listeners. */
  apply(sceneId: number, patch: ParamMap): ParamMap {
    const scene = this.scenes[sceneId];
    if (!scene) return {};
    Object.assign(scene.params, patch);
    const snapshot = { ...scene.params };
    for (const listener of this.listeners[sceneId]) listener(snapshot);
    return snapshot;
  }

  subscribe(sceneId: number, listener: StateListener): () => void {
    this.listeners[sceneId].push(listener);
    return () => {
      const list = this.listeners[sceneId];
      const at = list.indexOf(listener);
      if (at >= 0) list.splice(at, 1);
    };
  }
}
