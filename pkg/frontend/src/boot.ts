/* Wires the runtime to a compiled page.
 *
 * The target attribute on <body> decides the behavior: scroller pages get
 * the scroll-trigger engine, stepper pages get slide navigation plus the
 * sync client, low-motion pages get per-stage figures with live controls
 * and no animation playback. Print pages load the runtime but only the
 * component registry is installed, so author scripts never crash.
 */
import {
  animateContinuous,
  animateSampled,
  AnimationHandle,
  ensureReplayButton,
  windowTicker,
} from "./animate";
import { refreshAvailability, syncWidgets, wireControls } from "./controls";
import { GraphicFactory, GraphicManager } from "./graphics";
import {
  checkStageElements,
  ManifestError,
  ParamMap,
  readManifest,
  RuntimeManifest,
  StageSpec,
} from "./manifest";
import { watchReload } from "./reload";
import { ScrollEngine, ScrollEngineOptions } from "./scroll";
import { StateStore } from "./state";
import { Stepper } from "./stepper";
import { SocketFactory, SyncClient, SyncRole, SyncStatus } from "./sync";

export interface BootOptions {
  /** socket constructor for sync and reload; tests inject fakes */
  socketFactory?: SocketFactory;
  enableSockets?: boolean;
  reconnectDelayMs?: number;
  /** geometry overrides for environments without layout */
  scroll?: ScrollEngineOptions;
}

export interface Runtime {
  manifest: RuntimeManifest | null;
  store: StateStore | null;
  graphics: GraphicManager | null;
  engine: ScrollEngine | null;
  stepper: Stepper | null;
  sync: SyncClient | null;
  register: (name: string, factory: GraphicFactory) => void;
  stop: () => void;
}

function stageSpec(
  manifest: RuntimeManifest,
  sceneId: number,
  stageId: number
): StageSpec | null {
  const scene = manifest.scenes[sceneId];
  if (!scene) return null;
  return scene.stages.find((stage) => stage.id === stageId) ?? null;
}

export function boot(win: Window, options: BootOptions = {}): Runtime {
  const doc = win.document;
  const target = doc.body?.getAttribute("data-fidyll-target") ?? "";
  const sockets = options.enableSockets ?? true;
  const wsScheme = win.location.protocol === "https:" ? "wss" : "ws";
  const makeSocket: SocketFactory =
    options.socketFactory ??
    ((url) => new (win as any).WebSocket(url));

  const runtime: Runtime = {
    manifest: null,
    store: null,
    graphics: null,
    engine: null,
    stepper: null,
    sync: null,
    register: () => {},
    stop: () => {},
  };
  const cleanups: Array<() => void> = [];
  runtime.stop = () => {
    for (const fn of cleanups.splice(0)) fn();
  };

  // the registry must exist even when there is nothing to drive
  (win as any).fidyll = {
    register: (name: string, factory: GraphicFactory) =>
      runtime.register(name, factory),
  };

  if (sockets && win.location.host) {
    cleanups.push(
      watchReload(win, {
        socketFactory: makeSocket,
        retryDelayMs: options.reconnectDelayMs,
      })
    );
  }

  let manifest: RuntimeManifest;
  try {
    manifest = readManifest(doc);
  } catch (error) {
    if (error instanceof ManifestError) {
      console.warn(`fidyll runtime idle: ${error.message}`);
      return runtime;
    }
    throw error;
  }
  runtime.manifest = manifest;

  const store = new StateStore(manifest);
  const graphics = new GraphicManager(manifest, store);
  runtime.store = store;
  runtime.graphics = graphics;
  runtime.register = (name, factory) => graphics.register(name, factory);

  const animations: AnimationHandle[][] = manifest.scenes.map(() => []);
  const cancelAnimations = (sceneId: number) => {
    for (const handle of animations[sceneId].splice(0)) handle.cancel();
  };
  cleanups.push(() => {
    for (const scene of manifest.scenes) cancelAnimations(scene.id);
  });

  const ticker = windowTicker(win);
  const startAnimations = (sceneId: number, spec: StageSpec) => {
    const sampled = graphics.assetsFor(sceneId) !== null;
    for (const [param, anim] of Object.entries(spec.animations)) {
      const apply = (value: number) => {
        store.apply(sceneId, { [param]: value });
      };
      animations[sceneId].push(
        sampled
          ? animateSampled(anim, manifest.defaultFrames, apply, ticker)
          : animateContinuous(anim, apply, ticker)
      );
    }
  };

  const enterStage = (
    sceneId: number,
    stageId: number,
    stageEl: HTMLElement,
    animate: boolean
  ) => {
    const spec = stageSpec(manifest, sceneId, stageId);
    if (!spec) return;
    cancelAnimations(sceneId);
    store.setActiveStage(sceneId, stageId);
    store.apply(sceneId, { ...spec.params });
    if (animate && Object.keys(spec.animations).length) {
      startAnimations(sceneId, spec);
      ensureReplayButton(stageEl, () => {
        cancelAnimations(sceneId);
        store.apply(sceneId, { ...spec.params });
        startAnimations(sceneId, spec);
      });
    }
    const group = stageEl.querySelector<HTMLElement>(".control-group");
    if (group) {
      refreshAvailability(group, manifest, store.snapshot(sceneId), graphics.assetsFor(sceneId));
    }
  };

  // widgets start disabled-correct before any interaction
  const initAvailability = () => {
    for (const group of doc.querySelectorAll<HTMLElement>(".control-group")) {
      const sceneId = Number(group.getAttribute("data-scene"));
      const stageId = Number(group.getAttribute("data-stage"));
      const spec = stageSpec(manifest, sceneId, stageId);
      if (!spec) continue;
      refreshAvailability(group, manifest, { ...spec.params }, graphics.assetsFor(sceneId));
    }
  };

  if (target === "scroller") {
    checkStageElements(manifest, doc);
    for (const scene of manifest.scenes) {
      const mount = doc.getElementById(`scene-${scene.id}-graphic`);
      if (mount) graphics.attach(scene.id, mount);
    }
    const stages = Array.from(
      doc.querySelectorAll<HTMLElement>(".stage[data-scene][data-stage]")
    );
    const engine = new ScrollEngine(
      stages,
      (_index, el) => {
        enterStage(
          Number(el.getAttribute("data-scene")),
          Number(el.getAttribute("data-stage")),
          el,
          true
        );
      },
      options.scroll
    );
    runtime.engine = engine;
    wireControls(doc, manifest, (sceneId, _stageId, patch) => {
      const snapshot = store.apply(sceneId, patch);
      for (const group of doc.querySelectorAll<HTMLElement>(
        `.control-group[data-scene="${sceneId}"]`
      )) {
        refreshAvailability(group, manifest, snapshot, graphics.assetsFor(sceneId));
      }
    });
    initAvailability();
    engine.attach(win);
    cleanups.push(() => engine.detach());
    return runtime;
  }

  if (target === "stepper") {
    checkStageElements(manifest, doc);
    const role: SyncRole =
      (win as any).FIDYLL_ROLE === "presenter" ? "presenter" : "audience";
    let remote = false;

    const stepper = new Stepper(doc, {
      onActivate: (index, slide, previous) => {
        const sceneId = Number(slide.getAttribute("data-scene"));
        const stageId = Number(slide.getAttribute("data-stage"));
        if (previous) {
          cancelAnimations(Number(previous.getAttribute("data-scene")));
        }
        const mount = slide.querySelector<HTMLElement>(".graphic");
        if (mount) graphics.attach(sceneId, mount);
        enterStage(sceneId, stageId, slide, true);
        if (role === "presenter" && !remote) {
          runtime.sync?.sendSlideChange(index);
        }
      },
    });
    runtime.stepper = stepper;

    wireControls(doc, manifest, (sceneId, _stageId, patch) => {
      const snapshot = store.apply(sceneId, patch);
      const slide = stepper.slideAt(stepper.current);
      const group = slide?.querySelector<HTMLElement>(".control-group");
      if (group && Number(slide!.getAttribute("data-scene")) === sceneId) {
        refreshAvailability(group, manifest, snapshot, graphics.assetsFor(sceneId));
      }
      if (role === "presenter") {
        runtime.sync?.sendStateUpdate(sceneId, snapshot);
      }
    });
    initAvailability();

    if (sockets && win.location.host) {
      const badge = doc.createElement("div");
      badge.className = "sync-status";
      doc.body.appendChild(badge);
      const showStatus = (status: SyncStatus) => {
        badge.setAttribute("data-state", status);
        badge.textContent = status === "closed" ? "" : status;
      };
      runtime.sync = new SyncClient(
        `${wsScheme}://${win.location.host}/sync`,
        role,
        {
          onStatus: showStatus,
          onSlideChange: (slide) => {
            remote = true;
            try {
              stepper.go(slide);
            } finally {
              remote = false;
            }
          },
          onStateUpdate: (sceneId, params) => {
            const snapshot = store.apply(sceneId, params);
            const slide = stepper.slideAt(stepper.current);
            const group = slide?.querySelector<HTMLElement>(".control-group");
            if (group && Number(slide!.getAttribute("data-scene")) === sceneId) {
              syncWidgets(group, manifest, snapshot);
              refreshAvailability(group, manifest, snapshot, graphics.assetsFor(sceneId));
            }
          },
        },
        {
          socketFactory: makeSocket,
          reconnectDelayMs: options.reconnectDelayMs,
        }
      );
      runtime.sync.connect();
      cleanups.push(() => runtime.sync?.close());
    }

    stepper.attach(win);
    return runtime;
  }

  if (target === "lowmotion") {
    // figures are per stage; control edits stay local to their stage
    const overlays = new Map<string, ParamMap>();
    const figureFor = (sceneId: number, stageId: number) =>
      doc.querySelector<HTMLElement>(
        `.inline-graphic[data-scene="${sceneId}"][data-stage="${stageId}"],` +
          ` .component-mount.inline-component[data-scene="${sceneId}"][data-stage="${stageId}"]`
      );
    for (const scene of manifest.scenes) {
      for (const stage of scene.stages) {
        const figure = figureFor(scene.id, stage.id);
        if (figure) graphics.mountInline(scene.id, figure, { ...stage.params });
      }
    }
    wireControls(doc, manifest, (sceneId, stageId, patch) => {
      const spec = stageSpec(manifest, sceneId, stageId);
      const figure = figureFor(sceneId, stageId);
      if (!spec || !figure) return;
      const key = `${sceneId}:${stageId}`;
      const overlay = { ...(overlays.get(key) ?? {}), ...patch };
      overlays.set(key, overlay);
      const params = { ...spec.params, ...overlay };
      graphics.updateInline(sceneId, figure, params);
      const group = doc.querySelector<HTMLElement>(
        `.control-group[data-scene="${sceneId}"][data-stage="${stageId}"]`
      );
      if (group) {
        refreshAvailability(group, manifest, params, graphics.assetsFor(sceneId));
      }
    });
    initAvailability();
    return runtime;
  }

  return runtime;
}
