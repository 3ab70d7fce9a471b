/* Shared fakes and fixtures for the runtime tests. */
import { JSDOM } from "jsdom";
import type { RuntimeManifest, SceneSpec, StageSpec } from "../src/manifest";
import type { SocketFactory, SocketLike } from "../src/sync";

export function dom(body: string, url = "https://example.test/"): JSDOM {
  return new JSDOM(`<!DOCTYPE html><html><body>${body}</body></html>`, { url });
}

export function stage(partial: Partial<StageSpec> & { id: number }): StageSpec {
  return {
    domId: `scene-0-stage-${partial.id}`,
    params: {},
    text: "",
    summary: null,
    animations: {},
    controls: {},
    ...partial,
  };
}

export function scene(partial: Partial<SceneSpec> & { id: number }): SceneSpec {
  return {
    sourceIndex: partial.id,
    graphic: { kind: "serverScript", name: "chart" },
    width: 320,
    height: 240,
    parameterSpace: [],
    assets: {},
    stages: [],
    ...partial,
  };
}

export function manifest(scenes: SceneSpec[], target = "scroller"): RuntimeManifest {
  return {
    schemaVersion: 1,
    target,
    title: "Test",
    subtitle: "",
    authors: [],
    defaultFrames: 4,
    scenes,
  };
}

/** Scripted stand-in for a WebSocket; the test plays the server. */
export class FakeSocket implements SocketLike {
  sent: string[] = [];
  closedWith: number | null = null;
  onopen: ((event?: unknown) => void) | null = null;
  onmessage: ((event: { data: unknown }) => void) | null = null;
  onclose: ((event: { code?: number }) => void) | null = null;
  onerror: ((event?: unknown) => void) | null = null;

  send(data: string): void {
    this.sent.push(data);
  }

  close(code?: number): void {
    this.closedWith = code ?? 1005;
    this.onclose?.({ code: code ?? 1005 });
  }

  /* server-side actions */
  open(): void {
    this.onopen?.();
  }

  receive(frame: unknown): void {
    this.onmessage?.({ data: JSON.stringify(frame) });
  }

  drop(code = 1006): void {
    this.onclose?.({ code });
  }

  sentFrames(): Array<Record<string, unknown>> {
    return this.sent.map((raw) => JSON.parse(raw));
  }
}

export function socketPool(): { factory: SocketFactory; sockets: FakeSocket[] } {
  const sockets: FakeSocket[] = [];
  return {
    sockets,
    factory: () => {
      const socket = new FakeSocket();
      sockets.push(socket);
      return socket;
    },
  };
}

export function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}
