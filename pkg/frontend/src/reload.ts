/* Live-reload wiring for the preview server. */
import type { SocketFactory, SocketLike } from "./sync";

export interface ReloadOptions {
  socketFactory?: SocketFactory;
  retryDelayMs?: number;
  onReload?: () => void;
}

/** Reload the page whenever the preview server announces a new build. */
export function watchReload(win: Window, options: ReloadOptions = {}): () => void {
  const factory: SocketFactory =
    options.socketFactory ?? ((url) => new WebSocket(url) as unknown as SocketLike);
  const retryDelayMs = options.retryDelayMs ?? 2000;
  const trigger = options.onReload ?? (() => win.location.reload());
  let lastBuild: number | null = null;
  let stopped = false;
  let everOpened = false;
  let socket: SocketLike | null = null;
  let timer: ReturnType<typeof setTimeout> | null = null;

  const scheme = win.location.protocol === "https:" ? "wss" : "ws";
  const url = `${scheme}://${win.location.host}/reload`;

  function open(): void {
    if (stopped) return;
    try {
      socket = factory(url);
    } catch {
      // no WebSocket constructor here at all; retrying cannot help
      stopped = true;
      return;
    }
    socket.onmessage = (event) => {
      let message: { kind?: string; buildId?: number };
      try {
        message = JSON.parse(String(event.data));
      } catch {
        return;
      }
      if (message?.kind !== "reload") return;
      const build = message.buildId ?? -1;
      if (build === lastBuild) return;
      lastBuild = build;
      trigger();
    };
    socket.onclose = () => {
      socket = null;
      // a host without /reload is static hosting, not an outage
      if (everOpened) retry();
    };
    socket.onerror = () => {
      /* close handler retries */
    };
    socket.onopen = () => {
      everOpened = true;
    };
  }

  function retry(): void {
    if (stopped || timer !== null) return;
    timer = setTimeout(() => {
      timer = null;
      open();
    }, retryDelayMs);
  }

  open();
  return () => {
    stopped = true;
    if (timer !== null) clearTimeout(timer);
    socket?.close(1000);
    socket = null;
  };
}
