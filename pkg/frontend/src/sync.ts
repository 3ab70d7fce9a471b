/* WebSocket client for presenter/audience sync.
 *
 * Wire protocol: the client opens with {kind: "hello", role}; the server
 * acks with a hello frame, then (for audiences) replays the latest
 * slideChange and stateUpdate. Presenter frames carry a strictly
 * increasing seq; anything stale or malformed is dropped at both ends.
 *
 * The sequence counter survives reconnects: the relay keeps one global
 * high-water mark, so a presenter that restarted from seq 1 would have
 * every frame dropped as stale.
 */
import type { ParamMap } from "./manifest";

export type SyncRole = "presenter" | "audience";

export type SyncStatus =
  | "connecting"
  | "connected"
  | "reconnecting"
  | "rejected"
  | "closed";

export interface SyncHandlers {
  onSlideChange?: (slide: number) => void;
  onStateUpdate?: (sceneId: number, params: ParamMap) => void;
  onStatus?: (status: SyncStatus) => void;
}

/* Structural socket type satisfied by both the browser WebSocket and ws. */
export interface SocketLike {
  send(data: string): void;
  close(code?: number, reason?: string): void;
  onopen: ((event?: unknown) => void) | null;
  onmessage: ((event: { data: unknown }) => void) | null;
  onclose: ((event: { code?: number }) => void) | null;
  onerror: ((event?: unknown) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export interface SyncOptions {
  socketFactory?: SocketFactory;
  reconnectDelayMs?: number;
}

const PRESENTER_TAKEN = 1008;

export class SyncClient {
  private url: string;
  private role: SyncRole;
  private handlers: SyncHandlers;
  private makeSocket: SocketFactory;
  private reconnectDelayMs: number;
  private socket: SocketLike | null = null;
  private seq = 0;
  private lastSeen = 0;
  private stopped = false;
  private rejected = false;
  private started = false;
  private everConnected = false;
  private timer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    url: string,
    role: SyncRole,
    handlers: SyncHandlers = {},
    options: SyncOptions = {}
  ) {
    this.url = url;
    this.role = role;
    this.handlers = handlers;
    this.makeSocket =
      options.socketFactory ?? ((u) => new WebSocket(u) as unknown as SocketLike);
    this.reconnectDelayMs = options.reconnectDelayMs ?? 1000;
  }

  connect(): void {
    if (this.stopped || this.rejected) return;
    if (!this.started) {
      this.started = true;
      this.status("connecting");
    }
    let socket: SocketLike;
    try {
      socket = this.makeSocket(this.url);
    } catch {
      // no WebSocket constructor here at all; retrying cannot help
      this.stopped = true;
      this.status("closed");
      return;
    }
    this.socket = socket;
    socket.onopen = () => {
      socket.send(JSON.stringify({ kind: "hello", role: this.role }));
    };
    socket.onmessage = (event) => this.receive(String(event.data));
    socket.onerror = () => {
      /* the close handler decides what happens next */
    };
    socket.onclose = (event) => {
      if (this.socket !== socket) return;
      this.socket = null;
      if (event?.code === PRESENTER_TAKEN) this.rejected = true;
      if (this.stopped) {
        this.status("closed");
      } else if (this.rejected) {
        this.status("rejected");
      } else if (!this.everConnected) {
        // never established: the endpoint is not there (static hosting)
        this.status("closed");
      } else {
        this.scheduleReconnect();
      }
    };
  }

  close(): void {
    this.stopped = true;
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    const socket = this.socket;
    this.socket = null;
    socket?.close(1000);
    this.status("closed");
  }

  sendSlideChange(slide: number): void {
    this.sendFrame({ kind: "slideChange", seq: ++this.seq, slide });
  }

  sendStateUpdate(sceneId: number, params: ParamMap): void {
    this.sendFrame({ kind: "stateUpdate", seq: ++this.seq, sceneId, params });
  }

  private sendFrame(frame: Record<string, unknown>): void {
    this.socket?.send(JSON.stringify(frame));
  }

  private receive(raw: string): void {
    let message: Record<string, unknown>;
    try {
      message = JSON.parse(raw);
    } catch {
      return;
    }
    if (!message || typeof message !== "object") return;
    const kind = message.kind;
    if (kind === "hello") {
      this.everConnected = true;
      this.status("connected");
      return;
    }
    if (kind === "error") {
      this.rejected = true;
      return;
    }
    const seq = message.seq;
    if (typeof seq !== "number" || seq <= this.lastSeen) return;
    if (kind === "slideChange" && typeof message.slide === "number") {
      this.lastSeen = seq;
      this.handlers.onSlideChange?.(message.slide);
    } else if (
      kind === "stateUpdate" &&
      typeof message.sceneId === "number" &&
      message.params &&
      typeof message.params === "object"
    ) {
      this.lastSeen = seq;
      this.handlers.onStateUpdate?.(message.sceneId, message.params as ParamMap);
    }
  }

  private scheduleReconnect(): void {
    if (this.timer !== null) return;
    this.status("reconnecting");
    this.timer = setTimeout(() => {
      this.timer = null;
      this.connect();
    }, this.reconnectDelayMs);
  }

  private status(value: SyncStatus): void {
    this.handlers.onStatus?.(value);
  }
}
