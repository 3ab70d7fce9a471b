"""Development preview and presenter-sync servers.

Both servers build the article into an in-memory file map and serve that,
so a broken rebuild can never corrupt what clients see: the last good
build stays up while diagnostics go to the log.
"""
from __future__ import annotations

import asyncio
import json
import logging
import mimetypes
import tempfile
from contextlib import asynccontextmanager
from dataclasses import dataclass, field, replace
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from starlette.responses import Response

from .build import build
from .config import BuildOptions, CONFIG_FILENAME
from .model import Format

log = logging.getLogger("fidyll.server")

POLL_INTERVAL_S = 0.25
AUDIENCE_QUEUE_LIMIT = 256
SYNC_KINDS = ("stateUpdate", "slideChange")


class BuildFailure(RuntimeError):
    def __init__(self, messages: list[str]) -> None:
        super().__init__("\n".join(messages) or "build failed")
        self.messages = messages


def _load_tree(directory: Path) -> dict[str, bytes]:
    files: dict[str, bytes] = {}
    for path in sorted(directory.rglob("*")):
        if path.is_file():
            files[path.relative_to(directory).as_posix()] = path.read_bytes()
    return files


def build_site(
    options: BuildOptions, fmt: Format, work_dir: Path | None = None
) -> dict[str, bytes]:
    """Build one target and return its files keyed by relative path.

    A persistent work_dir keeps the asset cache warm between rebuilds.
    """
    if work_dir is None:
        with tempfile.TemporaryDirectory(prefix="fidyll-") as tmp:
            return build_site(options, fmt, Path(tmp))
    scoped = replace(options, out_dir=Path(work_dir), targets=(fmt,))
    result = build(scoped)
    if not result.ok:
        raise BuildFailure(result.format_diagnostics(options.input))
    for message in result.format_diagnostics(options.input):
        log.warning("%s", message)
    return _load_tree(result.target_dirs[fmt])


def _serve_from(site: dict[str, bytes], path: str) -> Response:
    name = path.strip("/") or "index.html"
    body = site.get(name)
    if body is None and not Path(name).suffix:
        body = site.get(f"{name}.html")
        name = f"{name}.html"
    if body is None:
        return Response(status_code=404, content=b"not found")
    content_type = mimetypes.guess_type(name)[0] or "application/octet-stream"
    return Response(content=body, media_type=content_type)


def _watched_files(options: BuildOptions) -> list[Path]:
    source_dir = options.input.resolve().parent
    watched = [options.input.resolve(), source_dir / CONFIG_FILENAME]
    return watched


def _mtimes(paths: list[Path]) -> tuple:
    stamps = []
    for path in paths:
        try:
            stamps.append(path.stat().st_mtime_ns)
        except OSError:
            stamps.append(None)
    return tuple(stamps)


def create_preview_app(
    options: BuildOptions,
    fmt: Format,
    *,
    poll_interval: float = POLL_INTERVAL_S,
) -> FastAPI:
    """Serve one target, rebuilding (and telling clients to reload) on edits.

    The initial build must succeed; later failures only log diagnostics.
    """
    work_dir = Path(tempfile.mkdtemp(prefix="fidyll-preview-"))

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        watcher = asyncio.create_task(_watch())
        try:
            yield
        finally:
            watcher.cancel()

    app = FastAPI(lifespan=lifespan)
    app.state.site = build_site(options, fmt, work_dir)
    app.state.build_id = 1
    app.state.sockets = set()

    async def _broadcast_reload() -> None:
        message = json.dumps({"kind": "reload", "buildId": app.state.build_id})
        for socket in list(app.state.sockets):
            try:
                await socket.send_text(message)
            except Exception:
                app.state.sockets.discard(socket)

    async def _watch() -> None:
        previous = _mtimes(_watched_files(options))
        while True:
            await asyncio.sleep(poll_interval)
            current = _mtimes(_watched_files(options))
            if current == previous:
                continue
            previous = current
            try:
                site = await asyncio.to_thread(build_site, options, fmt, work_dir)
            except BuildFailure as failure:
                for message in failure.messages:
                    log.error("%s", message)
                continue
            except Exception:
                log.exception("rebuild failed")
                continue
            app.state.site = site
            app.state.build_id += 1
            await _broadcast_reload()

    @app.websocket("/reload")
    async def reload_socket(socket: WebSocket) -> None:
        await socket.accept()
        app.state.sockets.add(socket)
        try:
            while True:
                await socket.receive_text()
        except WebSocketDisconnect:
            pass
        finally:
            app.state.sockets.discard(socket)

    @app.get("/{path:path}")
    async def serve(path: str) -> Response:
        return _serve_from(app.state.site, path)

    return app


@dataclass
class SyncHub:
    """Single presenter, many audiences, strictly increasing sequence numbers."""

    presenter: WebSocket | None = None
    audiences: dict[WebSocket, asyncio.Queue] = field(default_factory=dict)
    last_seq: int = 0
    latest: dict[str, dict] = field(default_factory=dict)

    def accept_message(self, message: dict) -> bool:
        kind = message.get("kind")
        seq = message.get("seq")
        if kind not in SYNC_KINDS or not isinstance(seq, int):
            log.warning("dropping malformed sync message: %r", message)
            return False
        if seq <= self.last_seq:
            log.warning("dropping stale sync message seq=%s", seq)
            return False
        self.last_seq = seq
        self.latest[kind] = message
        return True

    def replay(self) -> list[dict]:
        return [self.latest[k] for k in ("slideChange", "stateUpdate") if k in self.latest]


def create_present_app(options: BuildOptions) -> FastAPI:
    """Serve the stepper with a WebSocket relay for presenter-driven sync."""
    site = build_site(options, Format.STEPPER)
    app = FastAPI()
    hub = SyncHub()
    app.state.hub = hub

    @app.get("/")
    async def index() -> Response:
        return _serve_from(site, "index.html")

    @app.get("/presenter")
    async def presenter_page() -> Response:
        return _serve_from(site, "presenter.html")

    @app.websocket("/sync")
    async def sync_socket(socket: WebSocket) -> None:
        await socket.accept()
        try:
            hello = await socket.receive_json()
        except (WebSocketDisconnect, json.JSONDecodeError, ValueError):
            await socket.close(code=1003)
            return
        role = hello.get("role") if isinstance(hello, dict) else None
        if role == "presenter":
            await _run_presenter(socket)
        else:
            await _run_audience(socket)

    async def _run_presenter(socket: WebSocket) -> None:
        if hub.presenter is not None:
            await socket.send_json(
                {"kind": "error", "message": "a presenter is already connected"}
            )
            await socket.close(code=1008)
            return
        hub.presenter = socket
        await socket.send_json({"kind": "hello", "role": "presenter"})
        try:
            while True:
                raw = await socket.receive_text()
                try:
                    message = json.loads(raw)
                except json.JSONDecodeError:
                    log.warning("dropping unparseable sync frame")
                    continue
                if not isinstance(message, dict) or not hub.accept_message(message):
                    continue
                await _fan_out(message)
        except WebSocketDisconnect:
            pass
        finally:
            hub.presenter = None

    async def _fan_out(message: dict) -> None:
        overloaded = []
        for socket, queue in hub.audiences.items():
            try:
                queue.put_nowait(message)
            except asyncio.QueueFull:
                overloaded.append(socket)
        for socket in overloaded:
            hub.audiences.pop(socket, None)
            log.warning("disconnecting slow audience consumer")
            try:
                await socket.close(code=1013)
            except Exception:
                pass

    async def _run_audience(socket: WebSocket) -> None:
        queue: asyncio.Queue = asyncio.Queue(maxsize=AUDIENCE_QUEUE_LIMIT)
        hub.audiences[socket] = queue
        await socket.send_json({"kind": "hello", "role": "audience"})
        for message in hub.replay():
            await socket.send_json(message)

        async def _pump() -> None:
            while True:
                message = await queue.get()
                await socket.send_json(message)

        pump = asyncio.create_task(_pump())
        try:
            while True:
                await socket.receive_text()
        except WebSocketDisconnect:
            pass
        finally:
            pump.cancel()
            hub.audiences.pop(socket, None)

    @app.get("/{path:path}")
    async def serve(path: str) -> Response:
        return _serve_from(site, path)

    return app
