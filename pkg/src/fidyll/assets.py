"""Parameter-encoded asset filenames plus the script invocation pipeline.

Filenames follow `<graphic>__<k>=<v>__....png` with keys sorted and values
rendered canonically. Names that cannot be decoded unambiguously (or that
exceed 200 bytes) switch to `<graphic>__h=<16-hex>.png`, with the mapping
kept in the manifest. Decoding splits on `__`; a segment without `=` is a
continuation of the previous value.
"""
from __future__ import annotations

import hashlib
import json
import math
import os
import re
import shlex
import subprocess
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from pathlib import Path
from urllib.parse import unquote

from .model import Animation, Configuration, GraphicRef
from .scalars import NUMBER_RE, Scalar, canonical_string

GRAPHIC_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_-]*$")
KEY_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_-]*$")
INT_RE = re.compile(r"^[+-]?\d+$")
HASH_PAIRS_RE = re.compile(r"^h=[0-9a-f]{16}$")
SAFE_BYTES = frozenset(
    b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789._-"
)
MAX_PLAIN_BYTES = 200
DEFAULT_TIMEOUT_S = 120.0
MANIFEST_NAME = "manifest.json"


class AssetError(RuntimeError):
    pass


def _encode_string(value: str) -> str:
    out = []
    for byte in value.encode("utf-8"):
        if byte in SAFE_BYTES:
            out.append(chr(byte))
        else:
            out.append(f"%{byte:02X}")
    return "".join(out)


def encode_value(value: Scalar) -> str:
    if isinstance(value, (bool, int, float)):
        return canonical_string(value)
    return _encode_string(value)


def _decode_value(token: str) -> Scalar:
    if token == "true":
        return True
    if token == "false":
        return False
    if NUMBER_RE.match(token):
        return int(token) if INT_RE.match(token) else float(token)
    return unquote(token)


def config_hash(graphic: str, params: dict[str, Scalar]) -> str:
    payload = json.dumps(
        {"graphic": graphic, "params": params},
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def encode_filename(graphic: str, params: dict[str, Scalar]) -> str:
    """Encode one configuration as a PNG filename."""
    if not GRAPHIC_NAME_RE.match(graphic) or "__" in graphic:
        raise ValueError(f"graphic name {graphic!r} cannot appear in filenames")
    for key in params:
        if not KEY_RE.match(key):
            raise ValueError(f"parameter name {key!r} cannot appear in filenames")

    pairs = [f"{key}={encode_value(params[key])}" for key in sorted(params)]
    stem = graphic + "".join(f"__{pair}" for pair in pairs)
    if _must_hash(stem, pairs, params):
        return f"{graphic}__h={config_hash(graphic, params)}.png"
    return f"{stem}.png"


def _must_hash(stem: str, pairs: list[str], params: dict[str, Scalar]) -> bool:
    if len(stem.encode("utf-8")) + len(".png") > MAX_PLAIN_BYTES:
        return True
    # a key containing the separator cannot be recovered by splitting
    if any("__" in key for key in params):
        return True
    # a triple underscore makes value/separator boundaries ambiguous
    if "___" in stem:
        return True
    # string values must not collide with boolean or number lexemes
    for key in sorted(params):
        value = params[key]
        if isinstance(value, str):
            encoded = encode_value(value)
            if encoded in ("true", "false") or NUMBER_RE.match(encoded):
                return True
    # a plain name must never look like a hash fallback name
    if len(pairs) == 1 and HASH_PAIRS_RE.match(pairs[0]):
        return True
    return False


def decode_filename(
    name: str,
    hash_resolver=None,
) -> tuple[str, dict[str, Scalar]]:
    """Invert encode_filename. Hash names need a resolver (the manifest)."""
    if not name.endswith(".png"):
        raise AssetError(f"asset name {name!r} does not end in .png")
    stem = name[: -len(".png")]
    segments = stem.split("__")
    graphic = segments[0]
    if len(segments) == 2 and HASH_PAIRS_RE.match(segments[1]):
        if hash_resolver is None:
            raise AssetError(f"hash-named asset {name!r} needs a manifest to decode")
        resolved = hash_resolver(name)
        if resolved is None:
            raise AssetError(f"hash-named asset {name!r} is not in the manifest")
        return resolved
    params: dict[str, Scalar] = {}
    last_key: str | None = None
    for segment in segments[1:]:
        if "=" in segment:
            key, raw = segment.split("=", 1)
            params[key] = raw
            last_key = key
        else:
            if last_key is None:
                raise AssetError(f"cannot decode asset name {name!r}")
            params[last_key] = f"{params[last_key]}__{segment}"
    return graphic, {key: _decode_value(raw) for key, raw in params.items()}


@dataclass(frozen=True)
class GridCell:
    path: str
    caption: str


@dataclass(frozen=True)
class GridSpec:
    columns: int
    rows: int
    cells: tuple[GridCell, ...]


def frame_grid(
    anim: Animation, assets: list[tuple[str, Scalar]], columns: int
) -> GridSpec:
    """Arrange animation frames row-major; each cell captions its value."""
    columns = max(1, columns)
    rows = max(1, math.ceil(len(assets) / columns))
    cells = tuple(
        GridCell(path=path, caption=canonical_string(value))
        for path, value in assets
    )
    return GridSpec(columns=columns, rows=rows, cells=cells)


class AssetManifest:
    """Keeps one record per generated file, persisted after every render."""

    def __init__(self, out_dir: Path):
        self.out_dir = Path(out_dir)
        self.path = self.out_dir / MANIFEST_NAME
        self.generator: dict = {}
        self.entries: dict[str, dict] = {}
        self._dirty = False
        if self.path.exists():
            data = json.loads(self.path.read_text(encoding="utf-8"))
            self.generator = data.get("generator", {})
            self.entries = data.get("entries", {})

    def resolve_hash(self, name: str) -> tuple[str, dict[str, Scalar]] | None:
        entry = self.entries.get(name)
        if entry is None:
            return None
        return entry["graphic"], dict(entry["params"])

    def valid_entry(self, name: str, cache_key: str) -> bool:
        entry = self.entries.get(name)
        if entry is None or entry.get("cacheKey") != cache_key:
            return False
        file_path = self.out_dir / name
        if not file_path.exists():
            return False
        return _sha256_file(file_path) == entry.get("sha256")

    def record(
        self,
        name: str,
        graphic: str,
        params: dict[str, Scalar],
        width: int,
        height: int,
        cache_key: str,
    ) -> None:
        file_path = self.out_dir / name
        self.entries[name] = {
            "graphic": graphic,
            "params": params,
            "path": f"assets/{name}",
            "width": width,
            "height": height,
            "sha256": _sha256_file(file_path),
            "cacheKey": cache_key,
        }
        self._dirty = True

    def save(self) -> None:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        payload = {
            "generator": self.generator,
            "entries": {name: self.entries[name] for name in sorted(self.entries)},
        }
        text = json.dumps(payload, indent=2, sort_keys=False) + "\n"
        fd, tmp = tempfile.mkstemp(dir=self.out_dir, prefix=".manifest-")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                handle.write(text)
            os.replace(tmp, self.path)
        finally:
            if os.path.exists(tmp):
                os.unlink(tmp)
        self._dirty = False


def _sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _cache_key(graphic: str, params: dict[str, Scalar], width: int, height: int) -> str:
    payload = json.dumps(
        {"graphic": graphic, "params": params, "width": width, "height": height},
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def generate(
    configs: list[Configuration],
    graphic: GraphicRef,
    out_dir: Path,
    *,
    width: int,
    height: int,
    cwd: Path | None = None,
    jobs: int | None = None,
    timeout_s: float = DEFAULT_TIMEOUT_S,
    manifest: AssetManifest | None = None,
) -> AssetManifest:
    """Render every uncached configuration by invoking the graphic script.

    The script receives one JSON object on stdin:
    {"parameters": {...}, "output": "<path>", "width": W, "height": H}
    and must write a PNG to the output path and exit 0.
    """
    if graphic.command is None:
        raise AssetError(f"graphic {graphic.name!r} has no command to run")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if manifest is None:
        manifest = AssetManifest(out_dir)

    todo: list[tuple[str, dict[str, Scalar], str]] = []
    for config in configs:
        params = config.as_dict()
        name = encode_filename(graphic.name, params)
        key = _cache_key(graphic.name, params, width, height)
        if not manifest.valid_entry(name, key):
            todo.append((name, params, key))

    if not todo:
        return manifest

    manifest.generator = {
        "command": graphic.command,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    argv = shlex.split(graphic.command)
    workers = jobs if jobs and jobs > 0 else (os.cpu_count() or 1)

    def render(item: tuple[str, dict[str, Scalar], str]) -> tuple[str, dict, str]:
        name, params, key = item
        output = (out_dir / name).resolve()
        if not str(output).startswith(str(out_dir.resolve()) + os.sep):
            raise AssetError(f"output path {output} escapes the build directory")
        payload = json.dumps(
            {
                "parameters": params,
                "output": str(output),
                "width": width,
                "height": height,
            }
        )
        try:
            proc = subprocess.run(
                argv,
                input=payload.encode("utf-8"),
                cwd=str(cwd) if cwd is not None else None,
                timeout=timeout_s,
                capture_output=True,
            )
        except subprocess.TimeoutExpired:
            raise AssetError(
                f"graphic {graphic.name!r} timed out after {timeout_s:g}s on {name}"
            ) from None
        except FileNotFoundError:
            raise AssetError(
                f"graphic command {argv[0]!r} was not found"
            ) from None
        if proc.returncode != 0:
            detail = proc.stderr.decode("utf-8", "replace").strip()[-400:]
            raise AssetError(
                f"graphic {graphic.name!r} exited {proc.returncode} on {name}"
                + (f": {detail}" if detail else "")
            )
        if not output.exists():
            raise AssetError(
                f"graphic {graphic.name!r} wrote no output for {name}"
            )
        return item

    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(render, item) for item in todo]
        try:
            for future in as_completed(futures):
                name, params, key = future.result()
                manifest.record(name, graphic.name, params, width, height, key)
                manifest.save()
        finally:
            for future in futures:
                future.cancel()
            if manifest._dirty:
                manifest.save()
    return manifest
