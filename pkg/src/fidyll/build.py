"""Build pipeline: parse, normalize, collect, render assets, emit targets."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from . import assets as asset_mod
from .assets import AssetError, AssetManifest
from .codegen import DocumentIR, generate_target
from .collect import CollectError, ConfigSet, collect
from .config import BuildOptions
from .diagnostics import Diagnostic, Diagnostics, ERROR
from .html_output import _copy_assets, serialize_html, serialize_print
from .model import SERVER_SCRIPT, Configuration, Format, Narrative
from .normalize import normalize, resolve_filters
from .parser import parse
from .scalars import params_key
from .source import SourceDocument
from .video_output import emit_storyboard

ASSETS_DIRNAME = "assets"


@dataclass
class BuildResult:
    ok: bool
    diagnostics: Diagnostics
    out_dir: Path | None = None
    target_dirs: dict[Format, Path] = field(default_factory=dict)
    narrative: Narrative | None = None
    config_set: ConfigSet | None = None

    def format_diagnostics(self, path: Path | str) -> list[str]:
        return [d.format(str(path)) for d in self.diagnostics]


def compile_source(
    path: Path | str,
    *,
    max_configs: int,
    diagnostics: Diagnostics,
    default_frames: int = 4,
) -> tuple[Narrative | None, ConfigSet | None]:
    """Parse, normalize, and enumerate configurations for one source file."""
    try:
        source = SourceDocument.from_path(path)
    except OSError as exc:
        diagnostics.error(f"no such file: {exc}", 1)
        return None, None
    result = parse(source)
    diagnostics.extend(result.diagnostics)
    if not result.ok:
        return None, None
    normalized = normalize(result.document)
    diagnostics.extend(normalized.diagnostics)
    if normalized.narrative is None or diagnostics.has_errors:
        return None, None
    try:
        config_set = collect(
            normalized.narrative,
            default_frames=default_frames,
            max_configs=max_configs,
        )
    except CollectError as exc:
        diagnostics.error(str(exc), 1)
        return normalized.narrative, None
    return normalized.narrative, config_set


def _render_groups(
    narrative: Narrative, config_set: ConfigSet
) -> list[tuple[object, int, int, list[Configuration]]]:
    """Group configurations by graphic, deduplicated across scenes."""
    groups: dict[str, tuple[object, int, int, list[Configuration]]] = {}
    seen: dict[str, set] = {}
    for scene in narrative.scenes:
        if scene.graphic.kind != SERVER_SCRIPT:
            continue
        entry = groups.setdefault(
            scene.graphic.name, (scene.graphic, scene.width, scene.height, [])
        )
        keys = seen.setdefault(scene.graphic.name, set())
        for config in config_set.scenes.get(scene.source_index, []):
            key = params_key(config.as_dict())
            if key in keys:
                continue
            keys.add(key)
            entry[3].append(config)
    return [groups[name] for name in sorted(groups)]


def generate_assets(
    narrative: Narrative,
    config_set: ConfigSet,
    out_dir: Path,
    options: BuildOptions,
    diagnostics: Diagnostics,
) -> Path | None:
    """Render every server-script configuration into the shared assets pool."""
    groups = _render_groups(narrative, config_set)
    if not groups:
        return None
    assets_dir = Path(out_dir) / ASSETS_DIRNAME
    manifest = AssetManifest(assets_dir)
    source_dir = options.input.resolve().parent
    for graphic, width, height, configs in groups:
        try:
            asset_mod.generate(
                configs,
                graphic,
                assets_dir,
                width=width,
                height=height,
                cwd=source_dir,
                jobs=options.jobs,
                manifest=manifest,
            )
        except AssetError as exc:
            diagnostics.error(str(exc), 1)
            return None
    return assets_dir


def build(options: BuildOptions) -> BuildResult:
    """Run the full pipeline for every requested target.

    Always attempts every target so one bad format does not hide
    diagnostics from the others; ok is False if any error occurred.
    """
    diagnostics = Diagnostics()
    narrative, config_set = compile_source(
        options.input,
        max_configs=options.max_configs,
        diagnostics=diagnostics,
        default_frames=options.default_frames,
    )
    result = BuildResult(ok=False, diagnostics=diagnostics)
    if narrative is None or config_set is None:
        return result
    result.narrative = narrative
    result.config_set = config_set

    out_dir = Path(options.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    result.out_dir = out_dir
    assets_dir = generate_assets(narrative, config_set, out_dir, options, diagnostics)
    if diagnostics.has_errors:
        return result

    source_dir = options.input.resolve().parent
    for fmt in options.targets:
        resolved = resolve_filters(narrative, fmt, diagnostics)
        if resolved is None:
            continue
        ir = generate_target(
            resolved,
            fmt,
            config_set=config_set,
            default_frames=options.default_frames,
            diagnostics=diagnostics,
        )
        target_dir = out_dir / fmt.value
        try:
            _emit_target(
                ir, resolved, fmt, target_dir, assets_dir, source_dir, options,
                diagnostics,
            )
        except (AssetError, OSError) as exc:
            diagnostics.error(f"{fmt.value}: {exc}", 1)
            continue
        result.target_dirs[fmt] = target_dir

    result.ok = not diagnostics.has_errors and len(result.target_dirs) == len(
        options.targets
    )
    return result


def _emit_target(
    ir: DocumentIR,
    narrative: Narrative,
    fmt: Format,
    target_dir: Path,
    assets_dir: Path | None,
    source_dir: Path,
    options: BuildOptions,
    diagnostics: Diagnostics,
) -> None:
    if fmt in (Format.SCROLLER, Format.STEPPER, Format.LOWMOTION):
        serialize_html(
            ir,
            narrative,
            target_dir,
            assets_dir=assets_dir,
            source_dir=source_dir,
            runtime_path=options.runtime_path,
        )
    elif fmt == Format.PRINT:
        outcome = serialize_print(
            ir,
            narrative,
            target_dir,
            assets_dir=assets_dir,
            source_dir=source_dir,
            converter_command=options.pdf_command,
        )
        status = outcome["converterStatus"]
        if status:
            diagnostics.error(f"print: PDF converter exited {status}", 1)
    else:
        target_dir.mkdir(parents=True, exist_ok=True)
        outcome = emit_storyboard(
            ir,
            target_dir,
            wpm=options.wpm,
            composite_command=options.composite_command,
            narration_command=options.narration_command,
        )
        for hook, status in outcome["hooks"].items():
            if status:
                diagnostics.error(f"video: {hook} hook exited {status}", 1)
        _copy_assets(ir, target_dir, assets_dir)


def error_diagnostic(message: str) -> Diagnostic:
    return Diagnostic(ERROR, message, 1)
