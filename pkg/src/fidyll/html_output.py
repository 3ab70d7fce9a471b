"""HTML serialization for the scroller, stepper, low-motion, and print targets."""
from __future__ import annotations

import html
import json
import shlex
import shutil
import subprocess
from pathlib import Path

from .assets import AssetError
from .codegen import CONTROL_GROUP, DocumentIR, stage_dom_id
from .model import (
    CLIENT_COMPONENT,
    SERVER_SCRIPT,
    Control,
    ChoiceDomain,
    Format,
    GraphicRef,
    Narrative,
    RangeDomain,
)
from .scalars import canonical_string
from .text import EMPHASIS, LINK, STRONG, TextBlock

STATIC_DIR = Path(__file__).parent / "static"


def render_spans(block: TextBlock) -> str:
    parts = []
    for span in block.spans:
        text = html.escape(span.text, quote=False)
        if span.kind == EMPHASIS:
            parts.append(f"<em>{text}</em>")
        elif span.kind == STRONG:
            parts.append(f"<strong>{text}</strong>")
        elif span.kind == LINK:
            url = html.escape(span.url or "", quote=True)
            parts.append(f'<a href="{url}">{text}</a>')
        else:
            parts.append(text)
    return "".join(parts)


def render_paragraphs(blocks: list[TextBlock], indent: str = "") -> str:
    return "\n".join(f"{indent}<p>{render_spans(block)}</p>" for block in blocks)


def _control_html(control: Control, current) -> str:
    name = html.escape(control.parameter, quote=True)
    domain = control.domain
    if isinstance(domain, RangeDomain):
        value = canonical_string(current) if current is not None else ""
        return (
            f'<label class="control control-slider">{name}'
            f'<input type="range" data-param="{name}"'
            f' min="{canonical_string(domain.min)}"'
            f' max="{canonical_string(domain.max)}"'
            f' step="{canonical_string(domain.step)}"'
            f' value="{value}"></label>'
        )
    if isinstance(domain, ChoiceDomain):
        current_str = canonical_string(current) if current is not None else None
        options = "".join(
            f'<option value="{html.escape(canonical_string(v), quote=True)}"'
            + (" selected" if canonical_string(v) == current_str else "")
            + f">{html.escape(canonical_string(v), quote=False)}</option>"
            for v in domain.values
        )
        return (
            f'<label class="control control-select">{name}'
            f'<select data-param="{name}">{options}</select></label>'
        )
    checked = " checked" if current is True else ""
    return (
        f'<label class="control control-toggle">'
        f'<input type="checkbox" data-param="{name}"{checked}>{name}</label>'
    )


def _control_group_html(
    controls: dict[str, Control],
    scene_id: int,
    stage_id: int,
    params: dict | None = None,
) -> str:
    params = params or {}
    widgets = "".join(
        _control_html(controls[n], params.get(n)) for n in sorted(controls)
    )
    return (
        f'<div class="control-group" data-scene="{scene_id}"'
        f' data-stage="{stage_id}">{widgets}</div>'
    )


def _graphic_mount(
    graphic: GraphicRef,
    scene_id: int,
    asset: str | None,
    width: int,
    height: int,
    *,
    include_id: bool = True,
) -> str:
    id_attr = f' id="scene-{scene_id}-graphic"' if include_id else ""
    if graphic.kind == SERVER_SCRIPT and asset:
        return (
            f'<div class="graphic"{id_attr} data-scene="{scene_id}">'
            f'<img src="assets/{html.escape(asset, quote=True)}"'
            f' width="{width}" height="{height}"'
            f' alt="{html.escape(graphic.name, quote=True)}"></div>'
        )
    return (
        f'<div class="graphic component-mount"{id_attr} data-scene="{scene_id}"'
        f' data-component="{html.escape(graphic.name, quote=True)}"'
        f' data-width="{width}" data-height="{height}"></div>'
    )


def _page(
    title: str,
    target: Format,
    body: str,
    manifest: dict,
    *,
    role: str | None = None,
) -> str:
    manifest_json = json.dumps(manifest, indent=2)
    # </script> inside JSON strings would end the tag early
    manifest_json = manifest_json.replace("</", "<\\/")
    role_tag = (
        f'<script>window.FIDYLL_ROLE = "{role}";</script>\n' if role else ""
    )
    return f"""<!DOCTYPE html>
<html lang="en">
<head>
<meta charset="utf-8">
<meta name="viewport" content="width=device-width, initial-scale=1">
<title>{html.escape(title, quote=False)}</title>
<link rel="stylesheet" href="style.css">
</head>
<body data-fidyll-target="{target.value}">
{body}
<script id="fidyll-manifest" type="application/json">
{manifest_json}
</script>
{role_tag}<script src="runtime.js" defer></script>
</body>
</html>
"""


def _masthead(manifest: dict) -> str:
    parts = [f"<header class=\"masthead\"><h1>{html.escape(manifest['title'], quote=False)}</h1>"]
    if manifest.get("subtitle"):
        parts.append(f"<p class=\"subtitle\">{html.escape(manifest['subtitle'], quote=False)}</p>")
    if manifest.get("authors"):
        authors = html.escape(", ".join(manifest["authors"]), quote=False)
        parts.append(f'<p class="authors">{authors}</p>')
    parts.append("</header>")
    return "\n".join(parts)


def _intro_html(narrative: Narrative) -> str:
    if not narrative.introduction:
        return ""
    return (
        '<section class="introduction">\n'
        + render_paragraphs(narrative.introduction)
        + "\n</section>"
    )


def _conclusion_html(narrative: Narrative) -> str:
    if not narrative.conclusion:
        return ""
    return (
        '<section class="conclusion">\n'
        + render_paragraphs(narrative.conclusion)
        + "\n</section>"
    )


def _scroller_body(ir: DocumentIR, narrative: Narrative) -> str:
    sections = [_masthead(ir.runtime_manifest), _intro_html(narrative)]
    by_scene: dict[int, list] = {}
    for node in ir.sections:
        by_scene.setdefault(node.scene_id, []).append(node)
    for scene_id in sorted(by_scene):
        nodes = by_scene[scene_id]
        fixed = next(n for n in nodes if n.kind == "fixedGraphic")
        graphic_html = _graphic_mount(
            fixed.payload["graphic"],
            scene_id,
            fixed.payload["asset"],
            fixed.payload["width"],
            fixed.payload["height"],
        )
        stage_parts = []
        for node in nodes:
            if node.kind == "textColumn":
                controls = next(
                    (
                        n.payload["controls"]
                        for n in nodes
                        if n.kind == CONTROL_GROUP and n.stage_id == node.stage_id
                    ),
                    None,
                )
                control_html = (
                    _control_group_html(
                        controls, scene_id, node.stage_id, node.payload["params"]
                    )
                    if controls
                    else ""
                )
                stage_parts.append(
                    f'<div class="stage" id="{node.payload["domId"]}"'
                    f' data-scene="{scene_id}" data-stage="{node.stage_id}">\n'
                    f'<div class="stage-text">\n'
                    + render_paragraphs(node.payload["text"])
                    + f"\n</div>{control_html}\n</div>"
                )
        sections.append(
            f'<section class="scene scroller-scene" data-scene="{scene_id}">\n'
            f'<div class="graphic-pane">{graphic_html}</div>\n'
            f'<div class="text-pane">\n' + "\n".join(stage_parts) + "\n</div>\n</section>"
        )
    sections.append(_conclusion_html(narrative))
    return "\n".join(s for s in sections if s)


def _stepper_body(ir: DocumentIR, narrative: Narrative) -> str:
    slides = [n for n in ir.sections if n.kind == "slide"]
    parts = [_masthead(ir.runtime_manifest)]
    parts.append('<main class="stepper">')
    seen_scenes: set[int] = set()
    for position, node in enumerate(slides):
        payload = node.payload
        graphic_html = _graphic_mount(
            payload["graphic"],
            node.scene_id,
            payload["asset"],
            payload["width"],
            payload["height"],
            include_id=node.scene_id not in seen_scenes,
        )
        seen_scenes.add(node.scene_id)
        control_html = (
            _control_group_html(
                payload["controls"], node.scene_id, node.stage_id, payload["params"]
            )
            if payload["controls"]
            else ""
        )
        hidden = "" if position == 0 else " hidden"
        parts.append(
            f'<section class="slide" id="{payload["domId"]}"'
            f' data-scene="{node.scene_id}" data-stage="{node.stage_id}"'
            f' data-slide="{position}"{hidden}>\n'
            f'<p class="slide-text">{render_spans_text(payload["slideText"])}</p>\n'
            f"{graphic_html}\n{control_html}\n</section>"
        )
    parts.append(
        '<nav class="stepper-nav">'
        '<button id="slide-prev" type="button">Previous</button>'
        '<span id="slide-counter"></span>'
        '<button id="slide-next" type="button">Next</button></nav>'
    )
    parts.append("</main>")
    return "\n".join(parts)


def render_spans_text(text: str) -> str:
    return html.escape(text, quote=False)


def _column_body(ir: DocumentIR, narrative: Narrative, target: Format) -> str:
    parts = [_masthead(ir.runtime_manifest), _intro_html(narrative)]
    parts.append(f'<main class="column {target.value}-column">')
    stage_params: dict[tuple[int, int], dict] = {}
    for node in ir.sections:
        payload = node.payload
        if node.kind == "textColumn":
            stage_params[(node.scene_id, node.stage_id)] = payload["params"]
            parts.append(
                f'<div class="stage" id="{payload["domId"]}"'
                f' data-scene="{node.scene_id}" data-stage="{node.stage_id}">\n'
                '<div class="stage-text">\n'
                + render_paragraphs(payload["text"])
                + "\n</div>\n</div>"
            )
        elif node.kind == "inlineGraphic":
            parts.append(_inline_figure(node.scene_id, node.stage_id, payload, target))
        elif node.kind == "frameGrid":
            parts.append(_frame_grid_html(payload))
        elif node.kind == CONTROL_GROUP:
            parts.append(
                _control_group_html(
                    payload["controls"],
                    node.scene_id,
                    node.stage_id,
                    stage_params.get((node.scene_id, node.stage_id)),
                )
            )
    appendix = [n for n in ir.sections if n.kind == "appendixFigure"]
    if appendix:
        parts.append('<section class="appendix"><h2>Appendix</h2>')
        for node in appendix:
            asset = html.escape(node.payload["asset"], quote=True)
            caption = html.escape(node.payload["caption"], quote=False)
            parts.append(
                f'<figure class="appendix-figure" data-scene="{node.scene_id}">'
                f'<img src="assets/{asset}" loading="lazy" alt="{caption}">'
                f"<figcaption>{caption}</figcaption></figure>"
            )
        parts.append("</section>")
    parts.append("</main>")
    parts.append(_conclusion_html(narrative))
    return "\n".join(s for s in parts if s)


def _inline_figure(scene_id: int, stage_id: int, payload: dict, target: Format) -> str:
    graphic = payload["graphic"]
    caption = html.escape(payload["caption"], quote=False)
    if graphic.kind == SERVER_SCRIPT and payload["asset"]:
        asset = html.escape(payload["asset"], quote=True)
        return (
            f'<figure class="inline-graphic" data-scene="{scene_id}"'
            f' data-stage="{stage_id}">'
            f'<img src="assets/{asset}" width="{payload["width"]}"'
            f' height="{payload["height"]}" alt="{caption}">'
            f"<figcaption>{caption}</figcaption></figure>"
        )
    if target == Format.PRINT:
        if payload.get("fallback"):
            fallback = html.escape(payload["fallback"], quote=True)
            return (
                f'<figure class="inline-graphic" data-scene="{scene_id}"'
                f' data-stage="{stage_id}">'
                f'<img src="fallback/{fallback}" alt="{caption}">'
                f"<figcaption>{caption}</figcaption></figure>"
            )
        return (
            f"<!-- interactive graphic {html.escape(graphic.name, quote=False)} "
            f"omitted; no fallback image -->"
        )
    return (
        f'<div class="graphic component-mount inline-component"'
        f' data-scene="{scene_id}" data-stage="{stage_id}"'
        f' data-component="{html.escape(graphic.name, quote=True)}"'
        f' data-width="{payload["width"]}" data-height="{payload["height"]}"></div>'
    )


def _frame_grid_html(payload: dict) -> str:
    columns = payload["columns"]
    cells = []
    for asset, value in payload["frames"]:
        caption = html.escape(canonical_string_value(payload["parameter"], value), quote=False)
        if asset:
            src = html.escape(asset, quote=True)
            cells.append(
                f'<figure class="frame-cell"><img src="assets/{src}" loading="lazy"'
                f' alt="{caption}"><figcaption>{caption}</figcaption></figure>'
            )
    return (
        f'<div class="frame-grid" style="--grid-columns: {columns}"'
        f' data-parameter="{html.escape(payload["parameter"], quote=True)}">'
        + "".join(cells)
        + "</div>"
    )


def canonical_string_value(name: str, value) -> str:
    return f"{name}={canonical_string(value)}"


def _copy_static(out_dir: Path, runtime_path: Path | None) -> None:
    shutil.copyfile(STATIC_DIR / "style.css", out_dir / "style.css")
    source = runtime_path if runtime_path is not None else STATIC_DIR / "runtime.js"
    shutil.copyfile(source, out_dir / "runtime.js")


def _copy_assets(
    ir: DocumentIR, out_dir: Path, assets_dir: Path | None
) -> None:
    names: set[str] = set()
    for scene in ir.runtime_manifest.get("scenes", []):
        names.update(scene.get("assets", {}).keys())
    for node in ir.sections:
        asset = node.payload.get("asset") if isinstance(node.payload, dict) else None
        if asset and not asset.startswith("assets/"):
            names.add(asset)
    if not names:
        return
    if assets_dir is None:
        raise AssetError("document references generated assets but none were built")
    target = out_dir / "assets"
    target.mkdir(parents=True, exist_ok=True)
    for name in sorted(names):
        source = Path(assets_dir) / name
        if not source.exists():
            raise AssetError(f"asset {name} missing from {assets_dir}")
        shutil.copyfile(source, target / name)


def _copy_datasets(narrative: Narrative, out_dir: Path, source_dir: Path) -> None:
    for name in sorted(narrative.metadata.datasets):
        rel = narrative.metadata.datasets[name]
        source = Path(source_dir) / rel
        if not source.exists():
            raise AssetError(f"dataset {name!r} not found at {source}")
        # mirror the project-relative path so in-page references keep working
        destination = out_dir / rel
        destination.parent.mkdir(parents=True, exist_ok=True)
        shutil.copyfile(source, destination)


def _copy_fallbacks(narrative: Narrative, out_dir: Path, source_dir: Path) -> None:
    for scene in narrative.scenes:
        if not scene.fallback or scene.graphic.kind != CLIENT_COMPONENT:
            continue
        source = Path(source_dir) / scene.fallback
        if not source.exists():
            raise AssetError(f"fallback image not found at {source}")
        destination = out_dir / "fallback" / scene.fallback
        destination.parent.mkdir(parents=True, exist_ok=True)
        shutil.copyfile(source, destination)


def serialize_html(
    ir: DocumentIR,
    narrative: Narrative,
    out_dir: Path,
    *,
    assets_dir: Path | None = None,
    source_dir: Path | None = None,
    runtime_path: Path | None = None,
) -> list[Path]:
    """Write index.html plus manifest.json; copy runtime, assets, datasets."""
    if ir.target not in (Format.SCROLLER, Format.STEPPER, Format.LOWMOTION):
        raise ValueError(f"serialize_html cannot render {ir.target.value}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    title = ir.runtime_manifest["title"]

    if ir.target == Format.SCROLLER:
        body = _scroller_body(ir, narrative)
    elif ir.target == Format.STEPPER:
        body = _stepper_body(ir, narrative)
    else:
        body = _column_body(ir, narrative, ir.target)

    written = []
    index = out_dir / "index.html"
    index.write_text(
        _page(title, ir.target, body, ir.runtime_manifest), encoding="utf-8"
    )
    written.append(index)
    if ir.target == Format.STEPPER:
        presenter = out_dir / "presenter.html"
        presenter.write_text(
            _page(title, ir.target, body, ir.runtime_manifest, role="presenter"),
            encoding="utf-8",
        )
        written.append(presenter)

    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(
        json.dumps(ir.runtime_manifest, indent=2) + "\n", encoding="utf-8"
    )
    written.append(manifest_path)

    _copy_static(out_dir, runtime_path)
    _copy_assets(ir, out_dir, assets_dir)
    if source_dir is not None:
        _copy_datasets(narrative, out_dir, source_dir)
    return written


def serialize_print(
    ir: DocumentIR,
    narrative: Narrative,
    out_dir: Path,
    *,
    assets_dir: Path | None = None,
    source_dir: Path | None = None,
    converter_command: str | None = None,
) -> dict:
    """Write print.html; invoke the PDF converter hook when configured."""
    if ir.target != Format.PRINT:
        raise ValueError("serialize_print requires a print document")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    body = _column_body(ir, narrative, Format.PRINT)
    page = _page(ir.runtime_manifest["title"], Format.PRINT, body, ir.runtime_manifest)
    # the print page is static; it does not load the runtime
    page = page.replace('<script src="runtime.js" defer></script>\n', "")
    print_path = out_dir / "print.html"
    print_path.write_text(page, encoding="utf-8")
    shutil.copyfile(STATIC_DIR / "style.css", out_dir / "style.css")
    _copy_assets(ir, out_dir, assets_dir)
    if source_dir is not None:
        _copy_datasets(narrative, out_dir, source_dir)
        _copy_fallbacks(narrative, out_dir, source_dir)

    status: int | None = None
    if converter_command:
        argv = [*shlex.split(converter_command), str(print_path), "-o", str(out_dir / "article.pdf")]
        status = subprocess.run(argv).returncode
    return {"printHtml": print_path, "converterStatus": status}
