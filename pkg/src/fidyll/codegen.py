"""Target-specific document IR built from one filter-resolved narrative."""
from __future__ import annotations

from dataclasses import dataclass, field

from .assets import encode_filename
from .collect import DEFAULT_COLUMNS, ConfigSet, sample_animation
from .diagnostics import Diagnostics
from .metrics import first_sentence
from .model import (
    CLIENT_COMPONENT,
    SERVER_SCRIPT,
    Animation,
    ChoiceDomain,
    Configuration,
    Control,
    Format,
    Narrative,
    RangeDomain,
    Scene,
    Stage,
    ToggleDomain,
)
from .scalars import Scalar, canonical_string, params_key
from .text import TextBlock

TEXT_COLUMN = "textColumn"
FIXED_GRAPHIC = "fixedGraphic"
INLINE_GRAPHIC = "inlineGraphic"
CONTROL_GROUP = "controlGroup"
SLIDE = "slide"
APPENDIX_FIGURE = "appendixFigure"
FRAME_GRID = "frameGrid"

SCHEMA_VERSION = 1
DEFAULT_WPM = 160


@dataclass
class IRNode:
    kind: str
    scene_id: int | None
    stage_id: int | None
    payload: dict


@dataclass
class DocumentIR:
    target: Format
    sections: list[IRNode] = field(default_factory=list)
    runtime_manifest: dict = field(default_factory=dict)


def stage_dom_id(scene_id: int, stage_id: int) -> str:
    return f"scene-{scene_id}-stage-{stage_id}"


def asset_name(scene: Scene, params: dict[str, Scalar]) -> str | None:
    if scene.graphic.kind != SERVER_SCRIPT:
        return None
    return encode_filename(scene.graphic.name, params)


def control_json(control: Control) -> dict:
    domain = control.domain
    if isinstance(domain, RangeDomain):
        spec = {
            "kind": "range",
            "min": domain.min,
            "max": domain.max,
            "step": domain.step,
        }
    elif isinstance(domain, ChoiceDomain):
        spec = {"kind": "choice", "values": list(domain.values)}
    else:
        spec = {"kind": "toggle"}
    return {"widget": control.widget, "domain": spec}


def animation_json(anim: Animation) -> dict:
    return {
        "start": anim.start,
        "end": anim.end,
        "durationMs": anim.duration_ms,
        "loopcount": anim.loopcount,
        "frames": anim.frames,
        "columns": anim.columns,
    }


def _scene_assets(scene: Scene, config_set: ConfigSet | None) -> dict[str, str]:
    if scene.graphic.kind != SERVER_SCRIPT or config_set is None:
        return {}
    names: dict[str, str] = {}
    for config in config_set.scenes.get(scene.source_index, []):
        name = encode_filename(scene.graphic.name, config.as_dict())
        names[name] = f"assets/{name}"
    return names


def build_runtime_manifest(
    narrative: Narrative,
    target: Format,
    config_set: ConfigSet | None,
    default_frames: int = 4,
) -> dict:
    scenes = []
    for i, scene in enumerate(narrative.scenes):
        stages = []
        for j, stage in enumerate(scene.stages):
            stages.append(
                {
                    "id": j,
                    "domId": stage_dom_id(i, j),
                    "params": dict(stage.parameters),
                    "text": stage.plain_text(),
                    "summary": stage.summary,
                    "animations": {
                        name: animation_json(anim)
                        for name, anim in sorted(stage.animations.items())
                    },
                    "controls": {
                        name: control_json(control)
                        for name, control in sorted(stage.controls.items())
                    },
                }
            )
        scenes.append(
            {
                "id": i,
                "sourceIndex": scene.source_index,
                "graphic": {"kind": scene.graphic.kind, "name": scene.graphic.name},
                "width": scene.width,
                "height": scene.height,
                "parameterSpace": list(scene.parameter_space),
                "assets": _scene_assets(scene, config_set),
                "stages": stages,
            }
        )
    return {
        "schemaVersion": SCHEMA_VERSION,
        "target": target.value,
        "title": narrative.metadata.title,
        "subtitle": narrative.metadata.subtitle,
        "authors": list(narrative.metadata.authors),
        # animations with frames: null sample this many values at build time;
        # the runtime needs the same count to reconstruct asset names
        "defaultFrames": default_frames,
        "scenes": scenes,
    }


def generate_target(
    narrative: Narrative,
    target: Format,
    assets=None,
    *,
    config_set: ConfigSet | None = None,
    default_frames: int = 4,
    diagnostics: Diagnostics | None = None,
) -> DocumentIR:
    """Transform a narrative (already filter-resolved for `target`) into IR."""
    ir = DocumentIR(target=target)
    ir.runtime_manifest = build_runtime_manifest(
        narrative, target, config_set, default_frames
    )
    if target == Format.SCROLLER:
        _scroller_sections(ir, narrative)
    elif target == Format.STEPPER:
        _slide_sections(ir, narrative, slide_text=_stepper_text)
    elif target == Format.VIDEO:
        _slide_sections(ir, narrative, slide_text=_video_text)
    elif target == Format.LOWMOTION:
        _column_sections(
            ir, narrative, default_frames, with_controls=True, diagnostics=diagnostics
        )
    elif target == Format.PRINT:
        _column_sections(
            ir, narrative, default_frames, with_controls=False, diagnostics=diagnostics
        )
        _appendix_sections(ir, narrative, config_set, default_frames, diagnostics)
    return ir


def _scroller_sections(ir: DocumentIR, narrative: Narrative) -> None:
    for i, scene in enumerate(narrative.scenes):
        ir.sections.append(
            IRNode(
                kind=FIXED_GRAPHIC,
                scene_id=i,
                stage_id=None,
                payload={
                    "graphic": scene.graphic,
                    "initialParams": dict(scene.stages[0].parameters),
                    "asset": asset_name(scene, scene.stages[0].parameters),
                    "width": scene.width,
                    "height": scene.height,
                },
            )
        )
        for j, stage in enumerate(scene.stages):
            ir.sections.append(
                IRNode(
                    kind=TEXT_COLUMN,
                    scene_id=i,
                    stage_id=j,
                    payload={
                        "domId": stage_dom_id(i, j),
                        "text": list(stage.text),
                        "params": dict(stage.parameters),
                        "animations": dict(stage.animations),
                    },
                )
            )
            if stage.controls:
                ir.sections.append(
                    IRNode(
                        kind=CONTROL_GROUP,
                        scene_id=i,
                        stage_id=j,
                        payload={"controls": dict(stage.controls)},
                    )
                )


def _stepper_text(stage: Stage) -> str:
    if stage.summary:
        return stage.summary
    return first_sentence(stage.plain_text())


def _video_text(stage: Stage) -> str:
    return stage.plain_text()


def _slide_sections(ir: DocumentIR, narrative: Narrative, slide_text) -> None:
    for i, scene in enumerate(narrative.scenes):
        for j, stage in enumerate(scene.stages):
            ir.sections.append(
                IRNode(
                    kind=SLIDE,
                    scene_id=i,
                    stage_id=j,
                    payload={
                        "domId": stage_dom_id(i, j),
                        "slideText": slide_text(stage),
                        "text": list(stage.text),
                        "params": dict(stage.parameters),
                        "animations": dict(stage.animations),
                        "controls": dict(stage.controls),
                        "graphic": scene.graphic,
                        "asset": asset_name(scene, stage.parameters),
                        "width": scene.width,
                        "height": scene.height,
                    },
                )
            )


def _animation_frames(
    scene: Scene, stage: Stage, name: str, default_frames: int
) -> list[tuple[str | None, Scalar]]:
    anim = stage.animations[name]
    frames = []
    for sample in sample_animation(anim, default_frames):
        params = dict(stage.parameters)
        params[name] = sample
        frames.append((asset_name(scene, params), params[name]))
    return frames


def _column_sections(
    ir: DocumentIR,
    narrative: Narrative,
    default_frames: int,
    with_controls: bool,
    diagnostics: Diagnostics | None,
) -> None:
    for i, scene in enumerate(narrative.scenes):
        for j, stage in enumerate(scene.stages):
            ir.sections.append(
                IRNode(
                    kind=TEXT_COLUMN,
                    scene_id=i,
                    stage_id=j,
                    payload={
                        "domId": stage_dom_id(i, j),
                        "text": list(stage.text),
                        "params": dict(stage.parameters),
                    },
                )
            )
            ir.sections.append(
                IRNode(
                    kind=INLINE_GRAPHIC,
                    scene_id=i,
                    stage_id=j,
                    payload={
                        "graphic": scene.graphic,
                        "params": dict(stage.parameters),
                        "asset": asset_name(scene, stage.parameters),
                        "fallback": scene.fallback,
                        "width": scene.width,
                        "height": scene.height,
                        "caption": _caption(stage.parameters),
                    },
                )
            )
            for name in sorted(stage.animations):
                anim = stage.animations[name]
                if scene.graphic.kind != SERVER_SCRIPT:
                    continue  # client graphics have no pre-rendered frames
                ir.sections.append(
                    IRNode(
                        kind=FRAME_GRID,
                        scene_id=i,
                        stage_id=j,
                        payload={
                            "parameter": name,
                            "columns": anim.columns or DEFAULT_COLUMNS,
                            "frames": _animation_frames(
                                scene, stage, name, default_frames
                            ),
                        },
                    )
                )
            if with_controls and stage.controls:
                ir.sections.append(
                    IRNode(
                        kind=CONTROL_GROUP,
                        scene_id=i,
                        stage_id=j,
                        payload={"controls": dict(stage.controls)},
                    )
                )


def _caption(params: dict[str, Scalar]) -> str:
    return ", ".join(
        f"{name}={canonical_string(params[name])}" for name in sorted(params)
    )


def print_inline_keys(
    narrative: Narrative, default_frames: int
) -> set[tuple[int, tuple]]:
    """Configurations already shown inline (stage graphics and frame grids)."""
    shown: set[tuple[int, tuple]] = set()
    for scene in narrative.scenes:
        if scene.graphic.kind != SERVER_SCRIPT:
            continue
        for stage in scene.stages:
            shown.add((scene.source_index, params_key(stage.parameters)))
            for name in sorted(stage.animations):
                for sample in sample_animation(stage.animations[name], default_frames):
                    params = dict(stage.parameters)
                    params[name] = sample
                    shown.add((scene.source_index, params_key(params)))
    return shown


def _appendix_sections(
    ir: DocumentIR,
    narrative: Narrative,
    config_set: ConfigSet | None,
    default_frames: int,
    diagnostics: Diagnostics | None,
) -> None:
    if config_set is None:
        return
    shown = print_inline_keys(narrative, default_frames)
    for scene in narrative.scenes:
        configs = config_set.scenes.get(scene.source_index, [])
        if scene.graphic.kind != SERVER_SCRIPT:
            if diagnostics is not None and not scene.fallback:
                diagnostics.warning(
                    f"client graphic {scene.graphic.name!r} has no pre-rendered "
                    "appendix figures; supply fallback: to include one"
                )
            continue
        for config in select_appendix_configs(scene, configs):
            params = config.as_dict()
            key = (config.scene_index, params_key(params))
            if key in shown:
                continue
            shown.add(key)
            ir.sections.append(
                IRNode(
                    kind=APPENDIX_FIGURE,
                    scene_id=config.scene_index,
                    stage_id=None,
                    payload={
                        "graphic": config.graphic,
                        "params": params,
                        "asset": encode_filename(config.graphic.name, params),
                        "caption": _caption(params),
                    },
                )
            )


def select_appendix_configs(
    scene: Scene, configs: list[Configuration]
) -> list[Configuration]:
    """Apply a scene's declared appendix subset, if any."""
    if not scene.appendix:
        return configs
    allowed = {
        name: {params_key({name: v})[0][1] for v in values}
        for name, values in scene.appendix.items()
    }
    kept = []
    for config in configs:
        params = config.as_dict()
        ok = True
        for name, values in allowed.items():
            if params_key({name: params[name]})[0][1] not in values:
                ok = False
                break
        if ok:
            kept.append(config)
    return kept
