"""Raw tree -> normalized narrative: dense stages, resolved animations, widgets."""
from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import PurePosixPath

from .diagnostics import Diagnostic, Diagnostics
from .model import (
    ALL_FORMATS,
    CLIENT_COMPONENT,
    DEFAULT_HEIGHT,
    DEFAULT_WIDTH,
    FORMAT_NAMES,
    NO_FILTER,
    SELECT,
    SERVER_SCRIPT,
    SLIDER,
    TOGGLE,
    Animation,
    ChoiceDomain,
    Control,
    Domain,
    Filter,
    Format,
    GraphicRef,
    Metadata,
    Narrative,
    RangeDomain,
    Scene,
    Stage,
    ToggleDomain,
)
from .parser import ConfigEntry, ConfigTree, RawBlock, RawDocument
from .scalars import Scalar, canonical_number, canonical_value, markup_scalar
from .text import TextBlock, parse_inline_text

GRAPHIC_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_-]*$")

FILTER_KEYS = ("include", "exclude", "only", "skip")
SCENE_KEYS = {
    "graphic",
    "width",
    "height",
    "parameters",
    "controls",
    "animations",
    "summary",
    "appendix",
    "fallback",
    *FILTER_KEYS,
}
STAGE_KEYS = {"parameters", "controls", "animations", "summary", *FILTER_KEYS}
FRONT_MATTER_KEYS = {"title", "subtitle", "authors", "datasets", "targets"}
ANIMATION_KEYS = {"start", "end", "duration", "loopcount", "frames", "columns"}


@dataclass
class NormalizeResult:
    narrative: Narrative | None
    diagnostics: list[Diagnostic]

    @property
    def ok(self) -> bool:
        return self.narrative is not None


def normalize(raw: RawDocument) -> NormalizeResult:
    """Validate the raw tree and densify parameters across stages."""
    diagnostics = Diagnostics()
    metadata = _metadata(raw.front_matter, diagnostics)
    introduction = [
        parse_inline_text(p.text, line=p.span.start_line, diagnostics=diagnostics)
        for p in raw.leading_text
    ]

    scenes: list[Scene] = []
    conclusion: list[TextBlock] = []
    index = 0
    scene_number = 0
    while index < len(raw.blocks):
        block = raw.blocks[index]
        if block.kind == "scene":
            stage_blocks = []
            index += 1
            while index < len(raw.blocks) and raw.blocks[index].kind == "stage":
                stage_blocks.append(raw.blocks[index])
                index += 1
            scene = _scene(block, stage_blocks, scene_number, diagnostics)
            if scene is not None:
                scenes.append(scene)
            scene_number += 1
            continue
        if block.kind == "conclusion":
            if block.config:
                diagnostics.error(
                    "{conclusion} takes no configuration", block.span.start_line
                )
            conclusion = [
                parse_inline_text(
                    p.text, line=p.span.start_line, diagnostics=diagnostics
                )
                for p in block.paragraphs
            ]
            index += 1
            continue
        # parser guarantees stages attach to scenes; anything else is a bug
        diagnostics.error(f"unexpected block {block.kind!r}", block.span.start_line)
        index += 1

    if not scenes and not diagnostics.has_errors:
        diagnostics.error("document has no scenes", 1)

    _check_graphic_consistency(scenes, diagnostics)

    if diagnostics.has_errors:
        return NormalizeResult(None, diagnostics.items)
    narrative = Narrative(
        metadata=metadata,
        introduction=introduction,
        scenes=scenes,
        conclusion=conclusion,
    )
    return NormalizeResult(narrative, diagnostics.items)


def _metadata(front: ConfigTree, diagnostics: Diagnostics) -> Metadata:
    title = ""
    entry = front.get("title")
    if entry is None:
        diagnostics.error("front matter is missing a title", 1)
    elif not isinstance(entry.value, str) or not entry.value:
        diagnostics.error("title must be a non-empty string", entry.line)
    else:
        title = entry.value

    subtitle = None
    entry = front.get("subtitle")
    if entry is not None:
        if isinstance(entry.value, str):
            subtitle = entry.value
        else:
            diagnostics.error("subtitle must be a string", entry.line)

    authors: list[str] = []
    entry = front.get("authors")
    if entry is not None:
        if isinstance(entry.value, str):
            authors = [a.strip() for a in entry.value.split(",") if a.strip()]
        elif isinstance(entry.value, list) and all(
            isinstance(a, str) for a in entry.value
        ):
            authors = list(entry.value)
        else:
            diagnostics.error("authors must be names separated by commas", entry.line)

    datasets: dict[str, str] = {}
    entry = front.get("datasets")
    if entry is not None:
        if isinstance(entry.value, dict):
            for name, child in entry.value.items():
                path = child.value
                if not isinstance(path, str) or not path:
                    diagnostics.error(
                        f"dataset {name!r} must map to a file path", child.line
                    )
                    continue
                if path.startswith("/") or PurePosixPath(path).is_absolute():
                    diagnostics.error(
                        f"dataset path {path!r} must be relative", child.line
                    )
                    continue
                if ".." in PurePosixPath(path).parts:
                    diagnostics.error(
                        f"dataset path {path!r} escapes the project directory",
                        child.line,
                    )
                    continue
                datasets[name] = path
        else:
            diagnostics.error("datasets must be a nested name: path block", entry.line)

    targets: list[Format] | None = None
    entry = front.get("targets")
    if entry is not None:
        names = entry.value if isinstance(entry.value, list) else [entry.value]
        targets = []
        for name in names:
            fmt = _format_name(name, entry.line, diagnostics)
            if fmt is not None:
                targets.append(fmt)

    for key, entry in front.items():
        if key not in FRONT_MATTER_KEYS:
            diagnostics.warning(f"unknown front matter key {key!r}", entry.line)

    return Metadata(
        title=title,
        subtitle=subtitle,
        authors=authors,
        datasets=datasets,
        targets=targets,
    )


def _format_name(name: object, line: int, diagnostics: Diagnostics) -> Format | None:
    if isinstance(name, str) and name in FORMAT_NAMES:
        return Format(name)
    diagnostics.error(
        f"unknown format name {name!r}; expected one of "
        + ", ".join(sorted(FORMAT_NAMES)),
        line,
    )
    return None


def _filter(block: RawBlock, diagnostics: Diagnostics) -> Filter:
    config = block.config
    include = _filter_formats(config.get("include"), diagnostics)
    exclude = _filter_formats(config.get("exclude"), diagnostics)
    if include is not None and exclude is not None:
        diagnostics.error(
            "include and exclude cannot both be set on one block",
            config["include"].line,
        )
    only = _filter_flag(config.get("only"), diagnostics)
    skip = _filter_flag(config.get("skip"), diagnostics)
    if only and skip:
        diagnostics.error(
            "only and skip cannot both be true", config["only"].line
        )
    if only:
        diagnostics.warning(
            "only: true limits every build to this block; remove it before publishing",
            config["only"].line,
        )
    if skip:
        diagnostics.warning(
            "skip: true drops this block from every build; remove it before publishing",
            config["skip"].line,
        )
    return Filter(include=include, exclude=exclude, only=only, skip=skip)


def _filter_formats(
    entry: ConfigEntry | None, diagnostics: Diagnostics
) -> tuple[Format, ...] | None:
    if entry is None:
        return None
    names = entry.value if isinstance(entry.value, list) else [entry.value]
    formats = []
    for name in names:
        fmt = _format_name(name, entry.line, diagnostics)
        if fmt is not None:
            formats.append(fmt)
    return tuple(formats)


def _filter_flag(entry: ConfigEntry | None, diagnostics: Diagnostics) -> bool:
    if entry is None:
        return False
    if not isinstance(entry.value, bool):
        diagnostics.error(f"{entry.key} must be true or false", entry.line)
        return False
    return entry.value


def _graphic_ref(block: RawBlock, diagnostics: Diagnostics) -> GraphicRef | None:
    entry = block.config.get("graphic")
    if entry is None:
        diagnostics.error("scene is missing a graphic", block.span.start_line)
        return None
    value = entry.value
    if isinstance(value, str):
        if not _valid_graphic_name(value):
            diagnostics.error(
                f"graphic name {value!r} must look like an identifier "
                "without double underscores",
                entry.line,
            )
            return None
        return GraphicRef(kind=CLIENT_COMPONENT, name=value)
    if isinstance(value, dict):
        name_entry = value.get("name")
        command_entry = value.get("command")
        if name_entry is None or not isinstance(name_entry.value, str):
            diagnostics.error("server graphic needs a name", entry.line)
            return None
        if not _valid_graphic_name(name_entry.value):
            diagnostics.error(
                f"graphic name {name_entry.value!r} must look like an identifier "
                "without double underscores",
                name_entry.line,
            )
            return None
        if (
            command_entry is None
            or not isinstance(command_entry.value, str)
            or not command_entry.value.strip()
        ):
            diagnostics.error(
                "server graphic needs a non-empty command", entry.line
            )
            return None
        for key, child in value.items():
            if key not in ("name", "command"):
                diagnostics.warning(f"unknown graphic key {key!r}", child.line)
        return GraphicRef(
            kind=SERVER_SCRIPT, name=name_entry.value, command=command_entry.value
        )
    diagnostics.error(
        "graphic must be a component name or a nested name/command block", entry.line
    )
    return None


def _valid_graphic_name(name: str) -> bool:
    return bool(GRAPHIC_NAME_RE.match(name)) and "__" not in name


def _param_tree(
    entry: ConfigEntry | None, diagnostics: Diagnostics
) -> dict[str, Scalar]:
    params: dict[str, Scalar] = {}
    if entry is None:
        return params
    if not isinstance(entry.value, dict):
        diagnostics.error("parameters must be a nested name: value block", entry.line)
        return params
    for name, child in entry.value.items():
        if isinstance(child.value, (dict, list)):
            diagnostics.error(
                f"parameter {name!r} must be a boolean, number, or string", child.line
            )
            continue
        value = canonical_value(child.value)
        if isinstance(value, float) and not _finite(value):
            diagnostics.error(f"parameter {name!r} must be finite", child.line)
            continue
        params[name] = value
    return params


def _finite(value: float) -> bool:
    return value == value and value not in (float("inf"), float("-inf"))


def _dimension(
    block: RawBlock, key: str, default: int, diagnostics: Diagnostics
) -> int:
    entry = block.config.get(key)
    if entry is None:
        return default
    value = entry.value
    if isinstance(value, bool) or not isinstance(value, int) or value <= 0:
        diagnostics.error(f"{key} must be a positive integer", entry.line)
        return default
    return value


def _summary(block: RawBlock, diagnostics: Diagnostics) -> str | None:
    entry = block.config.get("summary")
    if entry is None:
        return None
    if not isinstance(entry.value, str) or not entry.value:
        diagnostics.error("summary must be a non-empty string", entry.line)
        return None
    return entry.value


def _positive_number(
    tree: ConfigTree, key: str, diagnostics: Diagnostics
) -> float | None:
    entry = tree.get(key)
    if entry is None:
        return None
    value = entry.value
    if isinstance(value, bool) or not isinstance(value, (int, float)) or value <= 0:
        diagnostics.error(f"{key} must be a positive number", entry.line)
        return None
    return canonical_value(value)


def _positive_int(
    tree: ConfigTree, key: str, diagnostics: Diagnostics
) -> int | None:
    entry = tree.get(key)
    if entry is None:
        return None
    value = entry.value
    if isinstance(value, bool) or not isinstance(value, int) or value <= 0:
        diagnostics.error(f"{key} must be a positive integer", entry.line)
        return None
    return value


def _number(tree: ConfigTree, key: str, diagnostics: Diagnostics) -> float | None:
    entry = tree.get(key)
    if entry is None:
        return None
    value = entry.value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        diagnostics.error(f"animation {key} must be a number", entry.line)
        return None
    return canonical_value(value)


def infer_widget(domain: Domain) -> str:
    """Map a control domain to slider, select, or toggle."""
    if isinstance(domain, RangeDomain):
        return SLIDER
    if isinstance(domain, ToggleDomain):
        return TOGGLE
    values = set(domain.values)
    if len(values) == 2 and all(isinstance(v, bool) for v in values):
        return TOGGLE
    return SELECT


def _controls(
    entry: ConfigEntry | None, diagnostics: Diagnostics
) -> dict[str, Control]:
    controls: dict[str, Control] = {}
    if entry is None:
        return controls
    if not isinstance(entry.value, dict):
        diagnostics.error("controls must be a nested block", entry.line)
        return controls
    for name, child in entry.value.items():
        domain = _control_domain(name, child, diagnostics)
        if domain is not None:
            controls[name] = Control(
                parameter=name, domain=domain, widget=infer_widget(domain)
            )
    return controls


def _control_domain(
    name: str, child: ConfigEntry, diagnostics: Diagnostics
) -> Domain | None:
    if isinstance(child.value, list):
        return _choice(name, child.value, child.line, diagnostics)
    if not isinstance(child.value, dict):
        diagnostics.error(
            f"control {name!r} must declare range, values, or toggle", child.line
        )
        return None
    tree = child.value
    for key, sub in tree.items():
        if key not in ("range", "values", "toggle"):
            diagnostics.error(f"unknown control key {key!r}", sub.line)
            return None
    if len(tree) != 1:
        diagnostics.error(
            f"control {name!r} must declare exactly one of range, values, or toggle",
            child.line,
        )
        return None
    if "range" in tree:
        spec = tree["range"].value
        line = tree["range"].line
        if (
            not isinstance(spec, list)
            or len(spec) != 3
            or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in spec)
        ):
            diagnostics.error(
                f"control {name!r} range must be [min, max, step]", line
            )
            return None
        low, high, step = (canonical_value(v) for v in spec)
        if not low < high:
            diagnostics.error(f"control {name!r} range needs min < max", line)
            return None
        if step <= 0:
            diagnostics.error(f"control {name!r} range needs step > 0", line)
            return None
        return RangeDomain(min=low, max=high, step=step)
    if "values" in tree:
        spec = tree["values"].value
        if not isinstance(spec, list):
            diagnostics.error(f"control {name!r} values must be a list", tree["values"].line)
            return None
        return _choice(name, spec, tree["values"].line, diagnostics)
    flag = tree["toggle"].value
    if flag is not True:
        diagnostics.error(f"control {name!r} toggle must be true", tree["toggle"].line)
        return None
    return ToggleDomain()


def _choice(
    name: str, values: list, line: int, diagnostics: Diagnostics
) -> ChoiceDomain | None:
    canonical = tuple(canonical_value(v) for v in values)
    distinct = {repr(v) for v in canonical}
    if len(distinct) < 2:
        diagnostics.error(
            f"control {name!r} needs at least 2 distinct values", line
        )
        return None
    return ChoiceDomain(values=canonical)


def _animations(
    entry: ConfigEntry | None, diagnostics: Diagnostics
) -> dict[str, ConfigTree]:
    """Collect raw animation specs; start resolution happens against stages."""
    specs: dict[str, ConfigTree] = {}
    if entry is None:
        return specs
    if not isinstance(entry.value, dict):
        diagnostics.error("animations must be a nested block", entry.line)
        return specs
    for name, child in entry.value.items():
        if not isinstance(child.value, dict):
            diagnostics.error(
                f"animation {name!r} must declare end and duration", child.line
            )
            continue
        for key, sub in child.value.items():
            if key not in ANIMATION_KEYS:
                diagnostics.error(f"unknown animation key {key!r}", sub.line)
        specs[name] = child.value
    return specs


def _scene(
    block: RawBlock,
    stage_blocks: list[RawBlock],
    scene_number: int,
    diagnostics: Diagnostics,
) -> Scene | None:
    before = len(diagnostics.errors)
    for key, entry in block.config.items():
        if key not in SCENE_KEYS:
            diagnostics.error(f"unknown scene key {key!r}", entry.line)
    for stage_block in stage_blocks:
        for key, entry in stage_block.config.items():
            if key not in STAGE_KEYS:
                diagnostics.error(f"unknown stage key {key!r}", entry.line)

    graphic = _graphic_ref(block, diagnostics)
    width = _dimension(block, "width", DEFAULT_WIDTH, diagnostics)
    height = _dimension(block, "height", DEFAULT_HEIGHT, diagnostics)
    initial = _param_tree(block.config.get("parameters"), diagnostics)

    specs = []
    for raw_block in [block, *stage_blocks]:
        specs.append(
            {
                "block": raw_block,
                "params": (
                    initial
                    if raw_block is block
                    else _param_tree(raw_block.config.get("parameters"), diagnostics)
                ),
                "controls": _controls(raw_block.config.get("controls"), diagnostics),
                "animations": _animations(
                    raw_block.config.get("animations"), diagnostics
                ),
                "summary": _summary(raw_block, diagnostics),
                "filter": _filter(raw_block, diagnostics),
            }
        )

    space = set(initial)
    for spec in specs:
        space |= set(spec["params"]) | set(spec["controls"]) | set(spec["animations"])
    for name in sorted(space - set(initial)):
        line = block.span.start_line
        for spec in specs:
            for collection in ("params", "controls", "animations"):
                if name in spec[collection]:
                    line = spec["block"].span.start_line
                    break
        diagnostics.error(
            f"parameter {name!r} is not initialized in the scene block", line
        )
    parameter_space = tuple(sorted(space))

    appendix = _appendix(block, parameter_space, diagnostics)
    fallback = _fallback(block, diagnostics)

    stages: list[Stage] = []
    previous: dict[str, Scalar] | None = None
    for spec in specs:
        raw_block = spec["block"]
        declared = spec["params"]
        dense: dict[str, Scalar] = dict(previous) if previous is not None else {}
        dense.update(declared)

        animations: dict[str, Animation] = {}
        for name in sorted(spec["animations"]):
            tree = spec["animations"][name]
            anim = _resolve_animation(
                name, tree, declared, previous, initial, diagnostics
            )
            if anim is None:
                continue
            animations[name] = anim
            dense[name] = canonical_value(anim.end)

        missing = [n for n in parameter_space if n not in dense]
        if missing and not diagnostics.has_errors:
            # unreachable when initialization checks passed
            diagnostics.error(
                f"stage never receives parameters {missing}", raw_block.span.start_line
            )
        stages.append(
            Stage(
                text=[
                    parse_inline_text(
                        p.text, line=p.span.start_line, diagnostics=diagnostics
                    )
                    for p in raw_block.paragraphs
                ],
                summary=spec["summary"],
                parameters={n: dense[n] for n in sorted(dense)},
                animations=animations,
                controls=spec["controls"],
                filter=spec["filter"],
            )
        )
        previous = dense

    if len(diagnostics.errors) > before:
        return None
    assert graphic is not None
    return Scene(
        graphic=graphic,
        parameter_space=parameter_space,
        stages=stages,
        filter=stages[0].filter,
        width=width,
        height=height,
        appendix=appendix,
        fallback=fallback,
        source_index=scene_number,
    )


def _fallback(block: RawBlock, diagnostics: Diagnostics) -> str | None:
    entry = block.config.get("fallback")
    if entry is None:
        return None
    path = entry.value
    if not isinstance(path, str) or not path:
        diagnostics.error("fallback must be a relative image path", entry.line)
        return None
    if path.startswith("/") or ".." in PurePosixPath(path).parts:
        diagnostics.error(
            f"fallback path {path!r} must stay inside the project directory",
            entry.line,
        )
        return None
    return path


def _resolve_animation(
    name: str,
    tree: ConfigTree,
    declared: dict[str, Scalar],
    previous: dict[str, Scalar] | None,
    initial: dict[str, Scalar],
    diagnostics: Diagnostics,
) -> Animation | None:
    line = min((e.line for e in tree.values()), default=0)
    base = declared.get(name)
    if base is None and previous is not None:
        base = previous.get(name)
    if base is None:
        base = initial.get(name)
    if base is not None and (isinstance(base, bool) or not isinstance(base, (int, float))):
        diagnostics.error(
            f"animation on non-numeric parameter {name!r}", line
        )
        return None

    end = _number(tree, "end", diagnostics)
    if "end" not in tree:
        diagnostics.error(f"animation {name!r} is missing end", line)
        return None
    duration = _positive_number(tree, "duration", diagnostics)
    if "duration" not in tree:
        diagnostics.error(f"animation {name!r} is missing duration", line)
        return None
    if end is None or duration is None:
        return None

    start = _number(tree, "start", diagnostics)
    if "start" in tree and start is None:
        return None
    if start is None:
        if base is None:
            # initialization error already reported for this parameter
            return None
        start = canonical_value(base)

    loopcount = _positive_int(tree, "loopcount", diagnostics)
    frames = _positive_int(tree, "frames", diagnostics)
    columns = _positive_int(tree, "columns", diagnostics)
    return Animation(
        start=start,
        end=end,
        duration_ms=duration,
        loopcount=loopcount,
        frames=frames,
        columns=columns,
    )


def _appendix(
    block: RawBlock,
    parameter_space: tuple[str, ...],
    diagnostics: Diagnostics,
) -> dict[str, list[Scalar]] | None:
    entry = block.config.get("appendix")
    if entry is None:
        return None
    if not isinstance(entry.value, dict):
        diagnostics.error("appendix must be a nested name: values block", entry.line)
        return None
    subset: dict[str, list[Scalar]] = {}
    for name, child in entry.value.items():
        if name not in parameter_space:
            diagnostics.error(
                f"appendix parameter {name!r} is not part of this scene", child.line
            )
            continue
        values = child.value if isinstance(child.value, list) else [child.value]
        if isinstance(child.value, dict):
            diagnostics.error(
                f"appendix {name!r} must list scalar values", child.line
            )
            continue
        subset[name] = [canonical_value(v) for v in values]
    return subset or None


def _check_graphic_consistency(scenes: list[Scene], diagnostics: Diagnostics) -> None:
    seen: dict[str, tuple[GraphicRef, int, int]] = {}
    for scene in scenes:
        ref = scene.graphic
        if ref.name not in seen:
            seen[ref.name] = (ref, scene.width, scene.height)
            continue
        other, width, height = seen[ref.name]
        if other.kind != ref.kind or other.command != ref.command:
            diagnostics.error(
                f"graphic {ref.name!r} is declared twice with different definitions"
            )
        elif ref.kind == SERVER_SCRIPT and (width, height) != (scene.width, scene.height):
            diagnostics.error(
                f"graphic {ref.name!r} is used with conflicting render sizes"
            )


def resolve_filters(
    narrative: Narrative, fmt: Format, diagnostics: Diagnostics | None = None
) -> Narrative | None:
    """Project the narrative onto one output format.

    Returns None (with an error diagnostic) when nothing remains visible.
    """
    own = diagnostics if diagnostics is not None else Diagnostics()

    only_target: tuple[int, int | None] | None = None
    for i, scene in enumerate(narrative.scenes):
        if scene.filter.only and only_target is None:
            only_target = (i, None)
        elif scene.filter.only:
            own.warning(f"multiple only flags; keeping the first (scene {only_target[0] + 1})")
        for j, stage in enumerate(scene.stages):
            if j == 0:
                continue  # stage 0's filter is the scene's own filter
            if stage.filter.only and only_target is None:
                only_target = (i, j)
            elif stage.filter.only:
                own.warning(
                    f"multiple only flags; keeping the first (scene {only_target[0] + 1})"
                )

    scenes: list[Scene] = []
    for i, scene in enumerate(narrative.scenes):
        if only_target is not None and only_target[0] != i:
            continue
        keep_stage = only_target[1] if only_target is not None else None
        if keep_stage is None and not scene.filter.admits(fmt):
            continue
        stages = []
        for j, stage in enumerate(scene.stages):
            if keep_stage is not None and j != keep_stage:
                continue
            if not stage.filter.admits(fmt):
                continue
            stages.append(stage)
        if not stages:
            continue
        scenes.append(
            Scene(
                graphic=scene.graphic,
                parameter_space=scene.parameter_space,
                stages=stages,
                filter=scene.filter,
                width=scene.width,
                height=scene.height,
                appendix=scene.appendix,
                fallback=scene.fallback,
                source_index=scene.source_index,
            )
        )

    if not scenes:
        own.error(f"empty narrative for format {fmt.value}")
        return None
    return Narrative(
        metadata=narrative.metadata,
        introduction=narrative.introduction,
        scenes=scenes,
        conclusion=narrative.conclusion,
    )


def serialize_narrative(narrative: Narrative) -> str:
    """Render a normalized narrative as canonical markup."""
    lines: list[str] = ["---"]
    meta = narrative.metadata
    lines.append(f"title: {markup_scalar(meta.title)}")
    if meta.subtitle:
        lines.append(f"subtitle: {markup_scalar(meta.subtitle)}")
    if meta.authors:
        lines.append(f"authors: {', '.join(meta.authors)}")
    if meta.datasets:
        lines.append("datasets:")
        for name, path in meta.datasets.items():
            lines.append(f"  {name}: {markup_scalar(path)}")
    if meta.targets is not None:
        lines.append(
            "targets: [" + ", ".join(f.value for f in meta.targets) + "]"
        )
    lines.append("---")
    lines.append("")

    for block in narrative.introduction:
        lines.append(block.raw)
        lines.append("")

    for scene in narrative.scenes:
        for j, stage in enumerate(scene.stages):
            if j == 0:
                lines.append("{scene}")
                if scene.graphic.kind == CLIENT_COMPONENT:
                    lines.append(f"graphic: {scene.graphic.name}")
                else:
                    lines.append("graphic:")
                    lines.append(f"  name: {scene.graphic.name}")
                    lines.append(f"  command: {markup_scalar(scene.graphic.command)}")
                if scene.width != DEFAULT_WIDTH:
                    lines.append(f"width: {scene.width}")
                if scene.height != DEFAULT_HEIGHT:
                    lines.append(f"height: {scene.height}")
                if scene.fallback:
                    lines.append(f"fallback: {markup_scalar(scene.fallback)}")
            else:
                lines.append("{stage}")
            lines.extend(_stage_config_lines(stage))
            if j == 0 and scene.appendix:
                lines.append("appendix:")
                for name, values in scene.appendix.items():
                    lines.append(f"  {name}: {markup_scalar(list(values))}")
            lines.append("")
            for block in stage.text:
                lines.append(block.raw)
                lines.append("")

    if narrative.conclusion:
        lines.append("{conclusion}")
        lines.append("")
        for block in narrative.conclusion:
            lines.append(block.raw)
            lines.append("")

    while lines and not lines[-1]:
        lines.pop()
    return "\n".join(lines) + "\n"


def _stage_config_lines(stage: Stage) -> list[str]:
    lines = []
    if stage.parameters:
        lines.append("parameters:")
        for name in sorted(stage.parameters):
            lines.append(f"  {name}: {markup_scalar(stage.parameters[name])}")
    if stage.animations:
        lines.append("animations:")
        for name in sorted(stage.animations):
            anim = stage.animations[name]
            lines.append(f"  {name}:")
            lines.append(f"    start: {canonical_number(anim.start)}")
            lines.append(f"    end: {canonical_number(anim.end)}")
            lines.append(f"    duration: {canonical_number(anim.duration_ms)}")
            if anim.loopcount is not None:
                lines.append(f"    loopcount: {anim.loopcount}")
            if anim.frames is not None:
                lines.append(f"    frames: {anim.frames}")
            if anim.columns is not None:
                lines.append(f"    columns: {anim.columns}")
    if stage.controls:
        lines.append("controls:")
        for name in sorted(stage.controls):
            domain = stage.controls[name].domain
            lines.append(f"  {name}:")
            if isinstance(domain, RangeDomain):
                spec = [domain.min, domain.max, domain.step]
                lines.append(
                    "    range: ["
                    + ", ".join(canonical_number(v) for v in spec)
                    + "]"
                )
            elif isinstance(domain, ChoiceDomain):
                lines.append(f"    values: {markup_scalar(list(domain.values))}")
            else:
                lines.append("    toggle: true")
    if stage.summary:
        lines.append(f"summary: {markup_scalar(stage.summary)}")
    lines.extend(_filter_lines(stage.filter))
    return lines


def _filter_lines(filt: Filter) -> list[str]:
    lines = []
    if filt.include is not None:
        lines.append("include: [" + ", ".join(f.value for f in filt.include) + "]")
    if filt.exclude is not None:
        lines.append("exclude: [" + ", ".join(f.value for f in filt.exclude) + "]")
    if filt.only:
        lines.append("only: true")
    if filt.skip:
        lines.append("skip: true")
    return lines
