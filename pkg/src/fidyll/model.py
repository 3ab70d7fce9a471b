"""Normalized narrative schema: scenes, stages, controls, animations, filters."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .scalars import Scalar
from .text import TextBlock

CLIENT_COMPONENT = "clientComponent"
SERVER_SCRIPT = "serverScript"

SLIDER = "slider"
SELECT = "select"
TOGGLE = "toggle"

DEFAULT_WIDTH = 1200
DEFAULT_HEIGHT = 800


class Format(enum.Enum):
    SCROLLER = "scroller"
    STEPPER = "stepper"
    LOWMOTION = "lowmotion"
    PRINT = "print"
    VIDEO = "video"


ALL_FORMATS = tuple(Format)
FORMAT_NAMES = {f.value for f in Format}


@dataclass(frozen=True)
class Filter:
    include: tuple[Format, ...] | None = None
    exclude: tuple[Format, ...] | None = None
    only: bool = False
    skip: bool = False

    def admits(self, fmt: Format) -> bool:
        if self.skip:
            return False
        if self.include is not None and fmt not in self.include:
            return False
        if self.exclude is not None and fmt in self.exclude:
            return False
        return True


NO_FILTER = Filter()


@dataclass(frozen=True)
class Animation:
    start: int | float
    end: int | float
    duration_ms: int | float
    loopcount: int | None = None
    frames: int | None = None
    columns: int | None = None

    def total_ms(self) -> int | float:
        return self.duration_ms * (self.loopcount or 1)


@dataclass(frozen=True)
class RangeDomain:
    min: int | float
    max: int | float
    step: int | float


@dataclass(frozen=True)
class ChoiceDomain:
    values: tuple[Scalar, ...]


@dataclass(frozen=True)
class ToggleDomain:
    pass


Domain = RangeDomain | ChoiceDomain | ToggleDomain


@dataclass(frozen=True)
class Control:
    parameter: str
    domain: Domain
    widget: str


@dataclass(frozen=True)
class GraphicRef:
    kind: str
    name: str
    command: str | None = None


@dataclass
class Stage:
    text: list[TextBlock] = field(default_factory=list)
    summary: str | None = None
    parameters: dict[str, Scalar] = field(default_factory=dict)
    animations: dict[str, Animation] = field(default_factory=dict)
    controls: dict[str, Control] = field(default_factory=dict)
    filter: Filter = NO_FILTER

    def plain_text(self) -> str:
        return "\n\n".join(block.plain() for block in self.text)


@dataclass
class Scene:
    graphic: GraphicRef
    parameter_space: tuple[str, ...]
    stages: list[Stage]
    filter: Filter = NO_FILTER
    width: int = DEFAULT_WIDTH
    height: int = DEFAULT_HEIGHT
    appendix: dict[str, list[Scalar]] | None = None
    fallback: str | None = None
    source_index: int = 0


@dataclass
class Metadata:
    title: str
    subtitle: str | None = None
    authors: list[str] = field(default_factory=list)
    datasets: dict[str, str] = field(default_factory=dict)
    targets: list[Format] | None = None


@dataclass
class Narrative:
    metadata: Metadata
    introduction: list[TextBlock] = field(default_factory=list)
    scenes: list[Scene] = field(default_factory=list)
    conclusion: list[TextBlock] = field(default_factory=list)


@dataclass(frozen=True)
class Configuration:
    """One fully-specified parameter assignment for a scene's graphic."""

    scene_index: int
    graphic: GraphicRef
    params: tuple[tuple[str, Scalar], ...]  # sorted by parameter name

    def as_dict(self) -> dict[str, Scalar]:
        return dict(self.params)


STAGE_SOURCE = "stage"
CONTROL_SOURCE = "control"
ANIMATION_SOURCE = "animation"
