"""Enumerate every parameter configuration a scene can reach.

The set covers stage values, control domains (cross product within each
stage), and animation samples, deduplicated under the canonical scalar
form so `0` and `0.0` are one configuration.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from decimal import Decimal

from .model import (
    ANIMATION_SOURCE,
    CONTROL_SOURCE,
    STAGE_SOURCE,
    Animation,
    ChoiceDomain,
    Configuration,
    Control,
    Narrative,
    RangeDomain,
    Scene,
    ToggleDomain,
)
from .scalars import Scalar, canonical_value, params_key

DEFAULT_FRAMES = 4
DEFAULT_COLUMNS = 2
CONTROL_CAP = 1000
DEFAULT_MAX_CONFIGS = 10000


class CollectError(ValueError):
    """Raised when enumeration exceeds a configured cap."""


@dataclass
class ConfigSet:
    """Deterministically ordered configurations per scene."""

    scenes: dict[int, list[Configuration]] = field(default_factory=dict)
    provenance: dict[tuple[int, tuple], str] = field(default_factory=dict)

    def all_configurations(self) -> list[Configuration]:
        return [c for configs in self.scenes.values() for c in configs]

    def source_of(self, config: Configuration) -> str:
        return self.provenance[(config.scene_index, params_key(config.as_dict()))]

    def __len__(self) -> int:
        return sum(len(configs) for configs in self.scenes.values())


def enumerate_control(control: Control, cap: int = CONTROL_CAP) -> list[Scalar]:
    """List a control's reachable values in enumeration order."""
    domain = control.domain
    if isinstance(domain, ToggleDomain):
        return [False, True]
    if isinstance(domain, ChoiceDomain):
        if len(domain.values) > cap:
            raise CollectError(
                f"control {control.parameter!r} enumerates "
                f"{len(domain.values)} values, above the cap of {cap}"
            )
        return [canonical_value(v) for v in domain.values]
    return _enumerate_range(control.parameter, domain, cap)


def _enumerate_range(name: str, domain: RangeDomain, cap: int) -> list[Scalar]:
    # Decimal arithmetic over min + k*step keeps 0.1-style steps exact,
    # so 0.30000000000000004 never leaks into values or filenames.
    dmin = Decimal(repr(domain.min))
    dstep = Decimal(repr(domain.step))
    limit = domain.max + 1e-9
    values: list[Scalar] = []
    k = 0
    while True:
        value = dmin + k * dstep
        if float(value) > limit:
            break
        values.append(_number_from_decimal(value))
        k += 1
        if len(values) > cap:
            raise CollectError(
                f"control {name!r} enumerates more than {cap} values; "
                "widen the step or narrow the range"
            )
    return values


def _number_from_decimal(value: Decimal) -> int | float:
    if value == value.to_integral_value():
        return int(value)
    return float(value)


def sample_animation(anim: Animation, default_frames: int = DEFAULT_FRAMES) -> list[float]:
    """Linearly spaced samples from start to end, endpoints exact."""
    count = anim.frames if anim.frames is not None else default_frames
    if count <= 1:
        return [anim.end]
    samples = []
    for i in range(count):
        if i == 0:
            samples.append(anim.start)
        elif i == count - 1:
            samples.append(anim.end)
        else:
            samples.append(anim.start + i * (anim.end - anim.start) / (count - 1))
    return samples


def collect(
    narrative: Narrative,
    default_frames: int = DEFAULT_FRAMES,
    max_configs: int = DEFAULT_MAX_CONFIGS,
) -> ConfigSet:
    """Walk scenes and stages, gathering every reachable configuration."""
    result = ConfigSet()
    for scene in narrative.scenes:
        configs, provenance = _collect_scene(scene, default_frames, max_configs)
        result.scenes[scene.source_index] = configs
        result.provenance.update(provenance)
    return result


def _collect_scene(
    scene: Scene, default_frames: int, max_configs: int
) -> tuple[list[Configuration], dict[tuple[int, tuple], str]]:
    ordered: list[Configuration] = []
    provenance: dict[tuple[int, tuple], str] = {}
    seen: set[tuple] = set()

    def add(params: dict[str, Scalar], source: str) -> None:
        canonical = {k: canonical_value(v) for k, v in params.items()}
        key = params_key(canonical)
        if key in seen:
            return
        seen.add(key)
        ordered.append(
            Configuration(
                scene_index=scene.source_index,
                graphic=scene.graphic,
                params=tuple((k, canonical[k]) for k in sorted(canonical)),
            )
        )
        provenance[(scene.source_index, key)] = source
        if len(ordered) > max_configs:
            raise CollectError(
                f"scene {scene.source_index + 1} exceeds {max_configs} "
                "configurations; narrow its controls or declare an appendix: "
                "subset for the static formats"
            )

    for stage in scene.stages:
        add(stage.parameters, STAGE_SOURCE)

        if stage.controls:
            names = sorted(stage.controls)
            domains = [enumerate_control(stage.controls[n]) for n in names]
            product_size = 1
            for domain in domains:
                product_size *= len(domain)
            if product_size > max_configs:
                raise CollectError(
                    f"scene {scene.source_index + 1} control cross product has "
                    f"{product_size} configurations, above the cap of {max_configs}; "
                    "narrow its controls or declare an appendix: subset"
                )
            for combo in itertools.product(*domains):
                params = dict(stage.parameters)
                params.update(zip(names, combo))
                add(params, CONTROL_SOURCE)

        for name in sorted(stage.animations):
            for sample in sample_animation(stage.animations[name], default_frames):
                params = dict(stage.parameters)
                params[name] = sample
                add(params, ANIMATION_SOURCE)

    return ordered, provenance
