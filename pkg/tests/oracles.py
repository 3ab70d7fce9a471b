"""Independent reference implementations used to check the package.

Everything here is deliberately written from the contracts alone, with
different algorithms and data structures than the package uses: ranges
are enumerated with Fraction instead of Decimal, configurations with a
recursive cross product, line classification with a standalone state
walker, and SRT parsing with a strict grammar regex.
"""
from __future__ import annotations

import itertools
import re
from fractions import Fraction


# ---- range / configuration enumeration ----------------------------------

def oracle_range_values(lo: float, hi: float, step: float) -> list[float]:
    """All values lo + k*step that fit below hi plus a 1e-9 slack."""
    flo = Fraction(repr(lo))
    fstep = Fraction(repr(step))
    values = []
    k = 0
    while True:
        value = flo + k * fstep
        if float(value) > hi + 1e-9:
            break
        values.append(float(value))
        k += 1
    return values


def _canon(value):
    """Mirror of the canonical-scalar rule: integral floats become ints."""
    if isinstance(value, bool):
        return value
    if isinstance(value, float) and value.is_integer():
        return int(value)
    return value


def _key(params: dict) -> tuple:
    out = []
    for name in sorted(params):
        value = _canon(params[name])
        if isinstance(value, bool):
            out.append((name, "bool", str(value).lower()))
        elif isinstance(value, (int, float)):
            out.append((name, "number", repr(value) if isinstance(value, float) else str(value)))
        else:
            out.append((name, "string", str(value)))
    return tuple(out)


def oracle_animation_samples(start, end, frames: int) -> list:
    if frames <= 1:
        return [end]
    samples = []
    for i in range(frames):
        if i == 0:
            samples.append(start)
        elif i == frames - 1:
            samples.append(end)
        else:
            samples.append(start + i * (end - start) / (frames - 1))
    return samples


def oracle_scene_configs(scene: dict, default_frames: int) -> set[tuple]:
    """Brute-force the reachable configuration set for one scene spec.

    `scene` is a plain dict:
      {"initial": {...}, "stages": [{"params": {...}, "controls": {name: [v, ...]},
                                     "animations": {name: {"start": s|None, "end": e,
                                                           "frames": n|None}}}]}
    Control domains are pre-enumerated lists of values.
    """
    seen: set[tuple] = set()
    dense = dict(scene.get("initial", {}))
    for stage in scene["stages"]:
        declared = stage.get("params", {})
        dense.update(declared)
        animations = stage.get("animations", {})
        resolved = {}
        for name, spec in animations.items():
            base = declared.get(name, dense.get(name))
            start = spec.get("start")
            if start is None:
                start = base
            resolved[name] = (start, spec["end"], spec.get("frames") or default_frames)
            dense[name] = _canon(spec["end"])
        seen.add(_key(dense))
        controls = stage.get("controls", {})
        if controls:
            names = sorted(controls)
            for combo in itertools.product(*(controls[n] for n in names)):
                params = dict(dense)
                params.update(dict(zip(names, combo)))
                seen.add(_key(params))
        for name, (start, end, frames) in sorted(resolved.items()):
            for sample in oracle_animation_samples(start, end, frames):
                params = dict(dense)
                params[name] = sample
                seen.add(_key(params))
    return seen


# ---- line classification --------------------------------------------------

_HEADER = re.compile(r"^\{[A-Za-z_][A-Za-z0-9_-]*\}$")
_KEYLINE = re.compile(r"^[A-Za-z_][A-Za-z0-9_-]*\s*:")


def oracle_classify_lines(text: str) -> dict[str, int]:
    """Standalone recount of narrative/non-narrative/blank lines."""
    counts = {"narrative": 0, "nonNarrative": 0, "blank": 0}
    lines = text.split("\n")
    in_front = False
    front_done = False
    in_config = False
    for i, line in enumerate(lines):
        stripped = line.strip()
        if i == 0 and stripped == "---":
            in_front = True
            counts["nonNarrative"] += 1
            continue
        if in_front:
            if not stripped:
                counts["blank"] += 1
            else:
                counts["nonNarrative"] += 1
                if stripped == "---":
                    in_front = False
                    front_done = True
            continue
        if not stripped:
            counts["blank"] += 1
            in_config = False
            continue
        if _HEADER.match(stripped):
            counts["nonNarrative"] += 1
            in_config = True
            continue
        if in_config and (line.startswith((" ", "\t")) or _KEYLINE.match(stripped)):
            counts["nonNarrative"] += 1
            continue
        in_config = False
        counts["narrative"] += 1
    del front_done
    return counts


# ---- SRT grammar -----------------------------------------------------------

_TS = r"(\d{2}):(\d{2}):(\d{2}),(\d{3})"
_CUE_HEAD = re.compile(rf"^{_TS} --> {_TS}$")


class SrtError(AssertionError):
    pass


def parse_srt_strict(text: str) -> list[dict]:
    """Parse SRT, raising on any deviation from the strict format."""
    if text == "":
        return []
    if not text.endswith("\n"):
        raise SrtError("SRT must end with a newline")
    blocks = text.split("\n\n")
    if blocks and blocks[-1] == "":
        blocks = blocks[:-1]
    cues = []
    for n, block in enumerate(blocks, start=1):
        lines = block.split("\n")
        if len(lines) < 3:
            raise SrtError(f"cue {n}: needs index, timestamps, and text")
        if lines[0] != str(n):
            raise SrtError(f"cue {n}: index line is {lines[0]!r}")
        head = _CUE_HEAD.match(lines[1])
        if not head:
            raise SrtError(f"cue {n}: bad timestamp line {lines[1]!r}")
        h1, m1, s1, ms1, h2, m2, s2, ms2 = (int(g) for g in head.groups())
        if m1 >= 60 or m2 >= 60 or s1 >= 60 or s2 >= 60:
            raise SrtError(f"cue {n}: timestamp fields out of range")
        start = ((h1 * 60 + m1) * 60 + s1) * 1000 + ms1
        end = ((h2 * 60 + m2) * 60 + s2) * 1000 + ms2
        if end <= start:
            raise SrtError(f"cue {n}: end not after start")
        body = lines[2:]
        if not (1 <= len(body) <= 2):
            raise SrtError(f"cue {n}: {len(body)} text lines")
        for line in body:
            if not line.strip():
                raise SrtError(f"cue {n}: blank text line")
            if len(line) > 42:
                raise SrtError(f"cue {n}: line longer than 42 chars: {line!r}")
        cues.append({"index": n, "start": start, "end": end, "lines": body})
    for prev, cur in zip(cues, cues[1:]):
        if cur["start"] < prev["end"]:
            raise SrtError(f"cue {cur['index']} overlaps cue {prev['index']}")
    return cues


def oracle_estimate_duration(text: str, wpm: int = 160) -> int:
    words = len(text.split())
    return max(2000, round(words / wpm * 60000))
