"""Video storyboard, SRT captions, and narration text for the video target."""
from __future__ import annotations

import json
import shlex
import subprocess
import textwrap
from dataclasses import dataclass
from pathlib import Path

from .codegen import DEFAULT_WPM, DocumentIR, animation_json
from .model import Format
from .scalars import canonical_value

SRT_WRAP_COLUMNS = 42
SRT_MAX_LINES_PER_CUE = 2
MIN_SLIDE_MS = 2000


@dataclass(frozen=True)
class SlideTiming:
    index: int  # 1-based
    start_ms: int
    end_ms: int
    text: str
    audio_path: str | None = None


def estimate_duration(text: str, wpm: float = DEFAULT_WPM) -> int:
    """Spoken duration in ms: word count at `wpm`, floored at 2 s."""
    if wpm <= 0:
        raise ValueError("words-per-minute must be positive")
    words = len(text.split())
    return max(MIN_SLIDE_MS, round(words / wpm * 60000))


def format_timestamp(ms: int) -> str:
    hours, rest = divmod(ms, 3600000)
    minutes, rest = divmod(rest, 60000)
    seconds, millis = divmod(rest, 1000)
    return f"{hours:02d}:{minutes:02d}:{seconds:02d},{millis:03d}"


def _wrap_cue_lines(text: str) -> list[list[str]]:
    """Wrap at 42 columns and group into cues of at most two lines."""
    lines = textwrap.wrap(text, width=SRT_WRAP_COLUMNS) or []
    return [
        lines[i : i + SRT_MAX_LINES_PER_CUE]
        for i in range(0, len(lines), SRT_MAX_LINES_PER_CUE)
    ]


def generate_srt(timings: list[SlideTiming]) -> str:
    """Number cues across all slides; cues partition each slide's window."""
    cues: list[tuple[int, int, list[str]]] = []
    for timing in timings:
        groups = _wrap_cue_lines(timing.text)
        if not groups:
            continue
        window = timing.end_ms - timing.start_ms
        weights = [sum(len(line) for line in group) for group in groups]
        total_weight = sum(weights) or 1
        cursor = timing.start_ms
        for g, group in enumerate(groups):
            if g == len(groups) - 1:
                end = timing.end_ms  # last cue absorbs rounding
            else:
                end = cursor + window * weights[g] // total_weight
                end = max(end, cursor + 1)
            cues.append((cursor, end, group))
            cursor = end
    out = []
    for number, (start, end, group) in enumerate(cues, start=1):
        out.append(str(number))
        out.append(f"{format_timestamp(start)} --> {format_timestamp(end)}")
        out.extend(group)
        out.append("")
    return "\n".join(out) + "\n" if out else ""


def slide_timings(ir: DocumentIR, wpm: float = DEFAULT_WPM) -> list[SlideTiming]:
    timings: list[SlideTiming] = []
    cursor = 0
    for index, node in enumerate(
        (n for n in ir.sections if n.kind == "slide"), start=1
    ):
        text = node.payload["slideText"]
        duration = estimate_duration(text, wpm)
        for anim in node.payload["animations"].values():
            duration = max(duration, int(anim.total_ms()))
        timings.append(
            SlideTiming(
                index=index,
                start_ms=cursor,
                end_ms=cursor + duration,
                text=text,
            )
        )
        cursor += duration
    return timings


def emit_storyboard(
    ir: DocumentIR,
    out_dir: Path,
    *,
    wpm: float = DEFAULT_WPM,
    composite_command: str | None = None,
    narration_command: str | None = None,
) -> dict:
    """Write storyboard.json, captions.srt, and narration.txt."""
    if ir.target != Format.VIDEO:
        raise ValueError("emit_storyboard requires a video document")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    timings = slide_timings(ir, wpm)
    slides = []
    slide_nodes = [n for n in ir.sections if n.kind == "slide"]
    for node, timing in zip(slide_nodes, timings):
        slides.append(
            {
                "index": timing.index,
                "sceneId": node.scene_id,
                "stageId": node.stage_id,
                "text": timing.text,
                "startMs": timing.start_ms,
                "endMs": timing.end_ms,
                "durationMs": timing.end_ms - timing.start_ms,
                "params": {
                    k: canonical_value(v)
                    for k, v in node.payload["params"].items()
                },
                "animations": {
                    name: animation_json(anim)
                    for name, anim in sorted(node.payload["animations"].items())
                },
                "asset": (
                    f"assets/{node.payload['asset']}"
                    if node.payload["asset"]
                    else None
                ),
            }
        )
    storyboard = {
        "schemaVersion": 1,
        "title": ir.runtime_manifest.get("title", ""),
        "totalDurationMs": timings[-1].end_ms if timings else 0,
        "slides": slides,
    }
    (out_dir / "storyboard.json").write_text(
        json.dumps(storyboard, indent=2) + "\n", encoding="utf-8"
    )
    (out_dir / "captions.srt").write_text(generate_srt(timings), encoding="utf-8")
    narration = "".join(
        timing.text.replace("\n", " ") + "\n" for timing in timings
    )
    (out_dir / "narration.txt").write_text(narration, encoding="utf-8")

    hooks: dict[str, int] = {}
    if narration_command:
        hooks["narration"] = _run_hook(
            narration_command, [str(out_dir / "narration.txt")]
        )
    if composite_command:
        hooks["composite"] = _run_hook(
            composite_command, [str(out_dir / "storyboard.json")]
        )
    return {"storyboard": storyboard, "hooks": hooks}


def _run_hook(command: str, extra_args: list[str]) -> int:
    proc = subprocess.run([*shlex.split(command), *extra_args])
    return proc.returncode
