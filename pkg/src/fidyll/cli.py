"""Command-line entry point: build, preview, present, configs, stats."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .build import build, compile_source
from .config import ConfigError, from_sources, parse_targets
from .diagnostics import CompileError, Diagnostics
from .metrics import baseline_loc_of_directory, stats
from .model import FORMAT_NAMES, Format
from .source import SourceDocument


def _add_build_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("input", type=Path, help="article source (.fid)")
    parser.add_argument(
        "--targets",
        help="comma-separated output formats (default: all five)",
    )
    parser.add_argument("--out", type=Path, help="output directory (default: out)")
    parser.add_argument("--config", type=Path, help="path to fidyll.toml")
    parser.add_argument(
        "--jobs", type=int, help="parallel graphic renders (default: CPU count)"
    )
    parser.add_argument(
        "--frames", type=int, help="samples per animation when frames: is absent"
    )
    parser.add_argument("--max-configs", type=int, help="per-scene configuration cap")
    parser.add_argument(
        "--print-columns", type=int, choices=(1, 2), help="print layout columns"
    )
    parser.add_argument("--wpm", type=int, help="narration words per minute")
    parser.add_argument("--pdf-command", help="print-to-PDF converter command")
    parser.add_argument("--narration-command", help="narration/TTS hook command")
    parser.add_argument("--composite-command", help="video compositing hook command")
    parser.add_argument(
        "--runtime", type=Path, help="substitute runtime.js bundle to ship"
    )


def _collect_overrides(args: argparse.Namespace) -> dict:
    return {
        "targets": parse_targets(args.targets) if args.targets else None,
        "out_dir": args.out,
        "jobs": args.jobs,
        "default_frames": args.frames,
        "max_configs": args.max_configs,
        "print_columns": args.print_columns,
        "wpm": args.wpm,
        "pdf_command": args.pdf_command,
        "narration_command": args.narration_command,
        "composite_command": args.composite_command,
        "runtime_path": args.runtime,
    }


def _make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fidyll",
        description="Compile a data-story source file into web, print, "
        "and video formats.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    build_cmd = commands.add_parser("build", help="compile every requested target")
    _add_build_flags(build_cmd)

    preview_cmd = commands.add_parser(
        "preview", help="serve one target, rebuilding on source changes"
    )
    _add_build_flags(preview_cmd)
    preview_cmd.add_argument(
        "--target",
        default=Format.SCROLLER.value,
        choices=sorted(FORMAT_NAMES),
        help="format to preview (default: scroller)",
    )
    preview_cmd.add_argument("--port", type=int, default=8080)
    preview_cmd.add_argument("--host", default="127.0.0.1")

    present_cmd = commands.add_parser(
        "present", help="serve the slideshow with live presenter sync"
    )
    _add_build_flags(present_cmd)
    present_cmd.add_argument("--port", type=int, default=8080)
    present_cmd.add_argument("--host", default="127.0.0.1")

    configs_cmd = commands.add_parser(
        "configs", help="print every reachable configuration as JSON lines"
    )
    configs_cmd.add_argument("input", type=Path)
    configs_cmd.add_argument("--frames", type=int, default=None)
    configs_cmd.add_argument("--max-configs", type=int, default=None)
    configs_cmd.add_argument("--config", type=Path, default=None)

    stats_cmd = commands.add_parser(
        "stats", help="report narrative vs non-narrative line counts"
    )
    stats_cmd.add_argument("input", type=Path)
    group = stats_cmd.add_mutually_exclusive_group()
    group.add_argument(
        "--baseline", type=Path, help="directory of baseline markup to count"
    )
    group.add_argument(
        "--baseline-loc", type=int, help="explicit baseline non-narrative line count"
    )
    stats_cmd.add_argument("--json", action="store_true", help="emit JSON")

    return parser


def _print_diagnostics(diagnostics: Diagnostics, path: Path) -> None:
    for diagnostic in diagnostics:
        print(diagnostic.format(str(path)), file=sys.stderr)


def _cmd_build(args: argparse.Namespace) -> int:
    options = from_sources(args.input, _collect_overrides(args), args.config)
    result = build(options)
    _print_diagnostics(result.diagnostics, options.input)
    if not result.ok:
        return 1
    count = len(result.config_set) if result.config_set else 0
    names = ", ".join(fmt.value for fmt in options.targets)
    print(f"built {names} ({count} configurations) in {result.out_dir}")
    return 0


def _run_server(app, host: str, port: int) -> int:
    import uvicorn

    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    except OSError as exc:
        print(f"error: cannot bind {host}:{port}: {exc}", file=sys.stderr)
        return 1
    return 0


def _cmd_preview(args: argparse.Namespace) -> int:
    from .server import BuildFailure, create_preview_app

    options = from_sources(args.input, _collect_overrides(args), args.config)
    try:
        app = create_preview_app(options, Format(args.target))
    except BuildFailure as failure:
        for message in failure.messages:
            print(message, file=sys.stderr)
        return 1
    print(f"previewing {args.target} at http://{args.host}:{args.port}/")
    return _run_server(app, args.host, args.port)


def _cmd_present(args: argparse.Namespace) -> int:
    from .server import BuildFailure, create_present_app

    options = from_sources(args.input, _collect_overrides(args), args.config)
    try:
        app = create_present_app(options)
    except BuildFailure as failure:
        for message in failure.messages:
            print(message, file=sys.stderr)
        return 1
    print(
        f"presenting at http://{args.host}:{args.port}/ "
        f"(presenter view: /presenter)"
    )
    return _run_server(app, args.host, args.port)


def _cmd_configs(args: argparse.Namespace) -> int:
    options = from_sources(
        args.input,
        {"default_frames": args.frames, "max_configs": args.max_configs},
        args.config,
    )
    diagnostics = Diagnostics()
    narrative, config_set = compile_source(
        options.input,
        max_configs=options.max_configs,
        diagnostics=diagnostics,
        default_frames=options.default_frames,
    )
    _print_diagnostics(diagnostics, options.input)
    if narrative is None or config_set is None:
        return 1
    for config in config_set.all_configurations():
        line = {
            "scene": config.scene_index,
            "graphic": config.graphic.name,
            "params": config.as_dict(),
        }
        print(json.dumps(line, sort_keys=True))
    return 0


def _cmd_stats(args: argparse.Namespace) -> int:
    try:
        source = SourceDocument.from_path(args.input)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    baseline = args.baseline_loc
    if args.baseline is not None:
        baseline = baseline_loc_of_directory(args.baseline)
    try:
        report = stats(source, baseline_non_narrative=baseline)
    except CompileError as exc:
        print(exc.format_all(), file=sys.stderr)
        return 1
    if args.json:
        print(json.dumps(report.as_dict(), sort_keys=True))
        return 0
    print(f"narrative LOC:     {report.narrative_loc}")
    print(f"non-narrative LOC: {report.non_narrative_loc}")
    print(f"total LOC:         {report.total_loc}")
    print(f"narrative share:   {report.pct_narrative * 100:.2f}%")
    if report.reduction is not None:
        print(f"markup reduction:  {report.reduction * 100:.2f}%")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _make_parser()
    args = parser.parse_args(argv)
    handlers = {
        "build": _cmd_build,
        "preview": _cmd_preview,
        "present": _cmd_present,
        "configs": _cmd_configs,
        "stats": _cmd_stats,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
