import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fidyll.build import build as run_build
from fidyll.config import BuildOptions
from fidyll.model import ChoiceDomain, Narrative, RangeDomain
from fidyll.normalize import normalize
from fidyll.parser import parse
from fidyll.source import SourceDocument

def pytest_terminal_summary(terminalreporter):
    """Print one pass/fail line per acceptance criterion."""
    lines = []
    for status in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(status, []):
            node_id = getattr(report, "nodeid", "")
            if "test_acceptance.py" in node_id and getattr(report, "when", "call") == "call":
                name = node_id.split("::")[-1]
                lines.append((name, status.upper()))
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for name, status in sorted(lines):
            terminalreporter.write_line(f"{status:6s} {name}")


DATA_DIR = Path(__file__).parent / "data"
DEMO_DIR = Path(__file__).parent.parent / "demo"
EXAMPLE_PATH = DATA_DIR / "example_article.fid"
GOLDEN_PATH = DATA_DIR / "example_article.golden.json"
DEMO_PATH = DEMO_DIR / "demo.fid"


@pytest.fixture(scope="session")
def example_source() -> SourceDocument:
    return SourceDocument.from_path(EXAMPLE_PATH)


@pytest.fixture()
def example_narrative(example_source) -> Narrative:
    result = parse(example_source)
    assert result.ok, [d.message for d in result.diagnostics]
    normalized = normalize(result.document)
    assert normalized.narrative is not None, [
        d.message for d in normalized.diagnostics
    ]
    return normalized.narrative


@pytest.fixture(scope="session")
def demo_build(tmp_path_factory):
    """One full five-target build of the bundled demo, shared by read-only tests."""
    out_dir = tmp_path_factory.mktemp("demo-out")
    options = BuildOptions(input=DEMO_PATH, out_dir=out_dir)
    result = run_build(options)
    assert result.ok, result.format_diagnostics(DEMO_PATH)
    return result


def load_narrative(path: Path) -> Narrative:
    source = SourceDocument.from_path(path)
    result = parse(source)
    assert result.ok, [d.message for d in result.diagnostics]
    normalized = normalize(result.document)
    assert normalized.narrative is not None, [
        d.message for d in normalized.diagnostics
    ]
    return normalized.narrative


def compile_text(text: str):
    """Parse + normalize an inline article; returns (narrative, diagnostics)."""
    source = SourceDocument.from_text(text, path="<test>")
    result = parse(source)
    if not result.ok:
        return None, result.diagnostics
    normalized = normalize(result.document)
    return normalized.narrative, result.diagnostics + normalized.diagnostics


def _filter_json(f) -> dict:
    return {
        "include": sorted(v.value for v in f.include) if f.include is not None else None,
        "exclude": sorted(v.value for v in f.exclude) if f.exclude is not None else None,
        "only": f.only,
        "skip": f.skip,
    }


def _domain_json(domain) -> dict:
    if isinstance(domain, RangeDomain):
        return {"kind": "range", "min": domain.min, "max": domain.max, "step": domain.step}
    if isinstance(domain, ChoiceDomain):
        return {"kind": "choice", "values": list(domain.values)}
    return {"kind": "toggle"}


def narrative_projection(narrative: Narrative) -> dict:
    """Target-independent JSON view of a normalized narrative.

    Field-by-field, so the golden file pins every structural detail.
    """
    meta = narrative.metadata
    scenes = []
    for scene in narrative.scenes:
        stages = []
        for stage in scene.stages:
            stages.append(
                {
                    "text": [block.plain() for block in stage.text],
                    "summary": stage.summary,
                    "params": dict(stage.parameters),
                    "animations": {
                        name: {
                            "start": anim.start,
                            "end": anim.end,
                            "durationMs": anim.duration_ms,
                            "loopcount": anim.loopcount,
                            "frames": anim.frames,
                            "columns": anim.columns,
                        }
                        for name, anim in sorted(stage.animations.items())
                    },
                    "controls": {
                        name: {
                            "widget": control.widget,
                            "domain": _domain_json(control.domain),
                        }
                        for name, control in sorted(stage.controls.items())
                    },
                    "filter": _filter_json(stage.filter),
                }
            )
        scenes.append(
            {
                "graphic": {
                    "kind": scene.graphic.kind,
                    "name": scene.graphic.name,
                    "command": scene.graphic.command,
                },
                "width": scene.width,
                "height": scene.height,
                "parameterSpace": list(scene.parameter_space),
                "appendix": scene.appendix,
                "fallback": scene.fallback,
                "filter": _filter_json(scene.filter),
                "stages": stages,
            }
        )
    return {
        "metadata": {
            "title": meta.title,
            "subtitle": meta.subtitle,
            "authors": list(meta.authors),
            "datasets": dict(meta.datasets),
            "targets": [f.value for f in meta.targets] if meta.targets is not None else None,
        },
        "introduction": [block.plain() for block in narrative.introduction],
        "scenes": scenes,
        "conclusion": [block.plain() for block in narrative.conclusion],
    }
