"""Fidyll compiles a single narrative source into five presentation formats."""

__version__ = "0.1.0"

from .build import BuildResult, build, compile_source
from .collect import ConfigSet, collect
from .config import BuildOptions, from_sources
from .diagnostics import CompileError, Diagnostic, Diagnostics
from .metrics import ExpressivenessReport, stats
from .model import Format, Narrative, Scene, Stage
from .normalize import normalize, resolve_filters
from .parser import parse
from .source import SourceDocument

__all__ = [
    "BuildOptions",
    "BuildResult",
    "CompileError",
    "ConfigSet",
    "Diagnostic",
    "Diagnostics",
    "ExpressivenessReport",
    "Format",
    "Narrative",
    "Scene",
    "SourceDocument",
    "Stage",
    "build",
    "collect",
    "compile_source",
    "from_sources",
    "normalize",
    "parse",
    "resolve_filters",
    "stats",
    "__version__",
]
