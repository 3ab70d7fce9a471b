"""Diagnostics shared by every compiler phase.

Errors abort a build; warnings never do. Each diagnostic carries a 1-based
line and column so the CLI can print ``file:line:col`` prefixes.
"""
from __future__ import annotations

from dataclasses import dataclass

ERROR = "error"
WARNING = "warning"


@dataclass(frozen=True)
class Span:
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    @classmethod
    def of_line(cls, line: int, length: int = 1) -> "Span":
        return cls(line, 1, line, max(1, length))


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    message: str
    line: int
    column: int = 1

    def format(self, path: str = "") -> str:
        prefix = f"{path}:" if path else ""
        return f"{prefix}{self.line}:{self.column}: {self.severity}: {self.message}"


class Diagnostics:
    """Ordered collector for one compilation run."""

    def __init__(self) -> None:
        self.items: list[Diagnostic] = []

    def error(self, message: str, line: int = 0, column: int = 1) -> None:
        self.items.append(Diagnostic(ERROR, message, line, column))

    def warning(self, message: str, line: int = 0, column: int = 1) -> None:
        self.items.append(Diagnostic(WARNING, message, line, column))

    def extend(self, other: "Diagnostics | list[Diagnostic]") -> None:
        items = other.items if isinstance(other, Diagnostics) else other
        self.items.extend(items)

    @property
    def errors(self) -> list[Diagnostic]:
        return [d for d in self.items if d.severity == ERROR]

    @property
    def warnings(self) -> list[Diagnostic]:
        return [d for d in self.items if d.severity == WARNING]

    @property
    def has_errors(self) -> bool:
        return any(d.severity == ERROR for d in self.items)

    def __iter__(self):
        return iter(self.items)

    def __len__(self) -> int:
        return len(self.items)


class CompileError(Exception):
    """Raised by convenience wrappers when a phase produced error diagnostics."""

    def __init__(self, diagnostics: list[Diagnostic], path: str = "") -> None:
        self.diagnostics = diagnostics
        self.path = path
        first = diagnostics[0] if diagnostics else Diagnostic(ERROR, "unknown error", 0)
        super().__init__(first.format(path))

    def format_all(self) -> str:
        return "\n".join(d.format(self.path) for d in self.diagnostics)
