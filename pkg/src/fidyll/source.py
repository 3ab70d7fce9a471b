"""Source file handling: newline normalization and the 1-based line table."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path


@dataclass
class SourceDocument:
    path: str
    text: str
    lines: list[str] = field(default_factory=list)

    @classmethod
    def from_text(cls, text: str, path: str = "<string>") -> "SourceDocument":
        normalized = text.replace("\r\n", "\n").replace("\r", "\n")
        if normalized.startswith("﻿"):
            normalized = normalized[1:]
        doc = cls(path=path, text=normalized, lines=normalized.split("\n"))
        assert "\n".join(doc.lines) == doc.text
        return doc

    @classmethod
    def from_path(cls, path: str | Path) -> "SourceDocument":
        p = Path(path)
        return cls.from_text(p.read_text(encoding="utf-8"), path=str(p))

    def line(self, number: int) -> str:
        """Return the 1-based source line."""
        return self.lines[number - 1]
