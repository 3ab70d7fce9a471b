"""Expressiveness accounting: narrative vs non-narrative lines.

The reported counts follow the convention of breaking each sentence of
narrative prose onto its own line, classifying every line, and ignoring
whitespace. The reduction metric is one minus the source's non-narrative
line count divided by a baseline's non-narrative line count.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .diagnostics import CompileError
from .parser import HEADER_RE, KEY_LINE_RE, parse
from .source import SourceDocument

NARRATIVE = "narrative"
NON_NARRATIVE = "nonNarrative"
BLANK = "blank"

# terminators inside these endings do not end a sentence
ABBREVIATIONS = ("e.g.", "i.e.", "vs.", "et al.", "Dr.", "Fig.")

_TERMINATOR_RE = re.compile(r"[.!?]+(?=\s|$)")


@dataclass(frozen=True)
class ExpressivenessReport:
    narrative_loc: int
    non_narrative_loc: int
    total_loc: int
    pct_narrative: float
    reduction: float | None = None

    def as_dict(self) -> dict:
        data = {
            "narrativeLoc": self.narrative_loc,
            "nonNarrativeLoc": self.non_narrative_loc,
            "totalLoc": self.total_loc,
            "pctNarrative": round(self.pct_narrative, 4),
        }
        if self.reduction is not None:
            data["reduction"] = round(self.reduction, 4)
        return data

    @classmethod
    def from_counts(
        cls,
        narrative: int,
        non_narrative: int,
        baseline_non_narrative: int | None = None,
    ) -> "ExpressivenessReport":
        total = narrative + non_narrative
        reduction = None
        if baseline_non_narrative is not None:
            reduction = compute_reduction(non_narrative, baseline_non_narrative)
        return cls(
            narrative_loc=narrative,
            non_narrative_loc=non_narrative,
            total_loc=total,
            pct_narrative=narrative / total if total else 0.0,
            reduction=reduction,
        )


class LineClassifier:
    """Streaming line classifier mirroring the parser's region rules."""

    def __init__(self) -> None:
        self.index = 0
        self.in_front_matter = False
        self.in_config = False

    def feed(self, line: str) -> str:
        self.index += 1
        stripped = line.strip()

        if self.index == 1 and stripped == "---":
            self.in_front_matter = True
            return NON_NARRATIVE
        if self.in_front_matter:
            if stripped == "---":
                self.in_front_matter = False
                return NON_NARRATIVE
            return BLANK if not stripped else NON_NARRATIVE

        if not stripped:
            self.in_config = False
            return BLANK
        if HEADER_RE.match(stripped):
            self.in_config = True
            return NON_NARRATIVE
        if self.in_config:
            if line[0] in " \t" or KEY_LINE_RE.match(stripped):
                return NON_NARRATIVE
            self.in_config = False
        return NARRATIVE


def classify_line(line: str, classifier: LineClassifier) -> str:
    return classifier.feed(line)


def classify_lines(text: str) -> list[str]:
    classifier = LineClassifier()
    return [classifier.feed(line) for line in text.split("\n")]


def split_sentences(text: str) -> list[str]:
    """Split prose on ., !, ? + whitespace, protecting common abbreviations."""
    sentences: list[str] = []
    start = 0
    for match in _TERMINATOR_RE.finditer(text):
        end = match.end()
        head = text[start:end]
        if any(head.endswith(abbr) for abbr in ABBREVIATIONS):
            continue
        sentence = head.strip()
        if sentence:
            sentences.append(sentence)
        start = end
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def first_sentence(text: str) -> str:
    sentences = split_sentences(text)
    return sentences[0] if sentences else text.strip()


def compute_reduction(source_non_narrative: int, baseline_non_narrative: int) -> float:
    """1 - source/baseline, the fraction of markup a baseline tool needed
    that this source does not."""
    if baseline_non_narrative <= 0:
        raise ValueError("baseline non-narrative line count must be positive")
    return 1 - source_non_narrative / baseline_non_narrative


def baseline_loc_of_directory(path: Path) -> int:
    """Count non-blank lines across a directory of generated markup."""
    total = 0
    for file in sorted(Path(path).rglob("*")):
        if not file.is_file():
            continue
        try:
            text = file.read_text(encoding="utf-8")
        except (UnicodeDecodeError, OSError):
            continue
        total += sum(1 for line in text.split("\n") if line.strip())
    return total


def stats(
    source: SourceDocument,
    baseline_non_narrative: int | None = None,
) -> ExpressivenessReport:
    """Sentence-split the prose, classify every line, and report counts."""
    result = parse(source)
    if not result.ok:
        raise CompileError(result.diagnostics, source.path)

    narrative = 0
    non_narrative = 0
    classifier = LineClassifier()
    for line in source.lines:
        category = classifier.feed(line)
        if category == NON_NARRATIVE:
            non_narrative += 1

    document = result.document
    paragraphs = [p.text for p in document.leading_text]
    for block in document.blocks:
        paragraphs.extend(p.text for p in block.paragraphs)
    for paragraph in paragraphs:
        narrative += len(split_sentences(paragraph))

    return ExpressivenessReport.from_counts(
        narrative, non_narrative, baseline_non_narrative
    )
