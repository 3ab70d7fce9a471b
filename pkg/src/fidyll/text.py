"""Inline text spans: emphasis, strong, links, literals."""
from __future__ import annotations

from dataclasses import dataclass, field

from .diagnostics import Diagnostics

LITERAL = "literal"
EMPHASIS = "emphasis"
STRONG = "strong"
LINK = "link"


@dataclass(frozen=True)
class TextSpan:
    kind: str
    text: str
    url: str | None = None


@dataclass(frozen=True)
class TextBlock:
    raw: str
    spans: tuple[TextSpan, ...]

    def plain(self) -> str:
        """Text content with formatting markers stripped."""
        return "".join(span.text for span in self.spans)


def parse_inline_text(
    paragraph: str,
    *,
    line: int = 1,
    diagnostics: Diagnostics | None = None,
) -> TextBlock:
    """Split a paragraph into minimal inline spans.

    Recognized markers: *emphasis*, **strong**, [text](url). Unclosed
    markers fall back to literal text with a warning.
    """
    spans: list[TextSpan] = []
    literal: list[str] = []

    def flush() -> None:
        if literal:
            spans.append(TextSpan(LITERAL, "".join(literal)))
            literal.clear()

    def warn(message: str, column: int) -> None:
        if diagnostics is not None:
            diagnostics.warning(message, line, column + 1)

    i = 0
    n = len(paragraph)
    while i < n:
        ch = paragraph[i]
        if ch == "*":
            if paragraph.startswith("**", i):
                close = paragraph.find("**", i + 2)
                if close > i + 2:
                    flush()
                    spans.append(TextSpan(STRONG, paragraph[i + 2 : close]))
                    i = close + 2
                    continue
                warn("unclosed '**' treated as literal text", i)
                literal.append("**")
                i += 2
                continue
            close = paragraph.find("*", i + 1)
            if close > i + 1:
                flush()
                spans.append(TextSpan(EMPHASIS, paragraph[i + 1 : close]))
                i = close + 1
                continue
            warn("unclosed '*' treated as literal text", i)
            literal.append("*")
            i += 1
            continue
        if ch == "[":
            end_text = paragraph.find("](", i + 1)
            if end_text != -1:
                end_url = paragraph.find(")", end_text + 2)
                if end_url != -1:
                    flush()
                    spans.append(
                        TextSpan(
                            LINK,
                            paragraph[i + 1 : end_text],
                            url=paragraph[end_text + 2 : end_url],
                        )
                    )
                    i = end_url + 1
                    continue
            warn("unclosed link treated as literal text", i)
            literal.append("[")
            i += 1
            continue
        literal.append(ch)
        i += 1
    flush()
    return TextBlock(raw=paragraph, spans=tuple(spans))
