"""Markup front end: front matter, block headers, config regions, paragraphs.

Grammar summary:
  - front matter sits between a leading `---` line and the next `---` line
  - a block starts at a line whose trimmed content is {scene}, {stage},
    or {conclusion}
  - the block's config region is the contiguous run of key/indented lines
    immediately after the header, terminated by the first blank line
  - remaining paragraphs until the next header belong to the block
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .diagnostics import Diagnostic, Diagnostics, Span
from .scalars import NUMBER_RE, markup_scalar
from .source import SourceDocument

BLOCK_KINDS = ("scene", "stage", "conclusion")
KEY_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_-]*$")
HEADER_RE = re.compile(r"^\{([A-Za-z_][A-Za-z0-9_-]*)\}$")
KEY_LINE_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_-]*)\s*:(.*)$")
UNQUOTE_RE = re.compile(r'\\(["\\])')
MAX_DEPTH = 3


def _escaped(text: str, i: int) -> bool:
    """True when text[i] sits behind an odd run of backslashes."""
    count = 0
    j = i - 1
    while j >= 0 and text[j] == "\\":
        count += 1
        j -= 1
    return count % 2 == 1


@dataclass
class ConfigEntry:
    key: str
    value: object  # scalar | list of scalars | ConfigTree
    line: int


ConfigTree = dict[str, ConfigEntry]


@dataclass
class RawParagraph:
    text: str
    span: Span


@dataclass
class RawBlock:
    kind: str
    config: ConfigTree
    paragraphs: list[RawParagraph]
    span: Span


@dataclass
class RawDocument:
    front_matter: ConfigTree = field(default_factory=dict)
    leading_text: list[RawParagraph] = field(default_factory=list)
    blocks: list[RawBlock] = field(default_factory=list)


@dataclass
class ParseResult:
    document: RawDocument | None
    diagnostics: list[Diagnostic]

    @property
    def ok(self) -> bool:
        return self.document is not None


def parse_scalar(token: str, line: int = 1, diagnostics: Diagnostics | None = None) -> object:
    """Interpret one trimmed value token as boolean, number, list, or string."""
    own = diagnostics if diagnostics is not None else Diagnostics()
    value = _parse_scalar(token.strip(), line, own)
    if diagnostics is None and own.has_errors:
        raise ValueError(own.errors[0].format())
    return value


def _parse_scalar(token: str, line: int, diagnostics: Diagnostics) -> object:
    if token == "true":
        return True
    if token == "false":
        return False
    if NUMBER_RE.match(token):
        return _parse_number(token)
    if token.startswith("["):
        return _parse_list(token, line, diagnostics)
    if token.startswith('"'):
        if (
            len(token) >= 2
            and token.endswith('"')
            and not _escaped(token, len(token) - 1)
        ):
            return UNQUOTE_RE.sub(r"\1", token[1:-1])
        diagnostics.error(f"unbalanced quotes in value {token!r}", line)
        return token
    return token


def _parse_number(token: str) -> int | float:
    if re.match(r"^[+-]?\d+$", token):
        return int(token)
    return float(token)


def _parse_list(token: str, line: int, diagnostics: Diagnostics) -> list:
    if not token.endswith("]"):
        diagnostics.error(f"unbalanced brackets in value {token!r}", line)
        return []
    inner = token[1:-1].strip()
    if not inner:
        return []
    items = []
    for part in _split_list_items(inner, line, diagnostics):
        element = _parse_scalar(part.strip(), line, diagnostics)
        if isinstance(element, list):
            diagnostics.error("nested lists are not supported", line)
            continue
        items.append(element)
    return items


def _split_list_items(inner: str, line: int, diagnostics: Diagnostics) -> list[str]:
    items: list[str] = []
    current: list[str] = []
    in_quote = False
    i = 0
    while i < len(inner):
        ch = inner[i]
        if ch == '"' and not _escaped(inner, i):
            in_quote = not in_quote
        if ch == "," and not in_quote:
            items.append("".join(current))
            current = []
        else:
            current.append(ch)
        i += 1
    items.append("".join(current))
    if in_quote:
        diagnostics.error("unbalanced quotes in list value", line)
    return items


def parse(source: SourceDocument) -> ParseResult:
    """Parse a source document into a raw block tree with diagnostics."""
    diagnostics = Diagnostics()
    document = RawDocument()
    lines = source.lines
    index = 0

    if lines and lines[0].strip() == "---":
        end = None
        for j in range(1, len(lines)):
            if lines[j].strip() == "---":
                end = j
                break
        if end is None:
            diagnostics.error("unterminated front matter: missing closing '---'", 1)
            return ParseResult(None, diagnostics.items)
        document.front_matter = _parse_keyvalue_region(
            lines, 1, end, diagnostics, skip_blank=True
        )
        index = end + 1

    current_block: RawBlock | None = None
    seen_scene = False
    seen_conclusion = False

    while index < len(lines):
        line = lines[index]
        stripped = line.strip()
        if not stripped:
            index += 1
            continue

        header = HEADER_RE.match(stripped)
        if header:
            kind = header.group(1)
            line_no = index + 1
            if kind not in BLOCK_KINDS:
                diagnostics.error(f"unknown block header {{{kind}}}", line_no)
                return ParseResult(None, diagnostics.items)
            if kind == "stage" and (not seen_scene or seen_conclusion):
                diagnostics.error("{stage} outside a scene", line_no)
                return ParseResult(None, diagnostics.items)
            if kind == "scene" and seen_conclusion:
                diagnostics.error("{scene} after {conclusion}", line_no)
                return ParseResult(None, diagnostics.items)
            if kind == "conclusion":
                if seen_conclusion:
                    diagnostics.error("duplicate {conclusion} block", line_no)
                    return ParseResult(None, diagnostics.items)
                seen_conclusion = True
            if kind == "scene":
                seen_scene = True

            config, index = _scan_config_region(lines, index + 1, diagnostics)
            current_block = RawBlock(
                kind=kind,
                config=config,
                paragraphs=[],
                span=Span(line_no, 1, index, 1),
            )
            document.blocks.append(current_block)
            continue

        paragraph, index = _scan_paragraph(lines, index)
        if current_block is None:
            document.leading_text.append(paragraph)
        else:
            current_block.paragraphs.append(paragraph)
            current_block.span = Span(
                current_block.span.start_line, 1, paragraph.span.end_line, 1
            )

    if diagnostics.has_errors:
        return ParseResult(None, diagnostics.items)
    return ParseResult(document, diagnostics.items)


def _scan_paragraph(lines: list[str], start: int) -> tuple[RawParagraph, int]:
    """Collect a run of non-blank lines into one soft-wrapped paragraph."""
    parts = []
    index = start
    while index < len(lines):
        stripped = lines[index].strip()
        if not stripped or HEADER_RE.match(stripped):
            break
        parts.append(stripped)
        index += 1
    span = Span(start + 1, 1, index, 1)
    return RawParagraph(text=" ".join(parts), span=span), index


def _scan_config_region(
    lines: list[str], start: int, diagnostics: Diagnostics
) -> tuple[ConfigTree, int]:
    """Collect key/indented lines after a header until the run ends."""
    end = start
    while end < len(lines):
        line = lines[end]
        stripped = line.strip()
        if not stripped:
            break
        if HEADER_RE.match(stripped):
            break
        indented = line[0] in " \t"
        if not indented and not KEY_LINE_RE.match(stripped):
            break
        end += 1
    return _parse_keyvalue_region(lines, start, end, diagnostics), end


def _parse_keyvalue_region(
    lines: list[str],
    start: int,
    end: int,
    diagnostics: Diagnostics,
    skip_blank: bool = False,
) -> ConfigTree:
    """Parse a run of `key: value` lines with 2-space nesting into a tree."""
    root: ConfigTree = {}
    # stack of (indent, tree) for open nesting levels
    stack: list[tuple[int, ConfigTree]] = [(0, root)]
    pending: ConfigEntry | None = None

    for index in range(start, end):
        line = lines[index]
        line_no = index + 1
        if not line.strip():
            if skip_blank:
                continue
            break
        leading = line[: len(line) - len(line.lstrip())]
        if "\t" in leading:
            diagnostics.error("tabs are not allowed in config regions", line_no)
            continue
        indent = len(leading)
        if indent % 2 != 0:
            diagnostics.error(
                f"indentation must use 2-space steps, found {indent} spaces", line_no
            )
            continue
        depth = indent // 2

        if pending is not None and indent > stack[-1][0]:
            if indent != stack[-1][0] + 2:
                diagnostics.error(
                    f"over-indented line under {pending.key!r}", line_no
                )
                continue
            if depth >= MAX_DEPTH:
                diagnostics.error(
                    f"nesting under {pending.key!r} exceeds {MAX_DEPTH} levels", line_no
                )
                continue
            child: ConfigTree = {}
            pending.value = child
            stack.append((indent, child))
            pending = None
        while indent < stack[-1][0]:
            stack.pop()
        if indent != stack[-1][0]:
            diagnostics.error("misaligned indentation in config region", line_no)
            continue
        if pending is not None:
            pending = None

        match = KEY_LINE_RE.match(line.strip())
        if not match:
            diagnostics.error(f"expected 'key: value', found {line.strip()!r}", line_no)
            continue
        key, raw_value = match.group(1), match.group(2).strip()
        tree = stack[-1][1]
        if key in tree:
            diagnostics.error(f"duplicate key {key!r} in config region", line_no)
            continue
        entry = ConfigEntry(key=key, value="", line=line_no)
        tree[key] = entry
        if raw_value:
            entry.value = _parse_scalar(raw_value, line_no, diagnostics)
        else:
            # bare `key:` opens a nested tree if deeper lines follow
            pending = entry
    return root


def to_markup(document: RawDocument) -> str:
    """Serialize a raw document back to canonical markup."""
    out: list[str] = []
    if document.front_matter:
        out.append("---")
        out.extend(_tree_lines(document.front_matter, 0))
        out.append("---")
        out.append("")
    for paragraph in document.leading_text:
        out.append(paragraph.text)
        out.append("")
    for block in document.blocks:
        out.append("{%s}" % block.kind)
        out.extend(_tree_lines(block.config, 0))
        out.append("")
        for paragraph in block.paragraphs:
            out.append(paragraph.text)
            out.append("")
    while out and not out[-1]:
        out.pop()
    return "\n".join(out) + "\n" if out else ""


def _tree_lines(tree: ConfigTree, depth: int) -> list[str]:
    lines = []
    pad = "  " * depth
    for entry in tree.values():
        if isinstance(entry.value, dict):
            lines.append(f"{pad}{entry.key}:")
            lines.extend(_tree_lines(entry.value, depth + 1))
        else:
            lines.append(f"{pad}{entry.key}: {markup_scalar(entry.value)}")
    return lines


def config_value(tree: ConfigTree, key: str) -> object | None:
    entry = tree.get(key)
    return entry.value if entry is not None else None
