"""Reading and writing metadata-annotated AMR corpus files.

A corpus file is UTF-8 text with entries separated by blank lines. Comment
lines ``# ::id <token>`` and ``# ::snt <text>`` carry metadata; other ``#``
lines are ignored and the remaining lines form one Penman expression.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from .penman import AmrGraph, PenmanError, parse_penman, serialize_penman

log = logging.getLogger(__name__)


class CorpusError(ValueError):
    """A corpus block could not be read."""

    def __init__(self, entry_id: str, line: int, message: str):
        self.entry_id = entry_id
        self.line = line
        super().__init__(f"{entry_id} (line {line}): {message}")


@dataclass(frozen=True)
class CorpusEntry:
    id: str
    graph: AmrGraph
    sentence: str | None = None
    # True when the block had no ``# ::id`` line and ``id`` is ``line:<N>``
    synthetic_id: bool = False


@dataclass
class RawBlock:
    line: int
    id: str | None
    sentence: str | None
    penman: str


def iter_blocks(text: str) -> Iterator[RawBlock]:
    """Split corpus text into raw blocks; comment-only blocks are dropped."""
    lines = text.splitlines()
    start = None
    chunk: list[str] = []
    for n, line in enumerate(lines + [""], start=1):
        if line.strip():
            if start is None:
                start = n
            chunk.append(line)
            continue
        if chunk:
            block = _make_block(start, chunk)
            if block is not None:
                yield block
        start, chunk = None, []


def _make_block(start: int, chunk: list[str]) -> RawBlock | None:
    entry_id = sentence = None
    body = []
    for line in chunk:
        stripped = line.lstrip()
        if stripped.startswith("#"):
            meta = stripped[1:].strip()
            if meta.startswith("::id ") and entry_id is None:
                fields = meta[5:].split()
                entry_id = fields[0] if fields else None
            elif meta.startswith("::snt ") or meta == "::snt":
                sentence = meta[6:].strip()
        else:
            body.append(line)
    if not body:
        return None
    return RawBlock(start, entry_id, sentence, "\n".join(body))


def parse_corpus(
    text: str, strict: bool = False, errors: list[CorpusError] | None = None
) -> list[CorpusEntry]:
    """Parse corpus text. See :func:`read_corpus`."""
    entries: list[CorpusEntry] = []
    seen: set[str] = set()
    for block in iter_blocks(text):
        entry_id = block.id or f"line:{block.line}"
        try:
            if entry_id in seen:
                raise CorpusError(entry_id, block.line, "duplicate entry id")
            try:
                graph = parse_penman(block.penman)
            except PenmanError as e:
                raise CorpusError(entry_id, block.line, str(e)) from e
        except CorpusError as e:
            if strict:
                raise
            log.warning("skipping entry %s", e)
            if errors is not None:
                errors.append(e)
            continue
        seen.add(entry_id)
        entries.append(CorpusEntry(entry_id, graph, block.sentence, block.id is None))
    return entries


def read_corpus(
    path: str | Path, strict: bool = False, errors: list[CorpusError] | None = None
) -> list[CorpusEntry]:
    """Read an AMR corpus file, entries in file order.

    Blocks that fail to parse (or repeat an id) raise :class:`CorpusError`
    when ``strict``; otherwise they are logged, appended to ``errors`` if
    given, and skipped.
    """
    return parse_corpus(Path(path).read_text(encoding="utf-8"), strict, errors)


def format_entry(entry: CorpusEntry) -> str:
    out = [f"# ::id {entry.id}"]
    if entry.sentence is not None:
        out.append(f"# ::snt {' '.join(entry.sentence.split())}")
    out.append(serialize_penman(entry.graph))
    return "\n".join(out) + "\n\n"


def write_corpus(entries: Iterable[CorpusEntry], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for entry in entries:
            f.write(format_entry(entry))
