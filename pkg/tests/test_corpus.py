from __future__ import annotations

import pytest

from xamr.corpus import CorpusError, parse_corpus, read_corpus, write_corpus

TEXT = """\
# a file header comment

# ::id one
# ::snt The boy left.
(l / leave-11 :ARG0 (b / boy))

# ::id two
(x / broken :ARG0 (y

(d / dog)
"""


def test_lenient_mode_skips_and_reports():
    errors = []
    entries = parse_corpus(TEXT, errors=errors)
    assert [e.id for e in entries] == ["one", "line:10"]
    assert entries[0].sentence == "The boy left."
    assert entries[1].synthetic_id
    assert len(errors) == 1 and errors[0].entry_id == "two"
    assert errors[0].line == 7


def test_strict_mode_raises_naming_the_entry():
    with pytest.raises(CorpusError, match="^two "):
        parse_corpus(TEXT, strict=True)


def test_duplicate_ids():
    text = "# ::id a\n(x / y)\n\n# ::id a\n(z / w)\n"
    with pytest.raises(CorpusError, match="duplicate"):
        parse_corpus(text, strict=True)
    assert len(parse_corpus(text)) == 1


def test_write_then_read(tmp_path, golden_path):
    entries = read_corpus(golden_path, strict=True)
    out = tmp_path / "copy.amr"
    write_corpus(entries, out)
    again = read_corpus(out, strict=True)
    assert [(e.id, e.graph, e.sentence) for e in again] == [
        (e.id, e.graph, e.sentence) for e in entries
    ]


def test_two_blocks_and_empty_file():
    text = "# ::id a\n(x / y)\n\n# ::id b\n(z / w)\n"
    assert [e.id for e in parse_corpus(text)] == ["a", "b"]
    assert parse_corpus("") == []
