"""Cross-lingual consistency: one system's outputs for language X scored
against its own outputs for language Y on a parallel corpus."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .corpus import CorpusEntry
from .smatch import MatchResult, SearchConfig, SmatchMetric, corpus_score
from .subscores import ASPECTS, Aspect, ViewMetric, aspect_view
from .triples import to_triples


class AlignmentError(ValueError):
    """Parallel outputs cannot be paired entry by entry."""


@dataclass(frozen=True)
class LanguageOutputs:
    language: str
    entries: tuple[CorpusEntry, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))


def align_outputs(outputs: Sequence[LanguageOutputs]) -> list[list[CorpusEntry]]:
    """Entries of every language in a common order.

    Pairs by ``::id`` when every entry carries one, otherwise by position.
    """
    if len(outputs) < 2:
        raise AlignmentError("consistency needs at least two languages")
    langs = [o.language for o in outputs]
    if len(set(langs)) != len(langs):
        raise AlignmentError(f"duplicate language tags: {langs}")
    first = outputs[0]
    counts = {o.language: len(o.entries) for o in outputs}
    if len(set(counts.values())) != 1:
        raise AlignmentError(f"entry counts differ across languages: {counts}")
    if all(not e.synthetic_id for o in outputs for e in o.entries):
        order = [e.id for e in first.entries]
        aligned = []
        for o in outputs:
            by_id = {e.id: e for e in o.entries}
            missing = [i for i in order if i not in by_id]
            if missing:
                raise AlignmentError(
                    f"{o.language}: ids not found in {first.language} order: {missing[:5]}"
                )
            aligned.append([by_id[i] for i in order])
        return aligned
    return [list(o.entries) for o in outputs]


@dataclass(frozen=True)
class ConsistencyMatrix:
    """Symmetric score matrix; cell (X, Y) treats X's graphs as predictions.

    F1 is symmetric, and precision of (X, Y) is recall of (Y, X).
    """

    languages: tuple[str, ...]
    cells: Mapping[tuple[str, str], MatchResult]

    def __getitem__(self, key: tuple[str, str]) -> MatchResult:
        return self.cells[key]

    def pairs(self) -> list[tuple[str, str]]:
        """Unordered language pairs in input order."""
        langs = self.languages
        return [(langs[i], langs[j]) for i in range(len(langs)) for j in range(i + 1, len(langs))]


def _self_result(graphs, aspect: Aspect | None) -> MatchResult:
    total = 0
    for g in graphs:
        ts = to_triples(g)
        total += len(ts if aspect is None else aspect_view(ts, aspect))
    return MatchResult(Fraction(total), total, total, exact=True, pairs=len(graphs))


def consistency_matrix(
    outputs: Sequence[LanguageOutputs],
    metric=None,
    cfg: SearchConfig = SearchConfig(),
    *,
    aspect: Aspect | None = None,
    jobs: int = 1,
) -> ConsistencyMatrix:
    """Corpus-level score for every language pair; diagonal is 1 by definition."""
    aligned = align_outputs(outputs)
    metric = metric or SmatchMetric(cfg)
    if aspect is not None:
        metric = ViewMetric(metric, aspect)
    langs = tuple(o.language for o in outputs)
    graphs = [[e.graph for e in entries] for entries in aligned]
    cells: dict[tuple[str, str], MatchResult] = {}
    for i, x in enumerate(langs):
        cells[(x, x)] = _self_result(graphs[i], aspect)
        for j in range(i + 1, len(langs)):
            y = langs[j]
            result = corpus_score(list(zip(graphs[j], graphs[i])), cfg, metric=metric, jobs=jobs)
            cells[(x, y)] = result
            cells[(y, x)] = result.transposed()
    return ConsistencyMatrix(langs, cells)


def breakdown_consistency(
    outputs: Sequence[LanguageOutputs],
    metric=None,
    cfg: SearchConfig = SearchConfig(),
    *,
    jobs: int = 1,
) -> dict[Aspect | None, ConsistencyMatrix]:
    """Consistency matrices for the overall metric (key None) and each aspect."""
    out = {None: consistency_matrix(outputs, metric, cfg, jobs=jobs)}
    for a in ASPECTS:
        out[a] = consistency_matrix(outputs, metric, cfg, aspect=a, jobs=jobs)
    return out
