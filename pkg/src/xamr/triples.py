"""Normalized triple bags, the unit that alignment scoring compares."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .penman import AmrGraph

INSTANCE = "instance"
ATTRIBUTE = "attribute"
RELATION = "relation"
KINDS = (INSTANCE, ATTRIBUTE, RELATION)

TOP = "top"


class Triple(NamedTuple):
    kind: str
    relation: str
    source: str
    target: str

    @property
    def is_top(self) -> bool:
        return self.kind == ATTRIBUTE and self.relation == TOP

    def dump(self) -> str:
        return f"{self.kind}({self.relation}, {self.source}, {self.target})"


@dataclass(frozen=True)
class TripleSet:
    """A multiset of triples plus the variables it mentions.

    ``variables`` is ordered by first appearance, which fixes the iteration
    order used by the alignment search. Sets built by :func:`to_triples`
    hold exactly one ``top`` triple; aspect views may hold none.
    """

    triples: tuple[Triple, ...]
    variables: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "triples", tuple(Triple(*t) for t in self.triples))
        known = set(self.variables)
        if len(known) != len(self.variables):
            raise ValueError("duplicate variables in TripleSet")
        for t in self.triples:
            if t.kind not in KINDS:
                raise ValueError(f"unknown triple kind {t.kind!r}")
            if t.source not in known or (t.kind == RELATION and t.target not in known):
                raise ValueError(f"triple {t} mentions an unknown variable")

    @classmethod
    def from_triples(cls, triples: Iterable[Triple]) -> "TripleSet":
        """Build a set whose variables are exactly those its triples mention."""
        triples = tuple(Triple(*t) for t in triples)
        seen: dict[str, None] = {}
        for t in triples:
            seen.setdefault(t.source)
            if t.kind == RELATION:
                seen.setdefault(t.target)
        return cls(triples, tuple(seen))

    def __len__(self):
        return len(self.triples)

    def __iter__(self):
        return iter(self.triples)

    def of_kind(self, kind: str) -> list[Triple]:
        return [t for t in self.triples if t.kind == kind]

    def rename(self, mapping) -> "TripleSet":
        m = lambda v: mapping.get(v, v)
        return TripleSet(
            tuple(
                Triple(t.kind, t.relation, m(t.source), m(t.target) if t.kind == RELATION else t.target)
                for t in self.triples
            ),
            tuple(m(v) for v in self.variables),
        )

    def dump(self) -> str:
        """One ``kind(relation, source, target)`` line per triple, sorted."""
        return "\n".join(sorted(t.dump() for t in self.triples))


def to_triples(graph: AmrGraph) -> TripleSet:
    """Expand a graph into instance, attribute, relation and ``top`` triples.

    Concepts, constants and roles are lowercased; variables are kept as is.
    """
    triples = [Triple(INSTANCE, INSTANCE, v, c.lower()) for v, c in graph.nodes.items()]
    triples.append(Triple(ATTRIBUTE, TOP, graph.root, graph.nodes[graph.root].lower()))
    for s, r, c in graph.attributes:
        triples.append(Triple(ATTRIBUTE, r.lower(), s, c.value.lower()))
    for s, r, t in graph.edges:
        triples.append(Triple(RELATION, r.lower(), s, t))
    return TripleSet(tuple(triples), tuple(graph.nodes))
