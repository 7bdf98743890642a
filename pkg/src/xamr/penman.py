"""Penman notation: AMR graph model, parser and serializer.

Graphs are stored in a normalized form: inverse roles such as ``:ARG0-of``
become forward edges with swapped endpoints, role labels lose their leading
colon, and re-entrant variable references become plain edges.

    >>> g = parse_penman("(w / want-01 :ARG0 (b / boy))")
    >>> g.root, dict(g.nodes), g.edges
    ('w', {'w': 'want-01', 'b': 'boy'}, (Edge(source='w', role='ARG0', target='b'),))
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, NamedTuple

__all__ = [
    "AmrGraph",
    "Attribute",
    "Constant",
    "Edge",
    "PenmanError",
    "is_inverse_role",
    "invert_role",
    "parse_penman",
    "serialize_penman",
]

_NUMBER_RE = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")
# Bare tokens of this shape are treated as variable references; anything
# else that is not a defined variable becomes a symbol constant.
_VARIABLE_SHAPE_RE = re.compile(r"^[A-Za-z]\d*$")
_PREP_OF_RE = re.compile(r"^prep-.+-of$")

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<lparen>\()
  | (?P<rparen>\))
  | (?P<slash>/)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<role>:[^\s()"/]*)
  | (?P<symbol>[^\s()"/:]+)
  | (?P<bad>.)
    """,
    re.VERBOSE | re.DOTALL,
)


class PenmanError(ValueError):
    """Syntax or structural error in a Penman expression."""

    def __init__(self, message: str, text: str = "", position: int | None = None):
        self.message = message
        self.position = position
        if position is not None:
            self.line = text.count("\n", 0, position) + 1
            self.column = position - (text.rfind("\n", 0, position) + 1) + 1
            message = f"line {self.line}, column {self.column}: {message}"
        else:
            self.line = self.column = None
        super().__init__(message)


@dataclass(frozen=True)
class Constant:
    """An attribute value. ``kind`` is one of ``string``, ``number``, ``symbol``."""

    value: str
    kind: str = "symbol"

    @classmethod
    def from_token(cls, token: str) -> "Constant":
        if token.startswith('"'):
            return cls(_unescape(token[1:-1]), "string")
        if _NUMBER_RE.match(token):
            return cls(token, "number")
        return cls(token, "symbol")

    def to_token(self) -> str:
        if self.kind == "string":
            return '"' + self.value.replace("\\", "\\\\").replace('"', '\\"') + '"'
        return self.value


class Edge(NamedTuple):
    source: str
    role: str
    target: str


class Attribute(NamedTuple):
    source: str
    role: str
    value: Constant


def is_inverse_role(role: str) -> bool:
    """True if ``role`` (without colon) is an inverse role to be normalized.

    ``consist-of`` and ``prep-X-of`` are genuine roles, not inverses. A
    role ending in ``-of-of`` is always the inverse of an ``-of`` role.
    """
    low = role.lower()
    if not low.endswith("-of") or low == "-of":
        return False
    if low.endswith("-of-of"):
        return True
    return not (low == "consist-of" or _PREP_OF_RE.match(low))


def invert_role(role: str) -> str:
    """Map a role to the label of the same relation seen from its target."""
    if is_inverse_role(role):
        return role[:-3]
    return role + "-of"


@dataclass(frozen=True, eq=False)
class AmrGraph:
    """Rooted, labeled, connected directed graph.

    ``nodes`` maps variable to concept in introduction order. Instances are
    treated as immutable; build a new graph rather than editing one.
    Equality ignores the order of nodes, edges and attributes.
    """

    root: str
    nodes: Mapping[str, str]
    edges: tuple[Edge, ...] = ()
    attributes: tuple[Attribute, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "nodes", dict(self.nodes))
        object.__setattr__(self, "edges", tuple(Edge(*e) for e in self.edges))
        object.__setattr__(
            self,
            "attributes",
            tuple(
                Attribute(s, r, v if isinstance(v, Constant) else Constant.from_token(str(v)))
                for s, r, v in self.attributes
            ),
        )
        self.validate()

    def validate(self) -> None:
        if self.root not in self.nodes:
            raise ValueError(f"root {self.root!r} is not a node")
        for e in self.edges:
            for v in (e.source, e.target):
                if v not in self.nodes:
                    raise ValueError(f"edge {e} references unknown variable {v!r}")
        for a in self.attributes:
            if a.source not in self.nodes:
                raise ValueError(f"attribute {a} references unknown variable {a.source!r}")
        seen = {self.root}
        stack = [self.root]
        adjacent: dict[str, list[str]] = {v: [] for v in self.nodes}
        for s, _, t in self.edges:
            adjacent[s].append(t)
            adjacent[t].append(s)
        while stack:
            for nxt in adjacent[stack.pop()]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        if len(seen) != len(self.nodes):
            missing = sorted(set(self.nodes) - seen)
            raise ValueError(f"graph is not connected; unreachable: {missing}")

    def _key(self):
        return (
            self.root,
            frozenset(self.nodes.items()),
            frozenset(Counter(self.edges).items()),
            frozenset(Counter(self.attributes).items()),
        )

    def __eq__(self, other):
        if not isinstance(other, AmrGraph):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(self.nodes)

    def rename(self, mapping: Mapping[str, str]) -> "AmrGraph":
        """Return a copy with variables renamed (unmapped ones kept)."""
        m = lambda v: mapping.get(v, v)
        return AmrGraph(
            m(self.root),
            {m(v): c for v, c in self.nodes.items()},
            tuple(Edge(m(s), r, m(t)) for s, r, t in self.edges),
            tuple(Attribute(m(s), r, c) for s, r, c in self.attributes),
        )

    def __str__(self):
        return serialize_penman(self)


def _unescape(s: str) -> str:
    return re.sub(r"\\(.)", r"\1", s)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    for m in _TOKEN_RE.finditer(text):
        kind = m.lastgroup
        if kind == "ws":
            continue
        if kind == "bad":
            if m.group() == '"':
                raise PenmanError("unterminated string literal", text, m.start())
            raise PenmanError(f"unexpected character {m.group()!r}", text, m.start())
        tokens.append((kind, m.group(), m.start()))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.nodes: dict[str, str] = {}
        self.edges: list[Edge] = []
        self.attributes: list[Attribute] = []
        # (source, role, token, position) whose target is resolved at the end
        self.pending: list[tuple[str, str, str, int]] = []

    def error(self, message: str, position: int | None = None) -> PenmanError:
        if position is None:
            position = self.tokens[self.i][2] if self.i < len(self.tokens) else len(self.text)
        return PenmanError(message, self.text, position)

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def expect(self, kind: str, what: str):
        tok = self.peek()
        if tok is None:
            raise self.error(f"unexpected end of input, expected {what}")
        if tok[0] != kind:
            raise self.error(f"expected {what}, found {tok[1]!r}")
        self.i += 1
        return tok

    def parse(self) -> AmrGraph:
        if not self.tokens:
            raise self.error("empty input")
        root = self.node()
        if self.i < len(self.tokens):
            tok = self.tokens[self.i]
            if tok[0] == "rparen":
                raise self.error("unbalanced parentheses: unexpected ')'")
            raise self.error(f"trailing content after graph: {tok[1]!r}")
        # bare symbols hold a slot in both lists until we know what they are
        for source, role, token, pos, edge_slot, attr_slot in self.pending:
            if token in self.nodes:
                self.edges[edge_slot] = self.make_edge(source, role, token)
            elif _VARIABLE_SHAPE_RE.match(token):
                raise self.error(f"reference to undefined variable {token!r}", pos)
            else:
                self.attributes[attr_slot] = Attribute(source, role, Constant.from_token(token))
        return AmrGraph(
            root,
            self.nodes,
            tuple(e for e in self.edges if e is not None),
            tuple(a for a in self.attributes if a is not None),
        )

    @staticmethod
    def make_edge(source: str, role: str, target: str) -> Edge:
        if is_inverse_role(role):
            return Edge(target, role[:-3], source)
        return Edge(source, role, target)

    def node(self) -> str:
        open_pos = self.expect("lparen", "'('")[2]
        tok = self.peek()
        if tok is None:
            raise self.error("unbalanced parentheses: missing ')'", open_pos)
        if tok[0] != "symbol":
            raise self.error(f"expected variable after '(', found {tok[1]!r}")
        var, var_pos = tok[1], tok[2]
        self.i += 1
        tok = self.peek()
        if tok is None or tok[0] != "slash":
            raise self.error(f"missing '/' after variable {var!r}")
        self.i += 1
        tok = self.peek()
        if tok is None:
            raise self.error("unbalanced parentheses: missing ')'", open_pos)
        if tok[0] == "symbol":
            concept = tok[1]
        elif tok[0] == "string":
            concept = _unescape(tok[1][1:-1])
        else:
            raise self.error(f"missing concept after '{var} /'")
        self.i += 1
        if var in self.nodes:
            raise self.error(f"duplicate definition of variable {var!r}", var_pos)
        self.nodes[var] = concept
        while True:
            tok = self.peek()
            if tok is None:
                raise self.error("unbalanced parentheses: missing ')'", open_pos)
            if tok[0] == "rparen":
                self.i += 1
                return var
            if tok[0] != "role":
                raise self.error(f"expected role or ')', found {tok[1]!r}")
            role = tok[1][1:]
            if not role:
                raise self.error("empty role label")
            self.i += 1
            self.target(var, role)

    def target(self, source: str, role: str):
        tok = self.peek()
        if tok is None:
            raise self.error(f"missing target for role ':{role}'")
        kind, value, pos = tok
        if kind == "lparen":
            # edges are kept in textual order, so reserve the slot first
            slot = len(self.edges)
            self.edges.append(None)
            self.edges[slot] = self.make_edge(source, role, self.node())
        elif kind == "string":
            self.i += 1
            self.attributes.append(Attribute(source, role, Constant.from_token(value)))
        elif kind == "symbol":
            self.i += 1
            self.pending.append((source, role, value, pos, len(self.edges), len(self.attributes)))
            self.edges.append(None)
            self.attributes.append(None)
        else:
            raise self.error(f"missing target for role ':{role}'")


def parse_penman(text: str) -> AmrGraph:
    """Parse a single Penman expression into a normalized :class:`AmrGraph`.

    Raises :class:`PenmanError` carrying the offending position.
    """
    return _Parser(text).parse()


def serialize_penman(graph: AmrGraph, indent: int | None = 4) -> str:
    """Serialize ``graph`` to Penman notation.

    Nodes are nested along a spanning tree built from forward edges first;
    a node reachable from the root only against edge direction is attached
    with an inverse role. Every other edge is written at its source as a
    bare variable reference. ``indent=None`` produces a single line.
    """
    outgoing: dict[str, list[int]] = {v: [] for v in graph.nodes}
    for k, (s, _, t) in enumerate(graph.edges):
        outgoing[s].append(k)
    attrs: dict[str, list[Attribute]] = {v: [] for v in graph.nodes}
    for a in graph.attributes:
        attrs[a.source].append(a)

    tree: set[int] = set()
    inverted: set[int] = set()
    inverse_children: dict[str, list[int]] = {v: [] for v in graph.nodes}
    visited = {graph.root}

    def grow(start: str):
        stack = [start]
        while stack:
            v = stack.pop()
            fresh = []
            for k in outgoing[v]:
                t = graph.edges[k].target
                if t not in visited:
                    visited.add(t)
                    tree.add(k)
                    fresh.append(t)
            stack.extend(reversed(fresh))

    def preorder() -> dict[str, int]:
        out: dict[str, int] = {}
        stack = [graph.root]
        while stack:
            v = stack.pop()
            out[v] = len(out)
            kids = [graph.edges[k].target for k in outgoing[v] if k in tree]
            kids += [graph.edges[k].source for k in inverse_children[v]]
            stack.extend(reversed(kids))
        return out

    grow(graph.root)
    while len(visited) < len(graph.nodes):
        # attach at the earliest written node; names break ties so that
        # re-serializing a parsed graph reproduces the same text
        position = preorder()
        k = min(
            (k for k, (s, _, t) in enumerate(graph.edges) if t in visited and s not in visited),
            key=lambda k: (position[graph.edges[k].target], graph.edges[k].source, graph.edges[k].role),
        )
        s, t = graph.edges[k].source, graph.edges[k].target
        visited.add(s)
        inverted.add(k)
        inverse_children[t].append(k)
        grow(s)

    def render(var: str, depth: int) -> str:
        branches: list[str] = []
        for k in outgoing[var]:
            if k in inverted:
                continue
            _, role, t = graph.edges[k]
            if k in tree:
                branches.append(f":{role} {render(t, depth + 1)}")
            else:
                branches.append(f":{role} {t}")
        for k in inverse_children[var]:
            s, role, _ = graph.edges[k]
            branches.append(f":{invert_role(role)} {render(s, depth + 1)}")
        for a in attrs[var]:
            branches.append(f":{a.role} {a.value.to_token()}")
        sep = " " if indent is None else "\n" + " " * (indent * (depth + 1))
        return f"({var} / {graph.nodes[var]}" + "".join(sep + b for b in branches) + ")"

    return render(graph.root, 0)
