"""Seeded random AMR graphs for property and oracle tests."""

from __future__ import annotations

import random

from xamr.penman import AmrGraph, Attribute, Constant, Edge

CONCEPTS = ["want-01", "boy", "girl", "go-02", "believe-01", "city", "dog", "cat"]
ROLES = ["ARG0", "ARG1", "ARG2", "mod", "location"]
ATTRS = [("polarity", Constant("-")), ("quant", Constant("2", "number")), ("mode", Constant("imperative"))]


def random_graph(
    rng: random.Random,
    n_vars: int,
    concepts=CONCEPTS,
    roles=ROLES,
    extra_edges: float = 0.4,
    attr_rate: float = 0.25,
    prefix: str = "v",
) -> AmrGraph:
    """A connected graph: random spanning tree plus extra (re-entrant) edges."""
    names = [f"{prefix}{i}" for i in range(n_vars)]
    nodes = {v: rng.choice(concepts) for v in names}
    edges = []
    for i in range(1, n_vars):
        parent = names[rng.randrange(i)]
        if rng.random() < 0.2:
            edges.append(Edge(names[i], rng.choice(roles), parent))
        else:
            edges.append(Edge(parent, rng.choice(roles), names[i]))
    for _ in range(int(extra_edges * n_vars)):
        s, t = rng.choice(names), rng.choice(names)
        edges.append(Edge(s, rng.choice(roles), t))
    attributes = [
        Attribute(v, *rng.choice(ATTRS)) for v in names if rng.random() < attr_rate
    ]
    return AmrGraph(names[0], nodes, tuple(edges), tuple(attributes))


def random_pair(rng: random.Random, max_vars: int = 6, min_vars: int = 1):
    a = random_graph(rng, rng.randint(min_vars, max_vars), prefix="a")
    b = random_graph(rng, rng.randint(min_vars, max_vars), prefix="b")
    return a, b


def perturb(rng: random.Random, graph: AmrGraph, prefix: str = "p") -> AmrGraph:
    """A renamed, lightly edited copy: the kind of pair a parser produces."""
    names = {v: f"{prefix}{i}" for i, v in enumerate(graph.nodes)}
    g = graph.rename(names)
    nodes = dict(g.nodes)
    for v in nodes:
        if rng.random() < 0.2:
            nodes[v] = rng.choice(CONCEPTS)
    edges = [Edge(s, rng.choice(ROLES) if rng.random() < 0.2 else r, t) for s, r, t in g.edges]
    attributes = [a for a in g.attributes if rng.random() > 0.3]
    return AmrGraph(g.root, nodes, tuple(edges), tuple(attributes))
