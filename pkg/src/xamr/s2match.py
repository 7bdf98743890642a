"""S2MATCH: Smatch with graded credit for similar concepts.

Instance and ``top`` triples of an aligned variable pair earn the cosine
similarity of the two concepts when it reaches the threshold ``tau``;
every other triple stays binary. Grading of ``top`` can be switched off. Concept vectors come from a GloVe-style
word vector file.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from .smatch import MatchResult, Scorable, SearchConfig, align, as_triples

_SENSE_RE = re.compile(r"-\d+$")


class EmbeddingFormatError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class EmbeddingTable:
    """Token to unit-length vector lookup. Immutable after construction."""

    dimension: int
    vectors: Mapping[str, np.ndarray] = field(repr=False)

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be positive")
        normed = {}
        for token, vec in self.vectors.items():
            vec = np.asarray(vec, dtype=np.float64)
            if vec.shape != (self.dimension,):
                raise ValueError(f"vector for {token!r} has shape {vec.shape}")
            norm = np.linalg.norm(vec)
            if norm == 0:
                raise ValueError(f"zero vector for {token!r}")
            vec = vec / norm
            vec.setflags(write=False)
            normed[token] = vec
        object.__setattr__(self, "vectors", normed)

    def __len__(self):
        return len(self.vectors)

    def __contains__(self, token):
        return token in self.vectors

    def get(self, token: str) -> np.ndarray | None:
        return self.vectors.get(token)


def load_embeddings(path: str | Path) -> EmbeddingTable:
    """Read ``token v1 ... vD`` lines, with an optional ``N D`` header.

    Vectors are L2-normalized; a repeated token keeps its first vector.
    """
    vectors: dict[str, np.ndarray] = {}
    dim = None
    with open(path, encoding="utf-8") as f:
        for n, line in enumerate(f, start=1):
            fields = line.split()
            if not fields:
                continue
            if n == 1 and len(fields) == 2 and all(x.isdigit() for x in fields):
                dim = int(fields[1])
                continue
            token, values = fields[0], fields[1:]
            if not values:
                raise EmbeddingFormatError(f"line {n}: token {token!r} has no vector")
            if dim is None:
                dim = len(values)
            elif len(values) != dim:
                raise EmbeddingFormatError(
                    f"line {n}: expected {dim} values, found {len(values)}"
                )
            if token in vectors:
                continue
            try:
                vec = np.array([float(v) for v in values])
            except ValueError as e:
                raise EmbeddingFormatError(f"line {n}: {e}") from None
            if not np.all(np.isfinite(vec)) or not np.any(vec):
                raise EmbeddingFormatError(f"line {n}: vector must be finite and non-zero")
            vectors[token] = vec
    if dim is None:
        raise EmbeddingFormatError(f"{path}: no vectors")
    return EmbeddingTable(dim, vectors)


def concept_vector(label: str, table: EmbeddingTable) -> np.ndarray | None:
    """Mean vector of a concept's words: sense suffix dropped, split on hyphens.

    None if any word is missing from the table.
    """
    words = [w for w in _SENSE_RE.sub("", label.lower()).split("-") if w]
    if not words:
        return None
    vecs = []
    for w in words:
        v = table.get(w)
        if v is None:
            return None
        vecs.append(v)
    return np.mean(vecs, axis=0)


def concept_similarity(a: str, b: str, table: EmbeddingTable, tau: float) -> float:
    if a == b:
        return 1.0
    va, vb = concept_vector(a, table), concept_vector(b, table)
    if va is None or vb is None:
        return 0.0
    na, nb = np.linalg.norm(va), np.linalg.norm(vb)
    if na == 0 or nb == 0:
        return 0.0
    cos = min(1.0, float(np.dot(va, vb) / (na * nb)))
    return cos if cos >= tau else 0.0


@dataclass(frozen=True)
class S2Config:
    tau: float = 0.5
    search: SearchConfig = field(default_factory=SearchConfig)
    # grade the virtual top triple like an instance triple; off means exact match
    grade_top: bool = True

    def __post_init__(self):
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError("tau must lie in [0, 1]")


class _CachedSimilarity:
    def __init__(self, table: EmbeddingTable, tau: float):
        self.table = table
        self.tau = tau
        self.cache: dict[tuple[str, str], float] = {}

    def __call__(self, a: str, b: str) -> float:
        key = (a, b) if a <= b else (b, a)
        hit = self.cache.get(key)
        if hit is None:
            hit = self.cache[key] = concept_similarity(key[0], key[1], self.table, self.tau)
        return hit


def similarity_function(table: EmbeddingTable, tau: float):
    """Memoized symmetric ``concept_similarity`` bound to a table and tau."""
    return _CachedSimilarity(table, tau)


def s2match_score(
    gold: Scorable, pred: Scorable, table: EmbeddingTable, cfg: S2Config = S2Config()
) -> MatchResult:
    """Graded alignment score; ``matched`` may be fractional."""
    return align(
        as_triples(gold),
        as_triples(pred),
        cfg.search,
        similarity_function(table, cfg.tau),
        cfg.grade_top,
    )


@dataclass(frozen=True)
class S2Metric:
    """Picklable graded scorer, the counterpart of ``SmatchMetric``."""

    table: EmbeddingTable
    cfg: S2Config = field(default_factory=S2Config)

    def __call__(self, gold: Scorable, pred: Scorable) -> MatchResult:
        return s2match_score(gold, pred, self.table, self.cfg)
