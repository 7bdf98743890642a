"""Cross-lingual AMR parsing via translate+parse, with Smatch-family evaluation."""

__version__ = "0.1.0"

from .corpus import CorpusEntry, CorpusError, read_corpus, write_corpus
from .penman import AmrGraph, PenmanError, parse_penman, serialize_penman
from .s2match import EmbeddingTable, S2Config, concept_similarity, load_embeddings, s2match_score
from .smatch import (
    Alignment,
    MatchResult,
    SearchConfig,
    brute_force_score,
    corpus_score,
    smatch_score,
)
from .subscores import Aspect, BreakdownReport, aspect_view, breakdown
from .triples import Triple, TripleSet, to_triples

__all__ = [
    "Alignment",
    "AmrGraph",
    "Aspect",
    "BreakdownReport",
    "CorpusEntry",
    "CorpusError",
    "EmbeddingTable",
    "MatchResult",
    "PenmanError",
    "S2Config",
    "SearchConfig",
    "Triple",
    "TripleSet",
    "aspect_view",
    "breakdown",
    "brute_force_score",
    "concept_similarity",
    "corpus_score",
    "load_embeddings",
    "parse_penman",
    "read_corpus",
    "s2match_score",
    "serialize_penman",
    "smatch_score",
    "to_triples",
    "write_corpus",
]
