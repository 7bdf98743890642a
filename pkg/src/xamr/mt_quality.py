"""Translation quality: corpus BLEU and sentence-embedding cosine statistics."""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

_PUNCT_RE = re.compile(r'([.,!?;:"()])')


def tokenize(text: str) -> list[str]:
    """Lowercase, split off ``.,!?;:"()`` as tokens, split on whitespace."""
    return _PUNCT_RE.sub(r" \1 ", text.lower()).split()


@dataclass(frozen=True)
class SentencePair:
    hypothesis: tuple[str, ...]
    reference: tuple[str, ...]

    @classmethod
    def from_text(cls, hypothesis: str, reference: str) -> "SentencePair":
        return cls(tuple(tokenize(hypothesis)), tuple(tokenize(reference)))


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu_statistics(pairs: Iterable[SentencePair], max_n: int = 4):
    """Pooled (clipped matches, hypothesis n-gram count) per order, and c, r."""
    matches = [0] * max_n
    totals = [0] * max_n
    c = r = 0
    for pair in pairs:
        c += len(pair.hypothesis)
        r += len(pair.reference)
        for n in range(1, max_n + 1):
            hyp = _ngrams(pair.hypothesis, n)
            matches[n - 1] += sum((hyp & _ngrams(pair.reference, n)).values())
            totals[n - 1] += sum(hyp.values())
    return matches, totals, c, r


def corpus_bleu(pairs: Sequence[SentencePair], max_n: int = 4) -> float:
    """Unsmoothed corpus BLEU with uniform weights.

    Orders for which the whole hypothesis corpus has no n-grams are left
    out of the geometric mean (short corpora); any order with zero matches
    makes the score 0.
    """
    if not pairs:
        raise ValueError("BLEU needs a non-empty corpus")
    matches, totals, c, r = bleu_statistics(pairs, max_n)
    if c == 0:
        raise ValueError("BLEU undefined: the hypothesis corpus is empty")
    logs = []
    for m, t in zip(matches, totals):
        if t == 0:
            continue
        if m == 0:
            return 0.0
        logs.append(math.log(m / t))
    bp = 1.0 if c > r else math.exp(1 - r / c)
    return bp * math.exp(math.fsum(logs) / len(logs))


def load_sentence_embeddings(path: str | Path) -> np.ndarray:
    """One whitespace-separated vector per line; returns an (n, d) array."""
    rows = []
    with open(path, encoding="utf-8") as f:
        for n, line in enumerate(f, start=1):
            fields = line.split()
            if not fields:
                raise ValueError(f"{path}, line {n}: empty line")
            try:
                rows.append([float(x) for x in fields])
            except ValueError as e:
                raise ValueError(f"{path}, line {n}: {e}") from None
            if len(rows[-1]) != len(rows[0]):
                raise ValueError(
                    f"{path}, line {n}: expected {len(rows[0])} values, found {len(rows[-1])}"
                )
    if not rows:
        raise ValueError(f"{path}: no vectors")
    return np.array(rows, dtype=np.float64)


def pairwise_cosines(hyp: np.ndarray, ref: np.ndarray) -> np.ndarray:
    hyp, ref = np.atleast_2d(hyp), np.atleast_2d(ref)
    if hyp.shape[0] != ref.shape[0]:
        raise ValueError(f"line count mismatch: {hyp.shape[0]} vs {ref.shape[0]}")
    if hyp.shape[1] != ref.shape[1]:
        raise ValueError(f"dimension mismatch: {hyp.shape[1]} vs {ref.shape[1]}")
    norms = np.linalg.norm(hyp, axis=1) * np.linalg.norm(ref, axis=1)
    if np.any(norms == 0):
        raise ValueError("zero vector: cosine undefined")
    return np.einsum("ij,ij->i", hyp, ref) / norms


def embedding_cosine_report(hyp: np.ndarray, ref: np.ndarray) -> tuple[float, float]:
    """Mean and population standard deviation of per-line cosines."""
    cos = pairwise_cosines(hyp, ref)
    return float(np.mean(cos)), float(np.std(cos))
