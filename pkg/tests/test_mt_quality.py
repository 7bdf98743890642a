from __future__ import annotations

import math

import numpy as np
import pytest

from xamr.mt_quality import (
    SentencePair,
    bleu_statistics,
    corpus_bleu,
    embedding_cosine_report,
    load_sentence_embeddings,
    tokenize,
)


def pairs(*items):
    return [SentencePair.from_text(h, r) for h, r in items]


def test_tokenize():
    assert tokenize("Hello, World!") == ["hello", ",", "world", "!"]


def test_identity_is_one():
    corpus = pairs(("the cat sat on the mat", "the cat sat on the mat"), ("a b c d e", "a b c d e"))
    assert corpus_bleu(corpus) == 1.0


def test_clipping_fixture():
    stats = bleu_statistics(pairs(("the the the the", "the cat")))
    assert stats[0][0] == 1 and stats[1][0] == 4
    assert corpus_bleu(pairs(("the the the the", "the cat"))) == 0.0


def test_truncated_orders_and_brevity_penalty():
    got = corpus_bleu(pairs(("the cat sat", "the cat sat down")))
    assert got == pytest.approx(math.exp(1 - 4 / 3), abs=1e-12)


def test_no_penalty_when_longer():
    got = corpus_bleu(pairs(("a b c d e", "a b c d")))
    # p1 = 4/5, p2 = 3/4, p3 = 2/3, p4 = 1/2
    assert got == pytest.approx((4 / 5 * 3 / 4 * 2 / 3 * 1 / 2) ** 0.25, abs=1e-12)


def test_empty_inputs_rejected():
    with pytest.raises(ValueError):
        corpus_bleu([])
    with pytest.raises(ValueError):
        corpus_bleu(pairs(("", "a b")))


def test_embedding_report(tmp_path):
    hyp = tmp_path / "h.txt"
    ref = tmp_path / "r.txt"
    hyp.write_text("1 0\n1 0\n")
    ref.write_text("2 0\n0.5 0.8660254037844386\n")
    mean, std = embedding_cosine_report(load_sentence_embeddings(hyp), load_sentence_embeddings(ref))
    assert mean == pytest.approx(0.75, abs=1e-12)
    assert std == pytest.approx(0.25, abs=1e-12)


def test_embedding_identity_and_orthogonal():
    a = np.array([[1.0, 2.0], [3.0, -1.0]])
    assert embedding_cosine_report(a, a) == pytest.approx((1.0, 0.0), abs=1e-12)
    b = np.array([[-2.0, 1.0], [1.0, 3.0]])
    assert embedding_cosine_report(a, b)[0] == pytest.approx(0.0, abs=1e-12)


def test_embedding_mismatch(tmp_path):
    with pytest.raises(ValueError, match="mismatch"):
        embedding_cosine_report(np.ones((2, 3)), np.ones((3, 3)))
    f = tmp_path / "bad.txt"
    f.write_text("1 2\n1\n")
    with pytest.raises(ValueError, match="line 2"):
        load_sentence_embeddings(f)
