from __future__ import annotations

import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from graphgen import random_pair
from xamr.penman import parse_penman
from xamr.s2match import (
    EmbeddingFormatError,
    EmbeddingTable,
    S2Config,
    concept_similarity,
    concept_vector,
    load_embeddings,
    s2match_score,
    similarity_function,
)
from xamr.smatch import SearchConfig, brute_force_score, smatch_score

BERRIES = EmbeddingTable(2, {"blueberry": [1.0, 0.0], "huckleberry": [0.8, 0.6]})


def test_load_with_and_without_header(tmp_path):
    f = tmp_path / "v.txt"
    f.write_text("2 3\ncat 3 4 0\ndog 0 0 2\n")
    t = load_embeddings(f)
    assert (len(t), t.dimension) == (2, 3)
    np.testing.assert_allclose(t.get("cat"), [0.6, 0.8, 0.0])
    f.write_text("cat 3 4\ncat 1 0\n")
    t = load_embeddings(f)
    assert len(t) == 1
    np.testing.assert_allclose(t.get("cat"), [0.6, 0.8])


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("cat 1 2\ndog 1\n", "expected 2"),
        ("cat 1 x\n", "line 1"),
        ("cat 0 0\n", "non-zero"),
        ("cat\n", "no vector"),
        ("", "no vectors"),
    ],
)
def test_load_errors(tmp_path, text, fragment):
    f = tmp_path / "v.txt"
    f.write_text(text)
    with pytest.raises(EmbeddingFormatError, match=fragment):
        load_embeddings(f)


def test_concept_vector_strips_sense_and_averages_words():
    t = EmbeddingTable(2, {"have": [1, 0], "role": [0, 1]})
    np.testing.assert_allclose(concept_vector("have-role-91", t), [0.5, 0.5])
    assert concept_vector("have-x-91", t) is None


def test_similarity_threshold_and_fallback():
    assert concept_similarity("dog", "dog", BERRIES, 0.9) == 1.0
    assert concept_similarity("blueberry", "huckleberry", BERRIES, 0.5) == pytest.approx(0.8, abs=1e-12)
    assert concept_similarity("blueberry", "huckleberry", BERRIES, 0.9) == 0.0
    # out-of-vocabulary falls back to exact match
    assert concept_similarity("blueberry", "raspberry", BERRIES, 0.0) == 0.0


def test_berry_pair():
    g, p = parse_penman("(a / blueberry)"), parse_penman("(b / huckleberry)")
    r = s2match_score(g, p, BERRIES, S2Config(tau=0.5))
    assert float(r.matched) == pytest.approx(1.6, abs=1e-12)
    assert float(r.f1) == pytest.approx(0.8, abs=1e-12)
    assert s2match_score(g, p, BERRIES, S2Config(tau=0.9)).f1 == 0
    exact_top = s2match_score(g, p, BERRIES, S2Config(tau=0.5, grade_top=False))
    assert float(exact_top.f1) == pytest.approx(0.4, abs=1e-12)


def test_identity_any_tau(golden_path):
    from xamr.corpus import read_corpus

    table = EmbeddingTable(2, {"dog": [1, 0], "cat": [1, 1], "city": [0, 1]})
    for e in read_corpus(golden_path, strict=True)[:10]:
        for tau in (0.0, 0.5, 1.0):
            assert s2match_score(e.graph, e.graph, table, S2Config(tau)).f1 == 1


WORDS = ["want", "boy", "girl", "go", "believe", "city", "dog", "cat"]


def _random_table(seed: int) -> EmbeddingTable:
    rng = np.random.default_rng(seed)
    return EmbeddingTable(4, {w: rng.normal(size=4) for w in WORDS})


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_graded_never_below_binary(seed):
    g, p = random_pair(random.Random(seed), max_vars=5)
    table = _random_table(seed)
    s2 = s2match_score(g, p, table, S2Config(0.5))
    assert s2.f1 >= smatch_score(g, p).f1
    low = s2match_score(g, p, table, S2Config(0.0))
    assert low.matched >= s2.matched


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_exact_graded_search_matches_brute_force(seed):
    g, p = random_pair(random.Random(seed), max_vars=5)
    table = _random_table(seed)
    sim = similarity_function(table, 0.3)
    for grade_top in (True, False):
        got = s2match_score(g, p, table, S2Config(0.3, grade_top=grade_top))
        want = brute_force_score(g, p, sim, grade_top)
        assert math.isclose(float(got.matched), float(want.matched), abs_tol=1e-9)


def test_orthogonal_table_reduces_to_binary():
    table = EmbeddingTable(len(WORDS), {w: np.eye(len(WORDS))[i] for i, w in enumerate(WORDS)})
    rng = random.Random(2)
    for _ in range(30):
        g, p = random_pair(rng)
        assert s2match_score(g, p, table).matched == smatch_score(g, p).matched


def test_climbing_path_on_larger_graphs():
    rng = random.Random(4)
    g, p = random_pair(rng, max_vars=12, min_vars=9)
    cfg = S2Config(0.5, SearchConfig(restarts=3, exact_threshold=0))
    r = s2match_score(g, p, _random_table(1), cfg)
    assert r.restarts_used == 3 and not r.exact
    assert 0 <= r.f1 <= 1
    assert s2match_score(g, p, _random_table(1), cfg) == r


def test_tau_range():
    with pytest.raises(ValueError):
        S2Config(tau=1.5)
