from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from graphgen import random_graph
from xamr.penman import (
    AmrGraph,
    Constant,
    PenmanError,
    invert_role,
    is_inverse_role,
    parse_penman,
    serialize_penman,
)

WANT = "(w / want-01 :ARG0 (b / boy) :ARG1 (g / go-02 :ARG0 b))"


def test_parse_basic_structure():
    g = parse_penman(WANT)
    assert g.root == "w"
    assert g.nodes == {"w": "want-01", "b": "boy", "g": "go-02"}
    assert set(g.edges) == {("w", "ARG0", "b"), ("w", "ARG1", "g"), ("g", "ARG0", "b")}


def test_inverse_roles_are_normalized():
    g = parse_penman("(m / man :ARG0-of (s / sleep-01))")
    assert g.edges == (("s", "ARG0", "m"),)


@pytest.mark.parametrize(
    "role, inverse",
    [
        ("ARG0-of", True),
        ("ARG0", False),
        ("consist-of", False),
        ("prep-on-of", False),
        ("consist-of-of", True),
        ("polarity-of", True),
    ],
)
def test_is_inverse_role(role, inverse):
    assert is_inverse_role(role) is inverse


def test_invert_role_round_trips():
    assert invert_role("ARG0") == "ARG0-of"
    assert invert_role("ARG0-of") == "ARG0"
    assert invert_role("consist-of") == "consist-of-of"


def test_consist_of_is_forward():
    g = parse_penman("(a / ant :consist-of (b / bee))")
    assert g.edges == (("a", "consist-of", "b"),)


def test_constants():
    g = parse_penman('(p / person :quant 3 :polarity - :name "Jo Ann" :mode imperative :x 2.5e3)')
    values = {a.role: a.value for a in g.attributes}
    assert values["quant"] == Constant("3", "number")
    assert values["polarity"] == Constant("-", "symbol")
    assert values["name"] == Constant("Jo Ann", "string")
    assert values["mode"].kind == "symbol"
    assert values["x"].kind == "number"


def test_escaped_string():
    g = parse_penman(r'(u / url-entity :value "a \"q\" b")')
    assert g.attributes[0].value.value == 'a "q" b'
    assert parse_penman(serialize_penman(g)) == g


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("(a / b", "unbalanced"),
        ("(a / b))", "unbalanced"),
        ("(a / b) (c / d)", "trailing"),
        ("(a :ARG0 (b / c))", "'/'"),
        ("(a / b :ARG0 (a / c))", "duplicate"),
        ("(a / b :ARG0 x)", "undefined variable"),
        ('(a / b :name "open)', "unterminated"),
    ],
)
def test_malformed_input_raises(text, fragment):
    with pytest.raises(PenmanError, match=fragment):
        parse_penman(text)


def test_error_position_is_reported():
    with pytest.raises(PenmanError) as info:
        parse_penman("(a / b\n  :ARG0 (c))")
    assert info.value.line == 2
    assert "line 2" in str(info.value)


def test_unknown_bare_token_is_a_constant():
    g = parse_penman("(a / b :mode expressive)")
    assert g.attributes[0].value == Constant("expressive")


def test_disconnected_graph_rejected():
    with pytest.raises(ValueError, match="not connected"):
        AmrGraph("a", {"a": "x", "b": "y"})


def test_serialize_one_line_and_indented():
    g = parse_penman(WANT)
    assert serialize_penman(g, indent=None) == WANT
    assert serialize_penman(g).splitlines()[1] == "    :ARG0 (b / boy)"


def test_serialize_uses_inverse_when_needed():
    g = parse_penman("(m / man :ARG0-of (s / sleep-01))")
    assert serialize_penman(g, indent=None) == "(m / man :ARG0-of (s / sleep-01))"


def test_golden_round_trip_is_exact(golden_path):
    from xamr.corpus import read_corpus

    for entry in read_corpus(golden_path, strict=True):
        again = parse_penman(serialize_penman(entry.graph))
        assert again == entry.graph, entry.id


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 12))
def test_round_trip_random_graphs(seed, n):
    g = random_graph(random.Random(seed), n)
    text = serialize_penman(g)
    again = parse_penman(text)
    assert again == g
    assert serialize_penman(again) == text


def test_inverse_role_on_root_child():
    g = parse_penman("(g / go-02 :ARG0-of (p / possible-01))")
    assert g.root == "g"
    assert g.edges == (("p", "ARG0", "g"),)


def test_single_node_serialization():
    assert serialize_penman(AmrGraph("w", {"w": "want-01"})) == "(w / want-01)"


def test_reentrant_node_introduced_once():
    text = serialize_penman(parse_penman(WANT), indent=None)
    assert text.count("(b / boy)") == 1
    assert text.count(" b)") + text.count(" b ") == 1
