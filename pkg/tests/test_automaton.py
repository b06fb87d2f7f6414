import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from critexp.automaton import (ABC_MATRIX, ABC_ORDER, GroupWord, LabeledGraph, builtin, check_path,
                               closed_path_count, enumerate_cycles, evaluate_path, inverse_symbol,
                               is_irreducible, load_coding, paths_from, recurrent_subgraph,
                               validate_strong_markov, vertex_adjacency)

# Sanov matrices generate a free subgroup of SL(2, Z): an exact, independent model of F(a, b)
SANOV = {"a": np.array([[1, 2], [0, 1]]), "b": np.array([[1, 0], [2, 1]])}
SANOV["a'"] = np.array([[1, -2], [0, 1]])
SANOV["b'"] = np.array([[1, 0], [-2, 1]])
SANOV["c"] = SANOV["b'"] @ SANOV["a'"]
SANOV["c'"] = SANOV["a"] @ SANOV["b"]


def sanov(word):
    m = np.eye(2, dtype=np.int64)
    for s in word:
        m = m @ SANOV[s]
    return m


def sphere_sizes(gens, radius):
    key = lambda m: tuple(m.ravel())
    seen = {key(np.eye(2, dtype=np.int64))}
    frontier = [np.eye(2, dtype=np.int64)]
    sizes = []
    for _ in range(radius):
        nxt = []
        for m in frontier:
            for s in gens:
                x = m @ SANOV[s]
                if key(x) not in seen:
                    seen.add(key(x))
                    nxt.append(x)
        sizes.append(len(nxt))
        frontier = nxt
    return sizes


words = st.lists(st.sampled_from(["a", "b", "a'", "b'"]), max_size=12)


@given(words)
def test_group_word_reduction_matches_matrix_model(w):
    g = GroupWord(w)
    assert np.array_equal(sanov(g), sanov(w))
    assert all(g[i] != inverse_symbol(g[i + 1]) for i in range(len(g) - 1))
    assert GroupWord(g) == g


@given(words, words)
def test_group_word_inverse_and_product(u, v):
    gu, gv = GroupWord(u), GroupWord(v)
    assert gu * gu.inverse() == GroupWord()
    assert (gu * gv).inverse() == gv.inverse() * gu.inverse()
    assert gu.power(-2) == gu.inverse() * gu.inverse()


def test_group_word_parse():
    assert GroupWord.parse("ab'a'") == ("a", "b'", "a'")
    assert GroupWord.parse("aa'b") == ("b",)
    assert GroupWord.parse("x1 x1'") == ()
    assert GroupWord.parse("ab").is_cyclically_reduced()
    assert not GroupWord.parse("aba'").is_cyclically_reduced()
    with pytest.raises(ValueError):
        GroupWord.parse("'a")


def test_abc_adjacency_matches_transition_matrix(abc):
    a, order = vertex_adjacency(abc)
    assert order == ABC_ORDER
    assert np.array_equal(a, ABC_MATRIX)
    assert np.all(ABC_MATRIX.sum(axis=1) == 4)


def test_standard_adjacency(standard):
    a, order = vertex_adjacency(standard)
    assert order == ("a", "b", "a'", "b'")
    expected = [[int(t != inverse_symbol(s)) for t in order] for s in order]
    assert np.array_equal(a, expected)
    assert np.all(a.sum(axis=1) == 3)


@pytest.mark.parametrize("name,gens", [("standard", ["a", "b", "a'", "b'"]),
                                       ("abc", list(ABC_ORDER))])
def test_sphere_sizes_match_free_group_model(name, gens):
    g = builtin(name)
    expected = sphere_sizes(gens, 6)
    for n in range(1, 7):
        assert sum(1 for _ in paths_from(g, g.start, n)) == expected[n - 1]


@pytest.mark.parametrize("name", ["standard", "abc"])
def test_builtins_pass_validation(name):
    rep = validate_strong_markov(builtin(name), depth=6)
    assert rep.passed, rep.failures
    assert rep.checked_paths == {"standard": 1456, "abc": 8190}[name]


def test_path_evaluation_agrees_with_matrix_model(abc):
    rng = np.random.default_rng(0)
    elements = set()
    for _ in range(200):
        v, path = abc.start, []
        for _ in range(rng.integers(1, 8)):
            e = abc.out_edges(v)[rng.integers(len(abc.out_edges(v)))]
            path.append(e.id)
            v = e.target
        word = evaluate_path(abc, path)
        labels = [abc.edges[i].label for i in path]
        assert np.array_equal(sanov(word), sanov(reversed(labels)))
        elements.add(tuple(sanov(word).ravel()))
    assert len(elements) > 150


def test_validation_catches_broken_codings(standard):
    d = standard.to_dict()
    d["edges"].append({"from": "a", "to": "a'", "label": "a'"})
    report = validate_strong_markov(LabeledGraph.from_dict(d), depth=3)
    assert not report.passed
    assert any(f.startswith("geodesicity") for f in report.failures)

    d = standard.to_dict()
    d["edges"] = [e for e in d["edges"] if not (e["from"] == "a" and e["to"] == "b")]
    report = validate_strong_markov(LabeledGraph.from_dict(d), depth=3)
    assert any(f.startswith("surjectivity") for f in report.failures)

    d = standard.to_dict()
    d["edges"].append({"from": "a", "to": "b'", "label": "b"})
    assert any(f.startswith("determinism")
               for f in validate_strong_markov(LabeledGraph.from_dict(d), 2).failures)

    d = standard.to_dict()
    d["edges"] = [e for e in d["edges"] if e["label"] != "b'"]
    assert any(f.startswith("symmetry")
               for f in validate_strong_markov(LabeledGraph.from_dict(d), 2).failures)


def test_json_round_trip(abc):
    again = LabeledGraph.from_json(abc.to_json())
    assert again.to_dict() == abc.to_dict()
    assert json.loads(abc.to_json())["letters"] == {"c": "b'a'"}
    with pytest.raises(ValueError):
        LabeledGraph.from_dict({"vertices": ["x"]})
    with pytest.raises(ValueError):
        LabeledGraph(["x"], [("x", "y", "a")], "x")
    assert load_coding(abc) is abc
    assert load_coding(abc.to_dict()).to_dict() == abc.to_dict()
    with pytest.raises(ValueError):
        builtin("nope")


def test_recurrent_subgraph_keeps_edge_ids(abc):
    h = recurrent_subgraph(abc)
    assert "*" not in h.vertices and h.start is None
    assert len(h.edges) == 24
    assert all(abc.edges[e.id] == e for e in h.edges)
    assert is_irreducible(h) and not is_irreducible(abc)


@pytest.mark.parametrize("name", ["standard", "abc"])
def test_cycle_counts_match_trace(name):
    g = builtin(name)
    a, _ = vertex_adjacency(g)
    for n in range(1, 6):
        cycles = list(enumerate_cycles(g, n))
        assert sum(c.period for c in cycles) == int(np.trace(np.linalg.matrix_power(a, n)))
        assert closed_path_count(g, n) == int(np.trace(np.linalg.matrix_power(a, n)))
        for c in cycles:
            edges = check_path(g, c.edges)
            assert edges[-1].target == edges[0].source
    assert closed_path_count(g, 3) == {"standard": 3**3 + 2 - 1, "abc": 4**3 + 2}[name]


def test_cycle_periods(standard):
    cycles = list(enumerate_cycles(standard, 4))
    assert any(not c.primitive for c in cycles)
    for c in cycles:
        assert c.edges == min(c.edges[i:] + c.edges[:i] for i in range(4))
        if not c.primitive:
            p = c.period
            assert c.edges == c.edges[:p] * (4 // p)


def test_path_errors(abc):
    with pytest.raises(ValueError):
        check_path(abc, [999])
    e1 = abc.out_edges("a")[0]
    bad = next(e for e in abc.edges if e.source != e1.target)
    with pytest.raises(ValueError):
        check_path(abc, [e1.id, bad.id])
    with pytest.raises(ValueError):
        list(enumerate_cycles(abc, 0))
