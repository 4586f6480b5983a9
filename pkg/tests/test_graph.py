import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ergmlab.graph import (
    Graph,
    edge_arrays,
    edge_index,
    edge_pair,
    num_edges,
    read_edge_list,
    write_edge_list,
)


def test_toggle_on_empty_graph():
    g = Graph(3).toggle(1, 2)
    assert g.num_edges == 1
    assert list(g.degree) == [1, 1, 0]


def test_toggle_twice_is_identity():
    g = Graph(5, [(1, 2), (2, 4), (3, 5)])
    h = g.copy().toggle(2, 4).toggle(2, 4)
    assert h == g


def test_toggle_on_complete_graph():
    g = Graph.complete(4).toggle(1, 2)
    assert g.num_edges == 5
    assert list(g.degree) == [2, 2, 3, 3]


def test_toggle_rejects_bad_vertices():
    g = Graph(4)
    with pytest.raises(ValueError):
        g.toggle(0, 2)
    with pytest.raises(ValueError):
        g.toggle(2, 5)
    with pytest.raises(ValueError):
        g.toggle(3, 3)


@pytest.mark.parametrize(
    "g, pair, expected",
    [
        (Graph(3, [(1, 2), (1, 3), (2, 3)]), (1, 2), 1),
        (Graph(6), (2, 5), 0),
        (Graph.complete(5), (1, 2), 3),
    ],
)
def test_codegree(g, pair, expected):
    assert g.codegree(*pair) == expected


def test_codegree_needs_distinct_vertices():
    with pytest.raises(ValueError):
        Graph.complete(4).codegree(2, 2)


def test_symmetric_access():
    g = Graph(4, [(3, 1)])
    assert g.has_edge(1, 3) and g.has_edge(3, 1)


@pytest.mark.parametrize("n", [2, 3, 5, 9])
def test_edge_index_bijection(n):
    seen = set()
    for k in range(num_edges(n)):
        i, j = edge_pair(k, n)
        assert 1 <= i < j <= n
        assert edge_index(i, j, n) == k
        assert edge_index(j, i, n) == k
        seen.add((i, j))
    assert len(seen) == num_edges(n)
    a, b = edge_arrays(n)
    assert [(int(x) + 1, int(y) + 1) for x, y in zip(a, b)] == [tuple(edge_pair(k, n)) for k in range(num_edges(n))]


def test_vector_round_trip():
    rng = np.random.default_rng(3)
    g = Graph.random(7, 0.4, rng)
    assert Graph.from_vector(g.to_vector(), 7) == g


@settings(max_examples=60, deadline=None)
@given(n=st.integers(2, 9), data=st.data())
def test_degrees_track_toggles(n, data):
    N = num_edges(n)
    seq = data.draw(st.lists(st.integers(0, N - 1), max_size=40))
    g = Graph(n)
    for k in seq:
        g.toggle(*edge_pair(k, n))
    assert np.array_equal(g.degree, g.adj.sum(axis=1))
    assert 2 * g.num_edges == g.degree.sum()
    assert np.array_equal(g.adj, g.adj.T)


def test_edge_list_round_trip():
    g = Graph(6, [(1, 4), (2, 3), (5, 6)])
    text = write_edge_list(g)
    assert text.splitlines()[0] == "n 6"
    assert read_edge_list(text) == g


def test_edge_list_rejects_unordered_pairs():
    with pytest.raises(ValueError):
        read_edge_list("n 4\n3 1\n")
