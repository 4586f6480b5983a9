import itertools
import math

import numpy as np
import pytest

from ergmlab.graph import Graph, num_edges
from ergmlab.sampler import all_adjacency


def brute_hom(motif, adj):
    """Injective edge-preserving maps counted one by one."""
    n = adj.shape[0]
    total = 0
    for img in itertools.permutations(range(n), motif.v):
        if all(adj[img[i - 1], img[j - 1]] for i, j in motif.edges):
            total += 1
    return total


def brute_centered(motif, adj, p):
    """Sum over copies (distinct edge sets) of prod (Z - p)."""
    n = adj.shape[0]
    seen = set()
    total = 0.0
    for img in itertools.permutations(range(n), motif.v):
        es = frozenset(frozenset((img[i - 1], img[j - 1])) for i, j in motif.edges)
        if es in seen:
            continue
        seen.add(es)
        prod = 1.0
        for e in es:
            a, b = tuple(e)
            prod *= adj[a, b] - p
        total += prod
    return total


def er_weights(n, p):
    """G(n, p) probability of each enumerated graph (same order as all_adjacency)."""
    A = all_adjacency(n)
    E = A.sum(axis=(1, 2)) // 2
    N = num_edges(n)
    return A, p ** E * (1 - p) ** (N - E)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_graphs(n, count, rng):
    out = []
    for k in range(count):
        out.append(Graph.random(n, [0.2, 0.5, 0.8][k % 3], rng))
    return out


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
