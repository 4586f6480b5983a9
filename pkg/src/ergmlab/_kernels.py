"""Compiled inner loops for heat-bath edge updates.

State is an int32 adjacency matrix, an int64 degree vector and, when the
model needs codegrees or four-cycle deltas, an int32 codegree matrix with a
zero diagonal that is kept in sync on every flip.
"""
import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _sigmoid(x):
    if x >= 0.0:
        return 1.0 / (1.0 + np.exp(-x))
    e = np.exp(x)
    return e / (1.0 + e)


@njit(cache=True)
def rect_delta_cod(adj, deg, cod, a, b):
    """Four-cycles through (a, b) if present, using the codegree matrix."""
    n = adj.shape[0]
    acc = 0
    for c in range(n):
        acc += adj[a, c] * cod[b, c]
    x = adj[a, b]
    return acc - x * (deg[a] - 1)


@njit(cache=True)
def rect_delta_plain(adj, a, b):
    """Same count without a codegree matrix: paths a-c-d-b avoiding a, b."""
    n = adj.shape[0]
    acc = 0
    for c in range(n):
        if c == b or adj[a, c] == 0:
            continue
        for d in range(n):
            if d != a and adj[b, d] != 0:
                acc += adj[c, d]
    return acc


@njit(cache=True)
def local_delta(adj, deg, cod, a, b, c0, c1, c2, c3, tracked):
    x = adj[a, b]
    delta = c0
    if c1 != 0.0:
        delta += c1 * (deg[a] + deg[b] - 2 * x)
    if c2 != 0.0:
        if tracked:
            delta += c2 * cod[a, b]
        else:
            cd = 0
            for c in range(adj.shape[0]):
                cd += adj[a, c] * adj[b, c]
            delta += c2 * cd
    if c3 != 0.0:
        if tracked:
            delta += c3 * rect_delta_cod(adj, deg, cod, a, b)
        else:
            delta += c3 * rect_delta_plain(adj, a, b)
    return delta


@njit(cache=True)
def _shift_codegrees(adj, cod, a, b, sign):
    # branchless: a data-dependent branch here mispredicts half the time
    n = adj.shape[0]
    for c in range(n):
        x = adj[b, c] * sign
        y = adj[a, c] * sign
        cod[a, c] += x
        cod[c, a] += x
        cod[b, c] += y
        cod[c, b] += y


@njit(cache=True)
def flip(adj, deg, cod, a, b, new, tracked):
    if new == 1:
        if tracked:
            _shift_codegrees(adj, cod, a, b, 1)
        adj[a, b] = 1
        adj[b, a] = 1
        deg[a] += 1
        deg[b] += 1
    else:
        adj[a, b] = 0
        adj[b, a] = 0
        deg[a] -= 1
        deg[b] -= 1
        if tracked:
            _shift_codegrees(adj, cod, a, b, -1)


@njit(cache=True)
def heat_bath_step(adj, deg, cod, a, b, u, c0, c1, c2, c3, tracked):
    delta = local_delta(adj, deg, cod, a, b, c0, c1, c2, c3, tracked)
    new = 1 if u < _sigmoid(delta) else 0
    if new != adj[a, b]:
        flip(adj, deg, cod, a, b, new, tracked)
    return new


@njit(cache=True)
def sweeps(adj, deg, cod, ea, eb, block, random_scan, c0, c1, c2, c3, tracked):
    """Run ``block.shape[0]`` sweeps.

    Each row of ``block`` holds the uniforms of one sweep: N heat-bath
    uniforms for systematic scan, or N position uniforms followed by N
    heat-bath uniforms for random scan.
    """
    N = ea.shape[0]
    for r in range(block.shape[0]):
        for k in range(N):
            if random_scan:
                s = int(block[r, k] * N)
                if s >= N:
                    s = N - 1
                u = block[r, N + k]
            else:
                s = k
                u = block[r, k]
            heat_bath_step(adj, deg, cod, ea[s], eb[s], u, c0, c1, c2, c3, tracked)


@njit(cache=True)
def conditional_probs(adj, deg, cod, ea, eb, c0, c1, c2, c3, tracked):
    out = np.empty(ea.shape[0])
    for k in range(ea.shape[0]):
        out[k] = _sigmoid(local_delta(adj, deg, cod, ea[k], eb[k], c0, c1, c2, c3, tracked))
    return out


@njit(cache=True)
def rect_deltas(adj, ea, eb):
    out = np.empty(ea.shape[0], dtype=np.int64)
    for k in range(ea.shape[0]):
        out[k] = rect_delta_plain(adj, ea[k], eb[k])
    return out
