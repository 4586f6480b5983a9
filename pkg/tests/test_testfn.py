import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ergmlab.graph import Graph
from ergmlab.motif import count_edges, count_two_stars
from ergmlab.testfn import (
    SharpnessParams,
    black_box_delta_norm,
    bounded_diff_norm_hn,
    expect_hn_under_er,
    g_vertex,
    hn_table,
    hn_value,
    phi_spread,
    sharpness_constants,
)

from conftest import er_weights

P = SharpnessParams(0.5, 0.16)


def test_params_validation():
    with pytest.raises(ValueError):
        SharpnessParams(0.5, 0.16, M=-1)
    with pytest.raises(ValueError):
        SharpnessParams(1.0, 0.16)
    with pytest.raises(ValueError):
        SharpnessParams(0.5, 0.0)


def test_zero_cap_gives_zero():
    q = SharpnessParams(0.5, 0.16, M=0.0)
    assert np.all(hn_table(30, q) == 0.0)
    assert bounded_diff_norm_hn(30, q) == 0.0
    assert expect_hn_under_er(30, q) == 0.0


@pytest.mark.parametrize("n, d", [(11, 0), (11, 5), (101, 50), (101, 80), (400, 3)])
def test_gauss_hermite_exact_without_truncation(n, d):
    # no cap in reach: the integrand is a quadratic, which the rule integrates exactly
    q = SharpnessParams(0.5, 0.16, M=1e9, method="gauss-hermite")
    want = (2 * d / (n - 1) - 1.0) ** 2 + 1 / q.sigma(n) ** 2
    assert g_vertex(d, n, q) == pytest.approx(want, rel=1e-12)
    assert g_vertex(d, n, SharpnessParams(0.5, 0.16, M=1e9)) == pytest.approx(want, rel=1e-12)


def test_gauss_hermite_close_to_analytic():
    q = SharpnessParams(0.5, 0.16, method="gauss-hermite")
    for n in (64, 300):
        d = np.arange(n)
        a, b = g_vertex(d, n, q), g_vertex(d, n, P)
        assert np.max(np.abs(a - b)) < 5e-3


MC_CASES = [(21, 10, 200.0, 0.5), (21, 17, 2.0, 0.5), (101, 90, 5.0, 0.5), (300, 150, 200.0, 0.5), (300, 200, 200.0, 0.5), (64, 3, 1.0, 0.3), (50, 49, 200.0, 0.2)]


@pytest.mark.parametrize("n, d, M, p", MC_CASES)
def test_g_vertex_vs_monte_carlo(n, d, M, p):
    q = SharpnessParams(p, 0.16, M=M)
    w = np.random.default_rng(7).standard_normal(10**6)
    x = np.minimum((2 * d / (n - 1) - 2 * p + w / q.sigma(n)) ** 2, M / n)
    se = x.std() / 1e3
    assert abs(g_vertex(d, n, q) - x.mean()) < 4 * se


def test_pure_noise_value():
    n = 201
    assert g_vertex(100, n, P) == pytest.approx(2 / (n * 0.16), rel=1e-3)


def test_degree_range_checked():
    with pytest.raises(ValueError):
        g_vertex(10, 10, P)


def test_diff_norm_scales_like_n_to_minus_three_halves():
    vals = [bounded_diff_norm_hn(n, P) * n**1.5 for n in (50, 100, 200, 400, 800)]
    assert max(vals) / min(vals) < 2.0


def test_diff_norm_dominates_black_box(rng):
    for n in (12, 40):
        table = hn_table(n, P)
        est = black_box_delta_norm(lambda g: hn_value(g, P, table), n, 300, rng)
        # the sup is attained when both endpoints sit at the worst degree; allow summation rounding
        assert est <= bounded_diff_norm_hn(n, P) * (1 + 1e-12)


def test_black_box_on_counts(rng):
    assert black_box_delta_norm(lambda g: float(count_edges(g.adj)), 6, 30, rng) == 1.0
    assert black_box_delta_norm(lambda g: float(count_two_stars(g.adj)), 4, 200, rng) <= 4


@pytest.mark.parametrize("n", [200, 400, 800])
def test_er_expectation_below_bound(n):
    val = expect_hn_under_er(n, P)
    assert val <= 13.5 + 0.2
    assert val > 12.5


def test_er_expectation_by_enumeration():
    q = SharpnessParams(0.3, 0.16, M=5.0)
    A, w = er_weights(4, 0.3)
    table = hn_table(4, q)
    vals = table[A.sum(axis=2)].sum(axis=1)
    assert np.dot(w, vals) == pytest.approx(expect_hn_under_er(4, q), rel=1e-12)


def test_sharpness_constants():
    r = sharpness_constants(0.5, 0.16)
    assert round(r.target, 5) == 13.58696
    assert r.er_bound == pytest.approx(13.5)
    assert r.a1_tilde == pytest.approx(0.08 - 0.0064)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**31), n=st.integers(4, 30))
def test_hn_permutation_invariant(seed, n):
    rng = np.random.default_rng(seed)
    g = Graph.random(n, 0.5, rng)
    perm = rng.permutation(n)
    h = Graph.from_adjacency(g.adj[np.ix_(perm, perm)])
    assert hn_value(g, P) == pytest.approx(hn_value(h, P), rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(3, 200), d=st.integers(0, 10**6))
def test_g_bounded_by_cap(n, d):
    v = g_vertex(d % n, n, P)
    assert 0.0 <= v <= P.M / n + 1e-15


def test_phi_spread_noise_floor():
    n = 101
    deg = np.full(n, 50)
    theta = 0.16 * (n - 1) / (2 * n)
    assert phi_spread(deg, P) == pytest.approx(n / ((n - 1) * theta))
