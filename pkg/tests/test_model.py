import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ergmlab.graph import Graph, edge_pair, num_edges
from ergmlab.model import (
    ErgmSpec,
    Exact,
    FirstOrder,
    SecondOrder,
    TwoStarRewrite,
    delta_log_weight,
    local_coefficients,
    log_weight,
    make_model,
    model_name,
    rewrite_two_star,
    second_order_coefficients,
)
from ergmlab.motif import Motif, count_rectangles
from ergmlab.sampler import all_adjacency

RECT = ErgmSpec.rectangle()
TRI = ErgmSpec(((Motif.edge(), -0.3), (Motif.triangle(), 0.4), (Motif.two_star(), 0.2)))
PATH_SPEC = ErgmSpec(((Motif.edge(), 0.1), (Motif(4, ((1, 2), (2, 3), (3, 4))), 0.3)))


def test_spec_validation():
    with pytest.raises(ValueError):
        ErgmSpec(((Motif.triangle(), 0.1),))
    with pytest.raises(ValueError):
        ErgmSpec.rectangle(-0.1, -0.2)
    assert ErgmSpec.from_json(RECT.to_json()) == RECT


def test_flags():
    assert RECT.triangle_free and not RECT.no_two_stars
    assert not TRI.triangle_free
    assert ErgmSpec.edge_only(0.2).no_two_stars


def test_edge_only_exact_is_bernoulli():
    spec = ErgmSpec.edge_only(0.35)
    A = all_adjacency(4)
    lw = log_weight(Exact(), spec, A)
    E = A.sum(axis=(1, 2)) / 2
    assert np.allclose(lw, 2 * 0.35 * E)


def test_second_order_coefficients_rectangle():
    c_T, c_V = second_order_coefficients(RECT, 0.5)
    assert c_T == 0.0
    assert c_V == pytest.approx(0.16)  # beta * s * p^(e-2) = 0.16 * 4 * 0.25
    b1, b2 = rewrite_two_star(c_V, 0.5)
    assert b1 == pytest.approx(-0.16) and b2 == pytest.approx(0.16)


def test_make_model_kinds():
    assert isinstance(make_model("exact", RECT), Exact)
    m = make_model("two-star", RECT)
    assert isinstance(m, TwoStarRewrite) and m.p == pytest.approx(0.5)
    assert model_name(make_model("second", RECT)) == "second"
    with pytest.raises(ValueError):
        make_model("two-star", TRI)
    with pytest.raises(ValueError):
        make_model("third", RECT)


def test_second_order_without_interactions_is_first_order():
    spec = ErgmSpec.edge_only(-0.2)
    p = 0.4
    A = all_adjacency(4)
    d = log_weight(SecondOrder(p, 0.0, 0.0), spec, A) - log_weight(FirstOrder(p), spec, A)
    assert np.ptp(d) < 1e-12


def test_second_order_and_rewrite_differ_by_constant():
    A = all_adjacency(5)
    second = make_model("second", RECT)
    twostar = make_model("two-star", RECT)
    d = log_weight(second, RECT, A) - log_weight(twostar, RECT, A)
    assert np.ptp(d) < 1e-9


def test_rewrite_delta_on_empty_graph():
    m = TwoStarRewrite(-0.16, 0.16)
    assert delta_log_weight(m, RECT, Graph(4), (1, 2)) == pytest.approx(-0.32)


def test_exact_rectangle_delta_formula(rng):
    n = 6
    for _ in range(20):
        g = Graph.random(n, 0.5, rng)
        s = edge_pair(int(rng.integers(num_edges(n))), n)
        on = g.copy().set_edge(*s, True)
        off = g.copy().set_edge(*s, False)
        drect = count_rectangles(on.adj) - count_rectangles(off.adj)
        want = 8 * 0.16 / n**2 * drect + 2 * (-0.08)
        assert delta_log_weight(Exact(), RECT, g, s) == pytest.approx(want, abs=1e-12)


def _all_models(spec):
    out = [Exact(), make_model("first", spec), make_model("second", spec)]
    if spec.triangle_free:
        out.append(make_model("two-star", spec))
    return out


@settings(max_examples=120, deadline=None)
@given(
    n=st.integers(4, 12),
    seed=st.integers(0, 2**31),
    pick=st.integers(0, 10**6),
    spec=st.sampled_from([RECT, TRI, PATH_SPEC, ErgmSpec.two_star(-0.2, 0.1)]),
    which=st.integers(0, 3),
)
def test_delta_matches_log_weight_difference(n, seed, pick, spec, which):
    models = _all_models(spec)
    model = models[which % len(models)]
    rng = np.random.default_rng(seed)
    g = Graph.random(n, float(rng.uniform(0.1, 0.9)), rng)
    s = edge_pair(pick % num_edges(n), n)
    on = g.copy().set_edge(*s, True)
    off = g.copy().set_edge(*s, False)
    want = log_weight(model, spec, on) - log_weight(model, spec, off)
    assert delta_log_weight(model, spec, g, s) == pytest.approx(want, abs=1e-9)


@pytest.mark.parametrize("spec", [RECT, TRI, ErgmSpec.two_star(-0.2, 0.1)])
def test_local_coefficients_reproduce_delta(spec, rng):
    n = 9
    for model in _all_models(spec):
        c0, c1, c2, c3 = local_coefficients(model, spec, n)
        for _ in range(15):
            g = Graph.random(n, 0.5, rng)
            i, j = edge_pair(int(rng.integers(num_edges(n))), n)
            a, b = i - 1, j - 1
            x = int(g.adj[a, b])
            off = g.copy().set_edge(i, j, False)
            drect = count_rectangles(g.copy().set_edge(i, j, True).adj) - count_rectangles(off.adj)
            val = c0 + c1 * (g.degree[a] + g.degree[b] - 2 * x) + c2 * g.codegree(i, j) + c3 * drect
            assert val == pytest.approx(delta_log_weight(model, spec, g, (i, j)), abs=1e-10)


def test_generic_motif_has_no_local_form():
    assert local_coefficients(Exact(), PATH_SPEC, 8) is None
