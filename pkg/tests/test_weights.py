from fractions import Fraction
from itertools import combinations, combinations_with_replacement, permutations
from math import factorial

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from polyformality.algebra import Polyvector
from polyformality.graphs import Graph, Q, enumerate_gnm, u_gamma
from polyformality.weights import (
    BumpFunction, WeightConfig, count_linear_extensions, log_linearize, ordering_constraints,
    weight, weight_exact, weight_mc,
)

from conftest import polyvectors

BUMPS = list(BumpFunction)


def star(k):
    return Graph.from_edges(1, k, [(1, j) for j in range(1, k + 1)])


def rank_oracle_is_tree(n, m, edges):
    """Spanning tree of the bipartite graph iff the incidence matrix has rank n+m-1."""
    mat = np.zeros((len(edges), n + m))
    for r, (i, j) in enumerate(edges):
        mat[r, i - 1] = 1
        mat[r, n + j - 1] = -1
    return len(edges) == n + m - 1 and np.linalg.matrix_rank(mat) == n + m - 1


def extensions_oracle(size, relations):
    return sum(
        all(perm.index(a) > perm.index(b) for a, b in relations)
        for perm in permutations(range(size))
    )


def test_single_edge():
    g = star(1)
    lin = log_linearize(g)
    assert lin.is_spanning_tree and lin.orientation_sign == 1 and lin.matrix == ((1,),)
    assert weight_exact(g).value == 1
    for bump in BUMPS:
        mc = weight_mc(g, bump, 10**5, seed=1)
        assert mc.mean == 1.0 and mc.stderr == 0.0


def test_empty_graph_has_weight_one():
    (g,) = enumerate_gnm(1, 0)
    assert weight(g).value == 1


@pytest.mark.parametrize("k", [2, 3, 4])
def test_star_weights(k):
    g = star(k)
    assert log_linearize(g).is_spanning_tree
    w = weight_exact(g)
    assert w.value == Fraction(1, factorial(k))
    for bump in BUMPS:
        mc = weight_mc(g, bump, 10**5, seed=11)
        assert abs(mc.mean - float(w.value)) <= 3 * mc.stderr


def test_two_sources_one_target():
    g = Graph.from_edges(2, 1, [(1, 1), (2, 1)])
    assert weight_exact(g).value == Fraction(1, 2)
    cons = ordering_constraints(log_linearize(g))
    assert cons.rows == ((1, -1),) and cons.pairwise


def test_star_constraint_direction():
    cons = ordering_constraints(log_linearize(star(2)))
    # eta_1 > eta_2  <=>  s_1 < s_2
    assert cons.rows == ((-1, 1),) and cons.pairwise


def test_path_constraint_is_not_pairwise():
    g = Graph.from_edges(3, 2, [(1, 1), (2, 2), (3, 1), (3, 2)])
    cons = ordering_constraints(log_linearize(g))
    assert cons.labels[0] == "xi1>xi2"
    # xi_1 - xi_2 = s_(1,1) - s_(3,1) + s_(3,2) - s_(2,2)
    assert cons.rows[0] == (1, -1, -1, 1)
    assert not cons.pairwise
    assert len(cons.rows) == 3
    with pytest.raises(ValueError, match="pairwise"):
        weight_exact(g)


def test_nonpairwise_mc_is_finite():
    g = Graph.from_edges(3, 2, [(1, 1), (2, 2), (3, 1), (3, 2)])
    w = weight(g, WeightConfig(samples=10**6, seed=5))
    assert w.mode == "mc"
    assert np.isfinite(w.mean) and w.stderr <= 0.01


def test_parallel_edges_are_not_trees():
    g = Graph(2, 1, ((Q(1), Q(1)), ()))
    lin = log_linearize(g)
    assert not lin.is_spanning_tree
    assert weight(g).mode == "zero"
    assert weight_mc(g, BumpFunction.QUARTIC, 100, 0).mode == "zero"
    with pytest.raises(ValueError):
        ordering_constraints(lin)


@pytest.mark.parametrize("n,m", [(n, s - n) for s in range(2, 6) for n in range(1, s + 1)])
def test_zero_rule_exhaustive(n, m):
    pool = [(i, j) for i in range(1, n + 1) for j in range(1, m + 1)]
    for edges in combinations_with_replacement(pool, n + m - 1):
        g = Graph.from_edges(n, m, edges)
        tree = rank_oracle_is_tree(n, m, edges)
        assert log_linearize(g).is_spanning_tree == tree
        assert (weight(g).mode == "zero") == (not tree)


@pytest.mark.parametrize("size", range(0, 6))
def test_linear_extensions_vs_permutations(size):
    rng = np.random.default_rng(size)
    for _ in range(10):
        # random DAG: only relations a > b with a > b as integers
        rel = [(a, b) for a in range(size) for b in range(a) if rng.random() < 0.4]
        assert count_linear_extensions(size, rel) == extensions_oracle(size, rel)


def exact_eligible(max_total=5):
    out = []
    for s in range(2, max_total + 1):
        for n in range(1, s + 1):
            for g in enumerate_gnm(n, s - n):
                lin = log_linearize(g)
                if lin.is_spanning_tree and ordering_constraints(lin).pairwise:
                    out.append(g)
    return out


@pytest.mark.parametrize("bump", BUMPS, ids=lambda b: b.value)
def test_exact_mc_agreement(bump):
    for g in exact_eligible():
        exact = weight_exact(g)
        mc = weight_mc(g, bump, 10**5, seed=2024)
        assert abs(mc.mean - float(exact.value)) <= 3 * mc.stderr, g.key()
        assert factorial(g.num_edges) % exact.value.denominator == 0


def test_bump_independence_on_pairwise_graphs():
    for g in exact_eligible(4):
        a = weight_mc(g, BumpFunction.QUARTIC, 10**5, seed=3)
        b = weight_mc(g, BumpFunction.EPANECHNIKOV, 10**5, seed=4)
        assert abs(a.mean - b.mean) <= 3 * np.hypot(a.stderr, b.stderr), g.key()


def test_mc_independent_of_worker_count():
    g = Graph.from_edges(3, 2, [(1, 1), (2, 2), (3, 1), (3, 2)])
    one = weight_mc(g, BumpFunction.EPANECHNIKOV, 300_000, seed=9, workers=1)
    four = weight_mc(g, BumpFunction.EPANECHNIKOV, 300_000, seed=9, workers=4)
    assert one == four
    assert weight_mc(g, BumpFunction.EPANECHNIKOV, 300_000, seed=10) != one


@pytest.mark.parametrize("bump", BUMPS, ids=lambda b: b.value)
def test_quadrature_oracle(bump):
    # n=2, m=1 with eta_1 = 0: integrate g'(xi_1) g'(xi_2) over xi_1 > xi_2
    gp = lambda s: float(bump.density(s))
    val, _ = integrate.dblquad(lambda x2, x1: gp(x1) * gp(x2), -1, 1, lambda x1: -1, lambda x1: x1)
    assert val == pytest.approx(float(weight_exact(Graph.from_edges(2, 1, [(1, 1), (2, 1)])).value), abs=1e-8)
    # star k=2 with eta_2 = 0: coordinates (xi, eta_1), region eta_1 > 0
    val, _ = integrate.dblquad(lambda e1, xi: gp(xi - e1) * gp(xi), -1, 1, lambda xi: 0, lambda xi: 2)
    assert val == pytest.approx(float(weight_exact(star(2)).value), abs=1e-8)


@pytest.mark.parametrize("bump", BUMPS, ids=lambda b: b.value)
def test_bump_function_conditions(bump):
    total, _ = integrate.quad(lambda s: float(bump.density(s)), -1, 1)
    assert total == pytest.approx(1.0, abs=1e-12)
    s = np.linspace(-1, 1, 41)
    cum = np.array([integrate.quad(lambda t: float(bump.density(t)), -1, v)[0] for v in s])
    assert np.allclose(bump.cdf(s), cum, atol=1e-12)
    # phi(x) = g(log(-x)) is constant outside [-e, -1/e]
    assert bump.phi(-10.0) == 1.0 and bump.phi(-0.1) == 0.0
    assert np.all(np.diff(bump.phi(np.linspace(-np.e, -1 / np.e, 50))) < 0)


def test_bump_parse():
    assert BumpFunction.parse("epanechnikov") is BumpFunction.EPANECHNIKOV
    assert BumpFunction.parse("quartic") is BumpFunction.QUARTIC
    with pytest.raises(ValueError):
        BumpFunction.parse("gaussian")


@settings(max_examples=20, deadline=None)
@given(st.data())
def test_relabeling_keeps_weighted_operator(data):
    g = data.draw(st.sampled_from([h for h in enumerate_gnm(2, 3) + enumerate_gnm(1, 3) if h.num_edges > 1]))
    i = data.draw(st.sampled_from([k + 1 for k, s in enumerate(g.star_sizes) if s >= 2]))
    order = data.draw(st.permutations(range(g.star_sizes[i - 1])))
    h = g.permute_star(i, order)
    gammas = [data.draw(polyvectors(degree=k)) for k in g.star_sizes]
    lg, lh = log_linearize(g), log_linearize(h)
    if lg.is_spanning_tree:
        parity = sum(1 for a in range(len(order)) for b in range(a) if order[b] > order[a]) % 2
        assert lh.orientation_sign == lg.orientation_sign * (-1) ** parity
    wg, wh = weight(g), weight(h)
    if wg.mode == "zero":
        assert wh.mode == "zero"
        return
    if wg.is_exact:
        assert u_gamma(h, gammas).scale(wh.value) == u_gamma(g, gammas).scale(wg.value)
    else:
        assert wh.mean == wg.mean * lh.orientation_sign * lg.orientation_sign


def test_relabeling_nonpairwise_mc_exactly_signed():
    g = Graph.from_edges(2, 3, [(1, 1), (1, 3), (2, 2), (2, 3)])
    assert not ordering_constraints(log_linearize(g)).pairwise
    h = g.permute_star(1, [1, 0])
    cfg = WeightConfig(samples=10**5, seed=1)
    wg, wh = weight(g, cfg), weight(h, cfg)
    assert wg.mode == wh.mode == "mc"
    assert wh.mean == -wg.mean and wh.stderr == wg.stderr
    gammas = [Polyvector.basis(1, 2), Polyvector.basis(1, 3)]
    assert u_gamma(h, gammas) == u_gamma(g, gammas).scale(-1)
