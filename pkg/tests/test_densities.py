import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import graphs, weighted_graphs
from ramsey_flags.densities import (
    ConstGraphon, DensityError, WeightedGraph, balance_p, complement_w, compute_lambda0,
    cycle_density_trace, d_weighted, from_graph, goodman_check, hom_count, hom_count_dense,
    hom_density, induced_density, objective, t_ind_weighted, t_inj, trivial_lower_bound,
)
from ramsey_flags.graphs import (
    complement, complete_graph, cycle_graph, empty_graph, enumerate_graphs, named_graph, path_graph,
)

K2, K3, K4, C4, C5, P3 = (complete_graph(2), complete_graph(3), complete_graph(4), cycle_graph(4),
                          cycle_graph(5), path_graph(3))


def brute_hom_weighted(h, w):
    total = Fraction(0)
    for phi in itertools.product(range(w.n), repeat=h.n):
        prod = Fraction(1)
        for u, v in h.edges:
            prod *= w.w[phi[u]][phi[v]]
        total += prod
    return total / w.n ** h.n


def brute_hom(h, g):
    return sum(1 for phi in itertools.product(range(g.n), repeat=h.n)
               if all(g.has_edge(phi[u], phi[v]) for u, v in h.edges))


def test_from_graph_and_complement():
    assert from_graph(K2).w == ((0, 1), (1, 0))
    cw = complement_w(from_graph(K2))
    assert cw.w == ((1, 0), (0, 1))
    assert complement_w(cw) == from_graph(K2)
    assert complement_w(ConstGraphon(Fraction(1))) == ConstGraphon(Fraction(0))


def test_complement_of_c6bar_spectrum():
    import numpy as np

    cw = complement_w(from_graph(named_graph("C6_complement")))
    ev = sorted(np.linalg.eigvalsh(np.array(cw.w, dtype=float)))
    assert ev == pytest.approx([-1, 0, 0, 2, 2, 3], abs=1e-9)


def test_weighted_graph_validation():
    with pytest.raises(DensityError):
        WeightedGraph.from_rows([[0, 2], [2, 0]])
    with pytest.raises(DensityError):
        WeightedGraph.from_rows([[0, Fraction(1, 2)], [Fraction(1, 3), 0]])
    with pytest.raises(DensityError):
        ConstGraphon(Fraction(3, 2))


def test_hom_density_values():
    c6bar = from_graph(named_graph("C6_complement"))
    assert hom_density(K3, from_graph(K3)) == Fraction(6, 27)
    assert hom_density(K3, c6bar) == Fraction(1, 18)
    assert hom_density(C5, complement_w(c6bar)) == Fraction(17, 432)
    p = Fraction(2, 7)
    assert hom_density(named_graph("M"), ConstGraphon(p)) == p ** 7


@given(graphs(max_n=4), weighted_graphs(max_n=3))
def test_hom_density_matches_brute_force(h, w):
    assert hom_density(h, w) == brute_hom_weighted(h, w)


@settings(max_examples=40)
@given(graphs(max_n=5), graphs(max_n=6))
def test_hom_count_matches_brute_force(h, g):
    assert hom_count(h, g) == brute_hom(h, g)
    assert hom_density(h, from_graph(g)) == Fraction(brute_hom(h, g), g.n ** h.n)


@given(graphs(max_n=5), graphs(max_n=7))
def test_dense_hom_count_agrees(h, g):
    mat = [[int(g.has_edge(i, j)) for j in range(g.n)] for i in range(g.n)]
    assert hom_count_dense(h, mat) == hom_count(h, g)
    co = [[1 - x for x in row] for row in mat]
    assert Fraction(hom_count_dense(h, co), g.n ** h.n) == hom_density(h, complement_w(from_graph(g)))


def test_t_inj_values():
    k5, k14 = complete_graph(5), named_graph("K_1_4")
    assert t_inj(K3, k5) == 1
    assert t_inj(C5, complement(k5)) == 0
    assert t_inj(K3, k14) == 0
    assert t_inj(C5, complement(k14)) == 0
    with pytest.raises(DensityError):
        t_inj(K4, K3)


def test_induced_density():
    assert induced_density(K2, complete_graph(5)) == 1
    assert induced_density(K3, C5) == 0
    triples = list(itertools.combinations(range(5), 3))
    hits = sum(1 for t in triples if C5.induced(t).num_edges == 2)
    assert induced_density(P3, C5) == Fraction(hits, len(triples))


def test_t_ind_weighted_k1():
    w = WeightedGraph.from_rows([[Fraction(1, 3), 1], [1, 0]])
    assert t_ind_weighted(complete_graph(1), w) == 1


@pytest.mark.parametrize("ell", [3, 4, 5])
@settings(max_examples=8)
@given(w=weighted_graphs(max_n=3))
def test_induced_densities_sum_to_one(ell, w):
    assert sum(d_weighted(j, w) for j in enumerate_graphs(ell)) == 1


@pytest.mark.parametrize("h", [K3, C4, C5, named_graph("D")], ids=["K3", "C4", "C5", "D"])
@settings(max_examples=8)
@given(w=weighted_graphs(max_n=3))
def test_hom_density_expands_in_injective_densities(h, w):
    total = sum(t_inj(h, j) * d_weighted(j, w) for j in enumerate_graphs(h.n))
    assert total == hom_density(h, w)


@settings(max_examples=5)
@given(w=weighted_graphs(max_n=3))
def test_k3_expansion_at_five_vertices(w):
    assert sum(t_inj(K3, j) * d_weighted(j, w) for j in enumerate_graphs(5)) == hom_density(K3, w)


def test_cycle_density_trace():
    assert cycle_density_trace(3, named_graph("C6_complement")) == Fraction(1, 18)
    cw = complement_w(from_graph(named_graph("C6_complement")))
    assert cycle_density_trace(5, cw) == Fraction(17, 432)


@given(graphs(max_n=6), st.sampled_from([3, 4, 5]))
def test_cycle_trace_matches_hom(g, k):
    assert cycle_density_trace(k, g) == Fraction(brute_hom(cycle_graph(k), g), g.n ** k)


def test_goodman_values_on_k3xk4():
    w = from_graph(named_graph("K3xK4"))
    cw = complement_w(w)
    assert hom_density(K2, w) == hom_density(K2, cw) == Fraction(1, 2)
    assert hom_density(P3, w) == hom_density(P3, cw) == Fraction(1, 4)
    assert hom_density(K3, w) == Fraction(1, 12)
    assert hom_density(K3, cw) == Fraction(1, 6)
    lhs, rhs = goodman_check(w)
    assert lhs == rhs == Fraction(1, 4)
    assert goodman_check(ConstGraphon(Fraction(1, 2))) == (Fraction(1, 4), Fraction(1, 4))


@pytest.mark.parametrize("n", range(1, 7))
def test_goodman_on_all_small_graphs(n):
    for g in enumerate_graphs(n):
        lhs, rhs = goodman_check(from_graph(g))
        assert lhs == rhs


@settings(max_examples=100)
@given(weighted_graphs(max_n=6))
def test_goodman_on_weighted_graphs(w):
    lhs, rhs = goodman_check(w)
    assert lhs == rhs


def test_objective_values():
    lam = Fraction(10, 17)
    c6bar, k2 = from_graph(named_graph("C6_complement")), from_graph(K2)
    assert objective(K3, C5, lam, c6bar) == Fraction(3, 34)
    assert objective(K3, C5, lam, k2) == Fraction(3, 34)
    assert objective(K3, C5, lam, from_graph(named_graph("H_fig2"))) == Fraction(3, 34)
    with pytest.raises(DensityError):
        objective(K3, C5, Fraction(3), k2)
    with pytest.raises(DensityError):
        objective(K3, empty_graph(3), 1, k2)
    assert objective(K3, empty_graph(3), 1, k2, allow_empty=True) == 1


@given(weighted_graphs(max_n=4), st.builds(Fraction, st.integers(0, 8), st.just(4)))
def test_objective_in_range(w, lam):
    assert 0 <= objective(K3, C4, lam, w) <= 2


def test_trivial_lower_bound():
    assert trivial_lower_bound(1, 6, 3, 3) == Fraction(1, 120)
    assert trivial_lower_bound(0, 6, 3, 3) == 0
    assert trivial_lower_bound(1, 9, 3, 4) == Fraction(1, 3024)
    with pytest.raises(DensityError):
        trivial_lower_bound(1, 2, 3, 3)


def test_lambda0():
    assert compute_lambda0(3, 3, Fraction(1, 2)) == 1
    assert compute_lambda0(5, 5, Fraction(1, 2)) == 1
    with pytest.raises(DensityError):
        compute_lambda0(3, 5, 0)


def test_lambda0_is_a_stationary_point():
    # p solves p^3 = (1-p)^5; at lambda0 the derivative of
    # lam*p^3 + (2-lam)*(1-p)^5 in p vanishes
    lo, hi = balance_p(3, 5, Fraction(1, 10**12))
    p = (lo + hi) / 2
    lam = compute_lambda0(3, 5, p)
    deriv = lam * 3 * p ** 2 - (2 - lam) * 5 * (1 - p) ** 4
    assert abs(float(deriv)) < 1e-9
    assert 0 < lam < 2


def test_balance_p():
    assert balance_p(4, 4) == (Fraction(1, 2), Fraction(1, 2))
    assert 2 * Fraction(1, 2) ** 5 == Fraction(1, 16)
    lo, hi = balance_p(1, 2, Fraction(1, 10**9))
    assert hi - lo <= Fraction(1, 10**9)
    assert lo <= (3 - math.sqrt(5)) / 2 <= hi
