from fractions import Fraction

from hypothesis import HealthCheck, settings, strategies as st

from ramsey_flags.densities import WeightedGraph
from ramsey_flags.graphs import Graph

settings.register_profile("repo", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


@st.composite
def graphs(draw, min_n=1, max_n=6):
    n = draw(st.integers(min_n, max_n))
    pairs = [(u, v) for v in range(n) for u in range(v)]
    mask = draw(st.integers(0, (1 << len(pairs)) - 1))
    rows = [0] * n
    for i, (u, v) in enumerate(pairs):
        if mask >> i & 1:
            rows[u] |= 1 << v
            rows[v] |= 1 << u
    return Graph(n, tuple(rows))


rationals01 = st.builds(lambda p, q: Fraction(min(p, q), q),
                        st.integers(0, 12), st.integers(1, 12))


@st.composite
def weighted_graphs(draw, min_n=1, max_n=4, diagonal=True):
    n = draw(st.integers(min_n, max_n))
    w = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            if i == j and not diagonal:
                continue
            w[i][j] = w[j][i] = draw(rationals01)
    return WeightedGraph(n, tuple(tuple(r) for r in w))


@st.composite
def permutations(draw, n):
    return draw(st.permutations(list(range(n))))
