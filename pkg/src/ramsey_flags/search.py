"""Random regular graphs and a switching hill climb on the objective
lam * t(H1, W_G) + (2 - lam) * t(H2, 1 - W_G)."""
from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .densities import hom_count_dense
from .graphs import Graph, GraphError

MAX_SEARCH_ORDER = 16
MAX_PAIRING_ATTEMPTS = 10_000_000


class SearchError(ValueError):
    pass


def random_regular(n: int, d: int, seed=None) -> Graph:
    """A simple d-regular graph from the configuration model.

    The whole pairing is redrawn whenever it produces a loop or a repeated
    edge, so the result is uniform over simple d-regular graphs.
    """
    if n * d % 2:
        raise SearchError(f"n*d = {n * d} is odd")
    if not 0 <= d < n <= MAX_SEARCH_ORDER:
        raise SearchError(f"need 0 <= d < n <= {MAX_SEARCH_ORDER}, got n={n}, d={d}")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    randrange = rng.randrange
    for _ in range(MAX_PAIRING_ATTEMPTS):
        # uniform perfect matching of the n*d points, drawn one pair at a time so
        # a collision aborts the attempt early
        points = [v for v in range(n) for _ in range(d)]
        seen = [0] * n
        for top in range(len(points) - 1, 0, -2):
            i = randrange(top)
            a, b = points[top], points[i]
            points[i] = points[top - 1]
            if a == b or seen[a] >> b & 1:
                break
            seen[a] |= 1 << b
            seen[b] |= 1 << a
        else:
            return Graph(n, tuple(seen))
    raise SearchError(f"no simple pairing found in {MAX_PAIRING_ATTEMPTS} attempts")


def switch(g: Graph, u1: int, v1: int, u2: int, v2: int) -> Graph:
    """Replace edges u1v1, u2v2 by u1v2, u2v1."""
    if len({u1, v1, u2, v2}) != 4:
        raise GraphError("a switch needs four distinct vertices")
    if not (g.has_edge(u1, v1) and g.has_edge(u2, v2)):
        raise GraphError(f"edges {u1}-{v1} and {u2}-{v2} must both be present")
    if g.has_edge(u1, v2) or g.has_edge(u2, v1):
        raise GraphError(f"edges {u1}-{v2} and {u2}-{v1} must both be absent")
    adj = list(g.adj)
    for a, b in ((u1, v1), (u2, v2)):
        adj[a] &= ~(1 << b)
        adj[b] &= ~(1 << a)
    for a, b in ((u1, v2), (u2, v1)):
        adj[a] |= 1 << b
        adj[b] |= 1 << a
    return Graph(g.n, tuple(adj))


def valid_switches(g: Graph) -> list[tuple[int, int, int, int]]:
    out = []
    edges = [(u, v) for u, v in g.edges] + [(v, u) for u, v in g.edges]
    for u1, v1 in edges:
        for u2, v2 in edges:
            if (u1 < u2 and len({u1, v1, u2, v2}) == 4
                    and not g.has_edge(u1, v2) and not g.has_edge(u2, v1)):
                out.append((u1, v1, u2, v2))
    return out


def _random_switch(g: Graph, rng: random.Random, tries: int = 1000):
    edges = g.edges
    if len(edges) < 2:
        return None
    for _ in range(tries):
        (u1, v1), (u2, v2) = rng.sample(edges, 2)
        if rng.random() < 0.5:
            u2, v2 = v2, u2
        if (len({u1, v1, u2, v2}) == 4
                and not g.has_edge(u1, v2) and not g.has_edge(u2, v1)):
            return u1, v1, u2, v2
    # rejection keeps failing: fall back to an explicit draw, if any exist
    moves = valid_switches(g)
    return rng.choice(moves) if moves else None


def graph_objective(h1: Graph, h2: Graph, lam: Fraction, g: Graph) -> Fraction:
    """objective(h1, h2, lam, from_graph(g)) via exact integer contractions."""
    n = g.n
    a = [[g.adj[i] >> j & 1 for j in range(n)] for i in range(n)]
    co = [[1 - x for x in row] for row in a]  # diagonal 1
    red = Fraction(hom_count_dense(h1, a), n ** h1.n)
    blue = Fraction(hom_count_dense(h2, co), n ** h2.n)
    return lam * red + (2 - lam) * blue


@dataclass(frozen=True)
class SearchConfig:
    h1: Graph
    h2: Graph
    lam: Fraction
    n: int = 12
    d: int = 6
    max_iters: int = 5000
    restarts: int = 20
    seed: int = 0
    target: Fraction | None = None  # stop as soon as a value <= target is accepted

    def __post_init__(self):
        if self.n * self.d % 2:
            raise SearchError(f"n*d = {self.n * self.d} is odd")
        if not 0 <= self.d < self.n <= MAX_SEARCH_ORDER:
            raise SearchError(f"need d < n <= {MAX_SEARCH_ORDER}")
        if not 0 <= self.lam <= 2:
            raise SearchError(f"lambda={self.lam} outside [0,2]")
        if self.max_iters < 0 or self.restarts < 1:
            raise SearchError("max_iters must be >= 0 and restarts >= 1")


@dataclass
class SearchTrace:
    """Accepted steps as (restart, iteration, value); iteration 0 is the start."""

    steps: list[tuple[int, int, Fraction]] = field(default_factory=list)
    best_graph: Graph | None = None
    best_value: Fraction | None = None
    lowest_seen: Fraction | None = None  # over every evaluated switch, accepted or not
    evaluations: int = 0

    @property
    def values(self) -> list[Fraction]:
        return [v for _, _, v in self.steps]

    def to_tsv(self) -> str:
        lines = ["restart\titeration\tobjective\tdecimal"]
        for r, it, v in self.steps:
            lines.append(f"{r}\t{it}\t{v.numerator}/{v.denominator}\t{float(v):.12g}")
        return "\n".join(lines) + "\n"


def _climb(cfg: SearchConfig, restart: int):
    rng = random.Random(cfg.seed * 1_000_003 + restart)
    g = random_regular(cfg.n, cfg.d, rng)
    value = graph_objective(cfg.h1, cfg.h2, cfg.lam, g)
    steps = [(restart, 0, value)]
    lowest, evals = value, 1
    for it in range(1, cfg.max_iters + 1):
        if cfg.target is not None and value <= cfg.target:
            break
        move = _random_switch(g, rng)
        if move is None:
            break
        cand = switch(g, *move)
        v = graph_objective(cfg.h1, cfg.h2, cfg.lam, cand)
        evals += 1
        lowest = min(lowest, v)
        if v < value:
            g, value = cand, v
            steps.append((restart, it, v))
    return steps, g, value, lowest, evals


def hill_climb(cfg: SearchConfig, threads: int = 1) -> SearchTrace:
    """Random restarts of a strict-descent switching walk; deterministic in ``cfg.seed``."""
    trace = SearchTrace()
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_climb, [cfg] * cfg.restarts, range(cfg.restarts)))
    else:
        results = []
        for r in range(cfg.restarts):
            results.append(_climb(cfg, r))
            if cfg.target is not None and results[-1][2] <= cfg.target:
                break
    for steps, g, value, lowest, evals in results:
        trace.steps.extend(steps)
        trace.evaluations += evals
        if trace.best_value is None or value < trace.best_value:
            trace.best_graph, trace.best_value = g, value
        if trace.lowest_seen is None or lowest < trace.lowest_seen:
            trace.lowest_seen = lowest
    return trace


__all__ = ["SearchConfig", "SearchTrace", "SearchError", "random_regular", "switch",
           "valid_switches", "graph_objective", "hill_climb"]
