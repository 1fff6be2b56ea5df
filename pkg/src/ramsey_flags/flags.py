"""Rooted graphs (flags) and the coefficients that expand a product of two
flags into induced densities of unrooted graphs."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .graphs import Graph, GraphError, _min_labeling, encode, enumerate_graphs, from_edge_list
from .densities import Graphon, ConstGraphon, WeightedGraph, induced_density

MAX_FLAG_SIZE = 5


class FlagError(ValueError):
    pass


@dataclass(frozen=True)
class Flag:
    """A graph on ``0..k-1`` whose first ``r`` vertices are labelled roots."""

    graph: Graph
    r: int

    def __post_init__(self):
        if not 0 <= self.r <= self.graph.n:
            raise FlagError(f"root count {self.r} outside 0..{self.graph.n}")

    @property
    def k(self) -> int:
        return self.graph.n

    @property
    def root_graph(self) -> Graph | None:
        return self.graph.induced(range(self.r)) if self.r else None

    def canonical_code(self) -> int:
        return _min_labeling(self.graph, fixed=self.r)[0]

    def labeled_count(self) -> int:
        """How many labelled graphs (roots fixed) are root-isomorphic to this flag."""
        free = self.k - self.r
        return math.factorial(free) // rooted_automorphism_count(self)

    def to_text(self) -> str:
        return f"{self.k} {self.r}; " + ",".join(f"{u}-{v}" for u, v in self.graph.edges)

    @classmethod
    def from_text(cls, text: str) -> "Flag":
        head, sep, tail = text.partition(";")
        if not sep:
            raise FlagError(f"expected 'k r; edges', got {text!r}")
        try:
            k, r = (int(x) for x in head.split())
        except ValueError:
            raise FlagError(f"bad flag header {head!r}") from None
        edges = []
        for item in tail.replace(" ", "").split(","):
            if item:
                a, _, b = item.partition("-")
                edges.append((int(a), int(b)))
        return cls(from_edge_list(k, edges), r)

    @classmethod
    def from_edges(cls, k: int, r: int, edges) -> "Flag":
        return cls(from_edge_list(k, edges), r)


def rooted_automorphism_count(f: Flag) -> int:
    k, r, adj = f.k, f.r, f.graph.adj
    count = 0
    for perm in itertools.permutations(range(r, k)):
        img = list(range(r)) + list(perm)
        if all((adj[a] >> b & 1) == (adj[img[a]] >> img[b] & 1) for a in range(k) for b in range(a)):
            count += 1
    return count


def flag_isomorphic(f1: Flag, f2: Flag) -> bool:
    """True iff some isomorphism maps f1 onto f2 fixing every root."""
    if f1.r != f2.r or f1.k != f2.k:
        raise FlagError("flags must share root count and size")
    if f1.graph.num_edges != f2.graph.num_edges:
        return False
    return f1.canonical_code() == f2.canonical_code()


@dataclass(frozen=True)
class FlagFamily:
    root: Graph | None
    k: int
    flags: tuple[Flag, ...]

    @property
    def r(self) -> int:
        return self.root.n if self.root is not None else 0

    def __len__(self):
        return len(self.flags)

    def __iter__(self):
        return iter(self.flags)

    def __getitem__(self, i):
        return self.flags[i]


def enumerate_flags(root: Graph | None, k: int) -> FlagFamily:
    """All ``k``-vertex flags whose first r vertices induce ``root``, one per
    root-fixing isomorphism class, ordered by (edge count, canonical code)."""
    r = root.n if root is not None else 0
    if not r <= k <= MAX_FLAG_SIZE:
        raise FlagError(f"flag size {k} must satisfy r={r} <= k <= {MAX_FLAG_SIZE}")
    free_pairs = [(a, b) for b in range(r, k) for a in range(b)]
    root_edges = root.edges if root is not None else []
    reps: dict[int, Flag] = {}
    for mask in range(1 << len(free_pairs)):
        edges = list(root_edges) + [p for i, p in enumerate(free_pairs) if mask >> i & 1]
        g = from_edge_list(k, edges)
        code, order = _min_labeling(g, fixed=r)
        if code not in reps:
            perm = [0] * k
            for new, old in enumerate(order):
                perm[old] = new
            reps[code] = Flag(g.relabel(perm), r)
    flags = sorted(reps.items(), key=lambda kv: (kv[1].graph.num_edges, kv[0]))
    return FlagFamily(root, k, tuple(f for _, f in flags))


def check_family(flags: Sequence[Flag]) -> Graph | None:
    """Validate a hand-written flag list; returns the common root graph."""
    if not flags:
        raise FlagError("empty flag list")
    r, k = flags[0].r, flags[0].k
    root = flags[0].root_graph
    seen = set()
    for f in flags:
        if f.r != r or f.k != k:
            raise FlagError("flags in one family must share r and k")
        if f.root_graph != root:
            raise FlagError(f"flag {f.to_text()} does not induce the common root graph")
        code = f.canonical_code()
        if code in seen:
            raise FlagError(f"flag {f.to_text()} repeats an earlier flag up to root-fixing isomorphism")
        seen.add(code)
    return root


# ---------------------------------------------------------------------------
# coefficients


def _pattern(adj, vs) -> int:
    # encode() of the graph induced on the ordered vertex list vs
    code = 0
    for j in range(1, len(vs)):
        row = adj[vs[j]]
        for i in range(j):
            code = code << 1 | (row >> vs[i] & 1)
    return code


def pair_counts(flags: Sequence[Flag], j: Graph) -> tuple[dict[tuple[int, int], int], int]:
    """Count ordered placements (roots, extension 1, extension 2) into ``j``.

    Every injective sequence of ``2k - r`` vertices of ``j`` is one sample;
    the labelled graph on roots + extension i must equal a flag in ``flags``
    exactly (not just up to isomorphism).  Returns counts keyed by the pair of
    flag indices and the total number of samples, so the coefficient is
    ``count / total``.  When ``v(j) > 2k - r`` this is the lifted coefficient.
    """
    r, k = flags[0].r, flags[0].k
    m = 2 * k - r
    n = j.n
    if n < m:
        raise FlagError(f"target graph has {n} vertices, needs at least 2k-r={m}")
    index = {encode(f.graph): i for i, f in enumerate(flags)}
    root_code = encode(flags[0].graph.induced(range(r))) if r else 0
    adj = j.adj
    counts: dict[tuple[int, int], int] = {}
    verts = range(n)
    for roots in itertools.permutations(verts, r):
        if r and _pattern(adj, roots) != root_code:
            continue
        left = [v for v in verts if v not in roots]
        ext_index = {}
        for ext in itertools.permutations(left, k - r):
            i = index.get(_pattern(adj, roots + ext))
            if i is not None:
                ext_index[ext] = i
        for e1, i1 in ext_index.items():
            for e2, i2 in ext_index.items():
                if not set(e1) & set(e2):
                    counts[i1, i2] = counts.get((i1, i2), 0) + 1
    return counts, math.perm(n, m)


def a_coeff(f1: Flag, f2: Flag, j: Graph) -> Fraction:
    """Coefficient of d(J, W) in the integrated product of f1 and f2 (v(J) = 2k-r)."""
    _check_pair(f1, f2)
    if j.n != 2 * f1.k - f1.r:
        raise FlagError(f"a_coeff needs v(J) = 2k-r = {2 * f1.k - f1.r}, got {j.n}")
    return a_coeff_lifted(f1, f2, j, j.n)


def a_coeff_lifted(f1: Flag, f2: Flag, j: Graph, ell: int) -> Fraction:
    _check_pair(f1, f2)
    if j.n != ell:
        raise FlagError(f"J has {j.n} vertices but ell={ell}")
    if ell < 2 * f1.k - f1.r:
        raise FlagError(f"ell={ell} is smaller than 2k-r={2 * f1.k - f1.r}")
    flags = [f1] if f1.graph == f2.graph else [f1, f2]
    counts, total = pair_counts(flags, j)
    return Fraction(counts.get((0, len(flags) - 1), 0), total)


def a_coeff_lifted_by_sum(f1: Flag, f2: Flag, j: Graph, ell: int) -> Fraction:
    """Same as :func:`a_coeff_lifted`, via sum over J0 of a(J0) * d(J0, J)."""
    m = 2 * f1.k - f1.r
    if ell < m:
        raise FlagError(f"ell={ell} is smaller than 2k-r={m}")
    return sum((a_coeff(f1, f2, j0) * induced_density(j0, j) for j0 in enumerate_graphs(m)),
               Fraction(0))


def _check_pair(f1: Flag, f2: Flag):
    if f1.r != f2.r or f1.k != f2.k:
        raise FlagError("flags must share root count and size")
    if f1.root_graph != f2.root_graph:
        raise FlagError("flags have different root graphs")


def coefficient_table(flags: Sequence[Flag], j: Graph) -> list[list[Fraction]]:
    counts, total = pair_counts(flags, j)
    t = len(flags)
    return [[Fraction(counts.get((a, b), 0), total) for b in range(t)] for a in range(t)]


def flag_product_integral(f1: Flag, f2: Flag, w: Graphon) -> Fraction:
    """Integral over the root variables of t_ind,r(f1) * t_ind,r(f2) / t_ind(root),
    evaluated directly as a finite sum over cells of a step graphon."""
    _check_pair(f1, f2)
    if isinstance(w, ConstGraphon):
        w = WeightedGraph(1, ((w.p,),))
    n, r, k = w.n, f1.r, f1.k
    ww = w.w

    def factor(adj, cells, pairs):
        prod = Fraction(1)
        for a, b in pairs:
            x = ww[cells[a]][cells[b]]
            prod *= x if adj[a] >> b & 1 else 1 - x
            if not prod:
                break
        return prod

    root_pairs = [(a, b) for b in range(r) for a in range(b)]
    ext_pairs = [(a, b) for b in range(r, k) for a in range(b)]
    total = Fraction(0)
    for roots in itertools.product(range(n), repeat=r):
        rf = factor(f1.graph.adj, roots, root_pairs)
        if not rf:
            continue
        ext = []
        for f in (f1, f2):
            s = Fraction(0)
            for cells in itertools.product(range(n), repeat=k - r):
                s += factor(f.graph.adj, roots + cells, ext_pairs)
            ext.append(s / n ** (k - r))
        total += rf * ext[0] * ext[1]
    return total / n ** r


def flag_density(f: Flag, w: Graphon, roots: Sequence[int]) -> Fraction:
    """t_ind,r(f, W) at root cells ``roots`` (root-pattern factor included)."""
    if isinstance(w, ConstGraphon):
        w = WeightedGraph(1, ((w.p,),))
    n, r, k = w.n, f.r, f.k
    adj = f.graph.adj
    pairs = [(a, b) for b in range(k) for a in range(b)]
    total = Fraction(0)
    for cells in itertools.product(range(n), repeat=k - r):
        full = tuple(roots) + cells
        prod = Fraction(1)
        for a, b in pairs:
            x = w.w[full[a]][full[b]]
            prod *= x if adj[a] >> b & 1 else 1 - x
            if not prod:
                break
        total += prod
    return total / n ** (k - r)


__all__ = [
    "Flag", "FlagFamily", "FlagError", "enumerate_flags", "flag_isomorphic", "check_family",
    "a_coeff", "a_coeff_lifted", "a_coeff_lifted_by_sum", "coefficient_table", "pair_counts",
    "flag_product_integral", "flag_density", "rooted_automorphism_count", "GraphError",
]
