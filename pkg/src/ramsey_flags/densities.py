"""Exact homomorphism-type densities of small graphs in step graphons.

A :class:`WeightedGraph` on ``n`` parts is the step graphon that is constant
on each of the ``n x n`` cells.  Its diagonal may be nonzero: the complement
of a 0/1 step graphon has diagonal 1, which is what makes non-injective maps
count towards densities in ``1 - W``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Sequence, Union

from .exact import parse_rat
from .graphs import Graph, automorphism_count, cycle_graph, complete_graph, path_graph

MAX_PATTERN_VERTICES = 10
MAX_PARTS = 32
PARTIAL_PRODUCT_BUDGET = 10**9


class DensityError(ValueError):
    pass


@dataclass(frozen=True)
class WeightedGraph:
    n: int
    w: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if not 1 <= self.n <= MAX_PARTS:
            raise DensityError(f"part count {self.n} outside 1..{MAX_PARTS}")
        if len(self.w) != self.n or any(len(r) != self.n for r in self.w):
            raise DensityError("weight matrix must be n x n")
        for i in range(self.n):
            for j in range(self.n):
                x = self.w[i][j]
                if not 0 <= x <= 1:
                    raise DensityError(f"weight {x} at ({i},{j}) outside [0,1]")
                if x != self.w[j][i]:
                    raise DensityError(f"weights at ({i},{j}) and ({j},{i}) differ")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "WeightedGraph":
        return cls(len(rows), tuple(tuple(parse_rat(x) for x in r) for r in rows))

    def is_zero_one(self) -> bool:
        return all(x in (0, 1) for r in self.w for x in r)


@dataclass(frozen=True)
class ConstGraphon:
    p: Fraction

    def __post_init__(self):
        if not 0 <= self.p <= 1:
            raise DensityError(f"constant graphon value {self.p} outside [0,1]")


Graphon = Union[WeightedGraph, ConstGraphon]


def from_graph(g: Graph) -> WeightedGraph:
    one, zero = Fraction(1), Fraction(0)
    return WeightedGraph(g.n, tuple(tuple(one if g.adj[i] >> j & 1 else zero for j in range(g.n))
                                    for i in range(g.n)))


def complement_w(w: Graphon) -> Graphon:
    """1 - W entrywise, diagonal included."""
    if isinstance(w, ConstGraphon):
        return ConstGraphon(1 - w.p)
    return WeightedGraph(w.n, tuple(tuple(1 - x for x in r) for r in w.w))


def _scaled(w: WeightedGraph) -> tuple[list[list[int]], int]:
    den = reduce(math.lcm, (x.denominator for r in w.w for x in r), 1)
    return [[int(x * den) for x in r] for r in w.w], den


def _vertex_order(h: Graph) -> list[int]:
    # BFS-ish: next vertex is the one with most already-placed neighbours
    order: list[int] = []
    placed = 0
    remaining = set(range(h.n))
    while remaining:
        v = max(remaining, key=lambda u: ((h.adj[u] & placed).bit_count(), h.degree(u), -u))
        order.append(v)
        placed |= 1 << v
        remaining.remove(v)
    return order


def _hom_count_bits(h: Graph, rows: list[int], n: int, injective: bool) -> int:
    """Count maps V(h)->[n] (injective if asked) sending edges into ``rows``.

    ``rows[a]`` is a bitset of the parts b with weight 1 at (a,b); loops are
    encoded by bit a of rows[a].
    """
    order = _vertex_order(h)
    pos = {v: i for i, v in enumerate(order)}
    back = [[pos[u] for u in h.neighbors(v) if pos[u] < i] for i, v in enumerate(order)]
    k = h.n
    full = (1 << n) - 1
    img = [0] * k

    def rec(i: int, used: int) -> int:
        cand = full
        for j in back[i]:
            cand &= rows[img[j]]
        if injective:
            cand &= ~used
        if i == k - 1:
            return cand.bit_count()
        total = 0
        while cand:
            low = cand & -cand
            img[i] = low.bit_length() - 1
            total += rec(i + 1, used | low)
            cand ^= low
        return total

    return rec(0, 0)


def _hom_sum_weighted(h: Graph, wi: list[list[int]], n: int) -> int:
    order = _vertex_order(h)
    pos = {v: i for i, v in enumerate(order)}
    back = [[pos[u] for u in h.neighbors(v) if pos[u] < i] for i, v in enumerate(order)]
    k = h.n
    img = [0] * k
    work = 0

    def rec(i: int, acc: int) -> int:
        nonlocal work
        total = 0
        for a in range(n):
            work += 1
            prod = acc
            for j in back[i]:
                prod *= wi[img[j]][a]
                if not prod:
                    break
            if not prod:
                continue
            if i == k - 1:
                total += prod
            else:
                img[i] = a
                total += rec(i + 1, prod)
        if work > PARTIAL_PRODUCT_BUDGET:
            raise DensityError("partial product budget exceeded")
        return total

    return rec(0, 1)


def hom_density(h: Graph, w: Graphon) -> Fraction:
    """t(h, W): average over all maps V(h) -> parts of the product of edge weights."""
    if isinstance(w, ConstGraphon):
        return w.p ** h.num_edges
    if h.n > MAX_PATTERN_VERTICES:
        raise DensityError(f"pattern has {h.n} vertices, limit {MAX_PATTERN_VERTICES}")
    n = w.n
    if w.is_zero_one():
        rows = [sum(1 << b for b in range(n) if w.w[a][b]) for a in range(n)]
        return Fraction(_hom_count_bits(h, rows, n, injective=False), n ** h.n)
    wi, den = _scaled(w)
    return Fraction(_hom_sum_weighted(h, wi, n), den ** h.num_edges * n ** h.n)


def hom_count(h: Graph, g: Graph) -> int:
    return _hom_count_bits(h, list(g.adj), g.n, injective=False)


@lru_cache(maxsize=256)
def _einsum_plan(h: Graph) -> tuple[str, int]:
    letters = "abcdefghijklmnopqrstuvwxyz"
    terms = [letters[u] + letters[v] for u, v in h.edges]
    isolated = sum(1 for v in range(h.n) if not h.adj[v])
    return ",".join(terms) + "->", isolated


def hom_count_dense(h: Graph, mat) -> int:
    """Number of homomorphisms from ``h`` into the 0/1 matrix ``mat`` (loops allowed).

    Tensor contraction in int64; exact as long as n ** v(h) fits, which is
    checked up front.
    """
    import numpy as np

    n = len(mat)
    if h.n > 26 or n ** h.n >= 2 ** 62:
        raise DensityError(f"{n}^{h.n} maps do not fit the int64 contraction")
    spec, isolated = _einsum_plan(h)
    if not h.num_edges:
        return n ** h.n
    m = np.asarray(mat, dtype=np.int64)
    total = int(np.einsum(spec, *([m] * h.num_edges), optimize="greedy"))
    return total * n ** isolated


def _falling(n: int, k: int) -> int:
    return math.perm(n, k)


def t_inj(h: Graph, j: Graph) -> Fraction:
    """Fraction of injective maps V(h) -> V(j) that are homomorphisms."""
    if h.n > j.n:
        raise DensityError(f"t_inj needs v(H)={h.n} <= v(J)={j.n}")
    return Fraction(_hom_count_bits(h, list(j.adj), j.n, injective=True), _falling(j.n, h.n))


def induced_count(f: Graph, j: Graph) -> int:
    """Number of injective maps V(f) -> V(j) preserving edges and non-edges."""
    k, n = f.n, j.n
    img: list[int] = []

    def rec(i: int, used: int) -> int:
        if i == k:
            return 1
        total = 0
        for a in range(n):
            if used >> a & 1:
                continue
            if all((f.adj[i] >> b & 1) == (j.adj[a] >> img[b] & 1) for b in range(i)):
                img.append(a)
                total += rec(i + 1, used | 1 << a)
                img.pop()
        return total

    return rec(0, 0)


def induced_density(f: Graph, j: Graph) -> Fraction:
    """Probability that a uniform v(f)-subset of V(j) induces a copy of f."""
    if f.n > j.n:
        raise DensityError(f"induced density needs v(F)={f.n} <= v(J)={j.n}")
    return Fraction(induced_count(f, j), automorphism_count(f) * math.comb(j.n, f.n))


def t_ind_weighted(j: Graph, w: Graphon) -> Fraction:
    """Induced density: average over all maps of prod_edges W * prod_nonedges (1-W)."""
    if isinstance(w, ConstGraphon):
        e = j.num_edges
        return w.p ** e * (1 - w.p) ** (math.comb(j.n, 2) - e)
    if j.n > 7:
        raise DensityError("induced weighted density limited to v(J) <= 7")
    wi, den = _scaled(w)
    n, k = w.n, j.n
    comp = [[den - x for x in r] for r in wi]
    img = [0] * k
    work = 0

    def rec(i: int, acc: int) -> int:
        nonlocal work
        total = 0
        row = j.adj[i]
        for a in range(n):
            work += 1
            prod = acc
            for b in range(i):
                prod *= wi[img[b]][a] if row >> b & 1 else comp[img[b]][a]
                if not prod:
                    break
            if not prod:
                continue
            if i == k - 1:
                total += prod
            else:
                img[i] = a
                total += rec(i + 1, prod)
        if work > PARTIAL_PRODUCT_BUDGET:
            raise DensityError("partial product budget exceeded")
        return total

    return Fraction(rec(0, 1), den ** math.comb(k, 2) * n ** k)


def d_weighted(j: Graph, w: Graphon) -> Fraction:
    return Fraction(math.factorial(j.n), automorphism_count(j)) * t_ind_weighted(j, w)


def cycle_density_trace(k: int, g: Union[Graph, WeightedGraph]) -> Fraction:
    """t(C_k, G) as trace(A^k) / n^k, computed with exact matrix powers."""
    if not 3 <= k <= 12:
        raise DensityError("cycle length must be in 3..12")
    if isinstance(g, Graph):
        a = [[g.adj[i] >> j & 1 for j in range(g.n)] for i in range(g.n)]
        n = g.n
    else:
        a = [list(r) for r in g.w]
        n = g.n
    p = a
    for _ in range(k - 1):
        p = [[sum(p[i][m] * a[m][j] for m in range(n)) for j in range(n)] for i in range(n)]
    return Fraction(sum(p[i][i] for i in range(n))) / n ** k


K2, K3, P3 = complete_graph(2), complete_graph(3), path_graph(3)


def goodman_check(w: Graphon) -> tuple[Fraction, Fraction]:
    """Both sides of Goodman's identity for t(K3,W) + t(K3,1-W)."""
    cw = complement_w(w)
    lhs = hom_density(K3, w) + hom_density(K3, cw)
    e, ec = hom_density(K2, w), hom_density(K2, cw)
    p, pc = hom_density(P3, w), hom_density(P3, cw)
    rhs = e ** 3 + ec ** 3 + Fraction(3, 2) * (p + pc - e ** 2 - ec ** 2)
    return lhs, rhs


def objective(h1: Graph, h2: Graph, lam, w: Graphon, allow_empty: bool = False) -> Fraction:
    """lambda * t(H1, W) + (2 - lambda) * t(H2, 1 - W)."""
    lam = Fraction(lam)
    if not 0 <= lam <= 2:
        raise DensityError(f"lambda={lam} outside [0,2]")
    if h2.num_edges == 0 and not allow_empty:
        raise DensityError("H2 has no edges; pass allow_empty=True to evaluate anyway")
    return lam * hom_density(h1, w) + (2 - lam) * hom_density(h2, complement_w(w))


def trivial_lower_bound(lam, ramsey_number: int, v1: int, v2: int) -> Fraction:
    """min(lambda, 2-lambda) * (r - max(v1,v2))! / r!"""
    lam = Fraction(lam)
    h = max(v1, v2)
    if ramsey_number < h:
        raise DensityError(f"Ramsey number {ramsey_number} is smaller than max(v1,v2)={h}")
    return min(lam, 2 - lam) * Fraction(math.factorial(ramsey_number - h), math.factorial(ramsey_number))


def compute_lambda0(e1: int, e2: int, p) -> Fraction:
    p = Fraction(p)
    if e1 < 1 or e2 < 1:
        raise DensityError("edge counts must be positive")
    if not 0 < p < 1:
        raise DensityError(f"p={p} must lie strictly between 0 and 1")
    a = e1 * p ** (e1 - 1)
    b = e2 * (1 - p) ** (e2 - 1)
    return 2 * b / (a + b)


def balance_p(e1: int, e2: int, precision=Fraction(1, 10**9)) -> tuple[Fraction, Fraction]:
    """Bracket the root of p^e1 = (1-p)^e2 in (0,1) to width <= precision."""
    if e1 < 1 or e2 < 1:
        raise DensityError("edge counts must be positive")
    if e1 == e2:
        return Fraction(1, 2), Fraction(1, 2)
    precision = Fraction(precision)
    lo, hi = Fraction(0), Fraction(1)
    while hi - lo > precision:
        mid = (lo + hi) / 2
        f = mid ** e1 - (1 - mid) ** e2
        if f == 0:
            return mid, mid
        if f < 0:
            lo = mid
        else:
            hi = mid
    return lo, hi
