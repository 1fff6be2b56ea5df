"""Small simple graphs stored as bitset adjacency rows.

Vertices are ``0..n-1``.  Each row ``adj[v]`` is an int whose bit ``u`` is set
when ``u`` and ``v`` are adjacent.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

# Enough for the 27-vertex Schläfli graph; rows are Python ints so wider is free.
MAX_VERTICES = 32


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    n: int
    adj: tuple[int, ...]

    def __post_init__(self):
        if not 1 <= self.n <= MAX_VERTICES:
            raise GraphError(f"vertex count {self.n} outside 1..{MAX_VERTICES}")
        if len(self.adj) != self.n:
            raise GraphError("need one adjacency row per vertex")
        for v, row in enumerate(self.adj):
            if row >> v & 1:
                raise GraphError(f"loop at vertex {v}")
            if row >> self.n:
                raise GraphError(f"row {v} references a vertex >= n")
            for u in _bits(row):
                if not self.adj[u] >> v & 1:
                    raise GraphError(f"asymmetric adjacency between {u} and {v}")

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def neighbors(self, v: int) -> list[int]:
        return list(_bits(self.adj[v]))

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for v in range(self.n) for u in range(v) if self.adj[v] >> u & 1]

    @property
    def num_edges(self) -> int:
        return sum(row.bit_count() for row in self.adj) // 2

    def induced(self, vs: Sequence[int]) -> "Graph":
        """Subgraph induced on ``vs``; vertex ``vs[i]`` becomes ``i``."""
        rows = []
        for v in vs:
            row = 0
            for i, u in enumerate(vs):
                if self.adj[v] >> u & 1:
                    row |= 1 << i
            rows.append(row)
        return Graph(len(vs), tuple(rows))

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Graph in which old vertex ``v`` is renamed ``perm[v]``."""
        rows = [0] * self.n
        for v in range(self.n):
            row = 0
            for u in _bits(self.adj[v]):
                row |= 1 << perm[u]
            rows[perm[v]] = row
        return Graph(self.n, tuple(rows))

    def to_edge_list(self) -> str:
        return format_edge_list(self)

    def to_graph6(self) -> str:
        return to_graph6(self)

    def __repr__(self):
        return f"Graph({self.to_edge_list()!r})"


def _bits(x: int):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def from_edge_list(n: int, edges: Iterable[tuple[int, int]]) -> Graph:
    if not 1 <= n <= MAX_VERTICES:
        raise GraphError(f"vertex count {n} outside 1..{MAX_VERTICES}")
    rows = [0] * n
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"edge ({u},{v}) has an endpoint outside 0..{n - 1}")
        if u == v:
            raise GraphError(f"loop edge ({u},{v})")
        rows[u] |= 1 << v
        rows[v] |= 1 << u
    return Graph(n, tuple(rows))


def empty_graph(n: int) -> Graph:
    return Graph(n, (0,) * n)


def complete_graph(n: int) -> Graph:
    full = (1 << n) - 1
    return Graph(n, tuple(full & ~(1 << v) for v in range(n)))


def cycle_graph(n: int) -> Graph:
    return from_edge_list(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    return from_edge_list(n, [(i, i + 1) for i in range(n - 1)])


def complement(g: Graph) -> Graph:
    full = (1 << g.n) - 1
    return Graph(g.n, tuple(full & ~row & ~(1 << v) for v, row in enumerate(g.adj)))


# ---------------------------------------------------------------------------
# text formats


def format_edge_list(g: Graph) -> str:
    return f"{g.n}; " + ",".join(f"{u}-{v}" for u, v in g.edges)


def parse_edge_list(text: str) -> Graph:
    """Parse ``"n; u-v,u-v,..."``; the edge part may be empty."""
    head, sep, tail = text.partition(";")
    if not sep:
        raise GraphError(f"expected 'n; edges', got {text!r}")
    n = int(head.strip())
    edges = []
    for item in tail.replace(" ", "").split(","):
        if not item:
            continue
        a, dash, b = item.partition("-")
        if not dash:
            raise GraphError(f"bad edge token {item!r}")
        edges.append((int(a), int(b)))
    return from_edge_list(n, edges)


def to_graph6(g: Graph) -> str:
    if g.n > 62:
        raise GraphError("graph6 short form only covers n <= 62")
    bits = [g.adj[j] >> i & 1 for j in range(1, g.n) for i in range(j)]
    bits += [0] * (-len(bits) % 6)
    out = [chr(g.n + 63)]
    for k in range(0, len(bits), 6):
        val = 0
        for b in bits[k:k + 6]:
            val = val << 1 | b
        out.append(chr(val + 63))
    return "".join(out)


def from_graph6(text: str) -> Graph:
    text = text.strip()
    if text.startswith(">>graph6<<"):
        text = text[10:]
    if not text or not 63 <= ord(text[0]) <= 125:
        raise GraphError(f"bad graph6 string {text!r}")
    n = ord(text[0]) - 63
    if n == 0:
        raise GraphError("graph6 string encodes an empty vertex set")
    need = n * (n - 1) // 2
    bits = []
    for ch in text[1:]:
        val = ord(ch) - 63
        if not 0 <= val < 64:
            raise GraphError(f"bad graph6 character {ch!r}")
        bits.extend(val >> s & 1 for s in range(5, -1, -1))
    if len(bits) < need or len(text) - 1 != (need + 5) // 6:
        raise GraphError(f"graph6 string has wrong length for n={n}")
    edges = []
    k = 0
    for j in range(1, n):
        for i in range(j):
            if bits[k]:
                edges.append((i, j))
            k += 1
    return from_edge_list(n, edges)


# ---------------------------------------------------------------------------
# canonical forms


@dataclass(frozen=True, order=True)
class CanonicalForm:
    n: int
    canon_bits: int


def encode(g: Graph) -> int:
    """Upper triangle read column by column, (0,1),(0,2),(1,2),(0,3)... ; first
    pair is the most significant bit.  Same bit order as graph6."""
    code = 0
    for j in range(1, g.n):
        row = g.adj[j]
        for i in range(j):
            code = code << 1 | (row >> i & 1)
    return code


def canonical_form_bruteforce(g: Graph) -> CanonicalForm:
    """Minimum of :func:`encode` over every vertex permutation."""
    if g.n > 10:
        raise GraphError("brute-force canonical form is limited to n <= 10")
    best = min(encode(g.relabel(p)) for p in itertools.permutations(range(g.n)))
    return CanonicalForm(g.n, best)


def _min_labeling(g: Graph, fixed: int = 0) -> tuple[int, list[int]]:
    """Branch and bound for the lexicographically minimal encoding.

    Position ``m`` of the new labeling is filled vertex by vertex; its column
    of bits against positions ``0..m-1`` is the next chunk of the encoding, so
    a partial labeling whose chunks already exceed the best prefix is cut.
    The first ``fixed`` vertices keep their labels.
    """
    n = g.n
    adj = g.adj
    best: list[int] | None = None
    best_order: list[int] = []
    order = list(range(fixed))
    cols = [_column(adj, order[:m], order[m]) for m in range(1, fixed)]

    def rec(used: int):
        nonlocal best, best_order
        m = len(order)
        tight = False
        if best is not None:
            pref = best[:len(cols)]
            if cols > pref:
                return
            tight = cols == pref
        if m == n:
            if best is None or cols < best:
                best = list(cols)
                best_order = list(order)
            return
        cand = sorted((_column(adj, order, v), v) for v in range(n) if not used >> v & 1)
        for col, v in cand:
            if m and tight and best is not None and col > best[m - 1]:
                break
            order.append(v)
            if m:
                cols.append(col)
            rec(used | 1 << v)
            order.pop()
            if m:
                cols.pop()

    rec((1 << fixed) - 1)
    code = 0
    for m, col in enumerate(best or [], start=1):
        code = code << m | col
    return code, best_order


def _column(adj, order, v) -> int:
    # bits (order[0],v), (order[1],v), ... with the first as most significant
    col = 0
    row = adj[v]
    for u in order:
        col = col << 1 | (row >> u & 1)
    return col


def canonical_form(g: Graph) -> CanonicalForm:
    code, _ = _min_labeling(g)
    return CanonicalForm(g.n, code)


def canonical_labeling(g: Graph) -> Graph:
    """Representative with the minimal encoding (isomorphic to ``g``)."""
    _, order = _min_labeling(g)
    perm = [0] * g.n
    for new, old in enumerate(order):
        perm[old] = new
    return g.relabel(perm)


def are_isomorphic(g: Graph, h: Graph) -> bool:
    if g.n != h.n or g.num_edges != h.num_edges:
        return False
    if sorted(map(int.bit_count, g.adj)) != sorted(map(int.bit_count, h.adj)):
        return False
    return canonical_form(g) == canonical_form(h)


def automorphism_count(g: Graph) -> int:
    """Number of vertex permutations preserving the edge set (backtracking)."""
    n = g.n
    adj = g.adj
    deg = [row.bit_count() for row in adj]
    img: list[int] = []

    def rec(used: int) -> int:
        v = len(img)
        if v == n:
            return 1
        total = 0
        for w in range(n):
            if used >> w & 1 or deg[w] != deg[v]:
                continue
            ok = True
            for u in range(v):
                if (adj[v] >> u & 1) != (adj[w] >> img[u] & 1):
                    ok = False
                    break
            if ok:
                img.append(w)
                total += rec(used | 1 << w)
                img.pop()
        return total

    return rec(0)


# ---------------------------------------------------------------------------
# enumeration

MAX_ENUMERATION_ORDER = 8


@lru_cache(maxsize=None)
def _enumerate(ell: int) -> tuple[Graph, ...]:
    if ell == 1:
        return (Graph(1, (0,)),)
    seen: dict[int, Graph] = {}
    for g in _enumerate(ell - 1):
        for mask in range(1 << (ell - 1)):
            rows = [row | ((mask >> v & 1) << (ell - 1)) for v, row in enumerate(g.adj)]
            rows.append(mask)
            h = Graph(ell, tuple(rows))
            code, order = _min_labeling(h)
            if code not in seen:
                perm = [0] * ell
                for new, old in enumerate(order):
                    perm[old] = new
                seen[code] = h.relabel(perm)
    return tuple(seen[c] for c in sorted(seen))


def enumerate_graphs(ell: int) -> list[Graph]:
    """One canonically labelled representative per isomorphism class on
    ``ell`` vertices, sorted by canonical encoding."""
    if not 1 <= ell <= MAX_ENUMERATION_ORDER:
        raise GraphError(f"enumeration supports 1 <= ell <= {MAX_ENUMERATION_ORDER}")
    return list(_enumerate(ell))


# ---------------------------------------------------------------------------
# constructions


def tensor_product(g: Graph, h: Graph) -> Graph:
    """(u,x) ~ (v,y) iff u~v in g and x~y in h; vertex (u,x) is u*h.n + x."""
    n = g.n * h.n
    if n > MAX_VERTICES:
        raise GraphError(f"tensor product would have {n} vertices")
    edges = []
    for u, v in g.edges:
        for x, y in h.edges:
            edges.append((u * h.n + x, v * h.n + y))
            edges.append((u * h.n + y, v * h.n + x))
    return from_edge_list(n, edges)


def duplicate_vertices(g: Graph, vs: Sequence[int]) -> Graph:
    """Append a clone of each vertex in ``vs``.

    A clone ``v'`` is adjacent to ``w`` iff ``v ~ w``, where ``w`` ranges over
    originals and the other clones (a clone of ``u`` counts as ``u``), and is
    never adjacent to its own original.
    """
    vs = list(vs)
    n = g.n + len(vs)
    if n > MAX_VERTICES:
        raise GraphError(f"duplication would give {n} vertices")
    origin = list(range(g.n)) + vs
    edges = [(a, b) for b in range(n) for a in range(b) if g.has_edge(origin[a], origin[b])]
    return from_edge_list(n, edges)


def _schlafli_intersection() -> Graph:
    # 27 lines on a cubic surface: a_i (0..5), b_i (6..11), c_ij (12..26)
    pairs = list(itertools.combinations(range(6), 2))
    idx = {("a", i): i for i in range(6)}
    idx.update({("b", i): 6 + i for i in range(6)})
    idx.update({("c", p): 12 + k for k, p in enumerate(pairs)})
    edges = []
    for i in range(6):
        for j in range(6):
            if i != j:
                edges.append((idx["a", i], idx["b", j]))
    for p in pairs:
        for k in p:
            edges.append((idx["c", p], idx["a", k]))
            edges.append((idx["c", p], idx["b", k]))
        for q in pairs:
            if p < q and not set(p) & set(q):
                edges.append((idx["c", p], idx["c", q]))
    return from_edge_list(27, edges)


def schlafli_graph() -> Graph:
    """The 16-regular Schläfli graph: complement of the 27-lines intersection graph."""
    return complement(_schlafli_intersection())


def _build_named() -> dict[str, Graph]:
    c6bar = complement(cycle_graph(6))
    named = {
        "K1": complete_graph(1),
        "K2": complete_graph(2),
        "K3": complete_graph(3),
        "K4": complete_graph(4),
        "K5": complete_graph(5),
        "C4": cycle_graph(4),
        "C5": cycle_graph(5),
        "C6": cycle_graph(6),
        "P3": path_graph(3),
        "B": from_edge_list(5, [(0, 1), (1, 2), (2, 3), (3, 0), (2, 4)]),
        "D": from_edge_list(4, [(0, 1), (1, 2), (2, 3), (3, 0), (1, 3)]),
        "M": from_edge_list(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3)]),
        "K_1_4": from_edge_list(5, [(0, i) for i in range(1, 5)]),
        "bowtie": from_edge_list(5, [(0, 1), (0, 2), (1, 2), (0, 3), (0, 4), (3, 4)]),
        "C6_complement": c6bar,
        "K3xK4": tensor_product(complete_graph(3), complete_graph(4)),
        "Schlafli": schlafli_graph(),
        "Schlafli_complement": _schlafli_intersection(),
    }
    # C6 is 0-1-2-3-4-5-0; in its complement 0~3 and 0,3 share no neighbour
    named["H_fig2"] = duplicate_vertices(c6bar, [0, 3])
    return named


_NAMED: dict[str, Graph] | None = None


def named_graph(name: str) -> Graph:
    global _NAMED
    if _NAMED is None:
        _NAMED = _build_named()
    try:
        return _NAMED[name]
    except KeyError:
        raise GraphError(f"unknown graph name {name!r}; known: {', '.join(sorted(_NAMED))}") from None


def named_graph_names() -> list[str]:
    named_graph("K1")
    return sorted(_NAMED)


def parse_graph(text: str) -> Graph:
    """Accept ``named:X``, a bare known name, an edge list ``n; u-v,...`` or graph6."""
    text = text.strip()
    if text.startswith("named:"):
        return named_graph(text[6:])
    if ";" in text:
        return parse_edge_list(text)
    if text in named_graph_names():
        return named_graph(text)
    return from_graph6(text)
