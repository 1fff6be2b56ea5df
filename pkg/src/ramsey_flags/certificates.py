"""Certificates in both directions.

A lower-bound certificate is a list of flag blocks with PSD matrices; it is
checked by evaluating, for every graph J on ``ell`` vertices,

    lam * t_inj(H1, J) + (2 - lam) * t_inj(H2, co-J) - sum_q <A_q, a_q(J)>

and comparing the minimum with ``alpha``.  An alpha-certificate is a pair of
graphons whose objective values are both at most ``alpha``.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, reduce
from pathlib import Path
from typing import Iterable, Sequence

from .densities import ConstGraphon, Graphon, WeightedGraph, complement_w, hom_density, t_inj
from .exact import PsdVerdict, RatMatrix, format_rat, is_psd, parse_rat
from .flags import Flag, FlagError, check_family, enumerate_flags, flag_density, pair_counts
from .graphs import Graph, complement, enumerate_graphs, from_graph6, to_graph6

FORMAT_VERSION = 1
DATA_DIR = Path(__file__).with_name("data")


class CertificateError(ValueError):
    pass


# ---------------------------------------------------------------------------
# data model


@dataclass(frozen=True)
class FlagBlock:
    """One PSD block: ordered flags and the matrix ``scale * matrix``."""

    flags: tuple[Flag, ...]
    matrix: RatMatrix
    scale: Fraction = Fraction(1)

    def __post_init__(self):
        if not self.flags:
            raise CertificateError("a block needs at least one flag")
        try:
            check_family(self.flags)
        except FlagError as exc:
            raise CertificateError(str(exc)) from None
        if self.r < 1:
            raise CertificateError("blocks need at least one root vertex")
        if self.matrix.dim != len(self.flags):
            raise CertificateError(
                f"matrix is {self.matrix.dim}x{self.matrix.dim} but the block has {len(self.flags)} flags")

    @property
    def r(self) -> int:
        return self.flags[0].r

    @property
    def k(self) -> int:
        return self.flags[0].k

    @property
    def root_graph(self) -> Graph:
        return self.flags[0].root_graph

    @property
    def effective(self) -> RatMatrix:
        return self.matrix.scaled(self.scale)

    def reordered(self, order: Sequence[int]) -> "FlagBlock":
        """Block whose i-th flag is ``self.flags[order[i]]`` (matrix untouched)."""
        return FlagBlock(tuple(self.flags[i] for i in order), self.matrix, self.scale)


@dataclass(frozen=True)
class LowerBoundCertificate:
    h1: Graph
    h2: Graph
    lam: Fraction
    alpha: Fraction
    ell: int
    blocks: tuple[FlagBlock, ...]

    def __post_init__(self):
        if not 0 <= self.lam <= 2:
            raise CertificateError(f"lambda={self.lam} outside [0,2]")
        if self.ell < max(self.h1.n, self.h2.n):
            raise CertificateError(f"ell={self.ell} is smaller than v(H1), v(H2)")
        for q, b in enumerate(self.blocks):
            if 2 * b.k - b.r > self.ell:
                raise CertificateError(f"block {q}: 2k-r={2 * b.k - b.r} exceeds ell={self.ell}")


@dataclass(frozen=True)
class AlphaCertificate:
    h1: Graph
    h2: Graph
    lam: Fraction
    alpha: Fraction
    w1: Graphon
    w2: Graphon

    def __post_init__(self):
        if not 0 <= self.lam <= 2:
            raise CertificateError(f"lambda={self.lam} outside [0,2]")


@dataclass(frozen=True)
class VerificationReport:
    graphs: tuple[Graph, ...]
    values: tuple[Fraction, ...]
    psd: tuple[PsdVerdict, ...]
    alpha: Fraction
    minimum: Fraction = field(init=False)
    tight: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        m = min(self.values)
        object.__setattr__(self, "minimum", m)
        object.__setattr__(self, "tight", tuple(i for i, v in enumerate(self.values) if v == m))

    @property
    def verdict(self) -> bool:
        return all(self.psd) and self.minimum >= self.alpha

    def value_at(self, j: Graph) -> Fraction:
        from .graphs import canonical_form

        key = canonical_form(j)
        for g, v in zip(self.graphs, self.values):
            if canonical_form(g) == key:
                return v
        raise KeyError(f"{j} is not among the verified graphs")

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "alpha": format_rat(self.alpha),
            "min": format_rat(self.minimum),
            "psd": [bool(p) for p in self.psd],
            "tight": [to_graph6(self.graphs[i]) for i in self.tight],
            "values": [{"graph": to_graph6(g), "value": format_rat(v)}
                       for g, v in zip(self.graphs, self.values)],
        }


@dataclass(frozen=True)
class AlphaReport:
    red1: Fraction   # t(H1, W1)
    blue1: Fraction  # t(H2, 1 - W1)
    red2: Fraction
    blue2: Fraction
    lam: Fraction
    alpha: Fraction

    @property
    def conditions(self) -> tuple[bool, bool, bool, bool]:
        lam = self.lam
        return (lam * self.red1 + (2 - lam) * self.blue1 <= self.alpha,
                lam * self.red2 + (2 - lam) * self.blue2 <= self.alpha,
                self.red1 >= self.blue1,
                self.red2 <= self.blue2)

    @property
    def verdict(self) -> bool:
        return all(self.conditions)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "conditions": list(self.conditions),
            "t_h1_w1": format_rat(self.red1), "t_h2_co_w1": format_rat(self.blue1),
            "t_h1_w2": format_rat(self.red2), "t_h2_co_w2": format_rat(self.blue2),
            "lambda": format_rat(self.lam), "alpha": format_rat(self.alpha),
        }


# ---------------------------------------------------------------------------
# lower bounds


@lru_cache(maxsize=None)
def _pair_table(flags: tuple[Flag, ...], j: Graph):
    counts, total = pair_counts(flags, j)
    return tuple(counts.items()), total


def base_value(h1: Graph, h2: Graph, lam: Fraction, j: Graph) -> Fraction:
    return lam * t_inj(h1, j) + (2 - lam) * t_inj(h2, complement(j))


def block_sos(block: FlagBlock, j: Graph) -> Fraction:
    """sum_{i,j} A(i,j) * a(F_i, F_j; J) for one block (scale included)."""
    items, total = _pair_table(block.flags, j)
    rows = block.matrix.rows
    s = sum((rows[a][b] * c for (a, b), c in items), Fraction(0))
    return s * block.scale / total


def _value(cert: LowerBoundCertificate, j: Graph) -> Fraction:
    v = base_value(cert.h1, cert.h2, cert.lam, j)
    for b in cert.blocks:
        v -= block_sos(b, j)
    return v


def _values_chunk(args):
    cert, graphs = args
    return [_value(cert, j) for j in graphs]


def verify_lower(cert: LowerBoundCertificate, threads: int = 1) -> VerificationReport:
    """Exact check of a lower-bound certificate over every graph on ``ell`` vertices."""
    graphs = tuple(enumerate_graphs(cert.ell))
    psd = tuple(is_psd(b.effective) for b in cert.blocks)
    if threads > 1:
        step = math.ceil(len(graphs) / threads)
        chunks = [(cert, graphs[i:i + step]) for i in range(0, len(graphs), step)]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            values = [v for part in pool.map(_values_chunk, chunks) for v in part]
    else:
        values = [_value(cert, j) for j in graphs]
    return VerificationReport(graphs, tuple(values), psd, cert.alpha)


# ---------------------------------------------------------------------------
# upper bounds


def verify_alpha(cert: AlphaCertificate) -> AlphaReport:
    return AlphaReport(
        hom_density(cert.h1, cert.w1), hom_density(cert.h2, complement_w(cert.w1)),
        hom_density(cert.h1, cert.w2), hom_density(cert.h2, complement_w(cert.w2)),
        cert.lam, cert.alpha)


def check_p_common(h1: Graph, h2: Graph, p, w: Graphon) -> tuple[Fraction, Fraction, bool]:
    """Both sides of the (p, 1-p)-common inequality at one graphon.

    Returns (lhs, rhs, lhs >= rhs); a False verdict is a witness that the
    pair is not (p, 1-p)-common.
    """
    p = Fraction(p)
    if not 0 < p < 1:
        raise CertificateError(f"p={p} must lie strictly between 0 and 1")
    e1, e2 = h1.num_edges, h2.num_edges
    if not e1 or not e2:
        raise CertificateError("H1 and H2 must both have edges")
    lhs = (hom_density(h1, w) / (e1 * p ** (e1 - 1))
           + hom_density(h2, complement_w(w)) / (e2 * (1 - p) ** (e2 - 1)))
    rhs = p / e1 + (1 - p) / e2
    return lhs, rhs, lhs >= rhs


# ---------------------------------------------------------------------------
# ordering recovery (authoring tool)


@dataclass(frozen=True)
class RecoveryContext:
    h1: Graph
    h2: Graph
    lam: Fraction
    alpha: Fraction
    ell: int


class RecoveryError(RuntimeError):
    pass


_NUMBER_WORDS = ["Zero", "One", "Two", "Three", "Four", "Five", "Six", "Seven", "Eight", "Nine",
                 "Ten", "Eleven", "Twelve", "Thirteen", "Fourteen", "Fifteen"]


def attachment_subsets(r: int) -> list[tuple[int, ...]]:
    """Subsets of the roots ordered by size, then lexicographically."""
    from itertools import combinations

    return [c for size in range(r + 1) for c in combinations(range(r), size)]


def guess_from_names(names: Sequence[str], root: Graph) -> list[Flag]:
    """Heuristic initial guess for one-extension-vertex flags (k = r + 1).

    Each name's trailing number word selects the subset of roots adjacent to
    the extension vertex, with subsets numbered by :func:`attachment_subsets`.
    """
    r = root.n
    subsets = attachment_subsets(r)
    words = sorted(_NUMBER_WORDS, key=len, reverse=True)
    out = []
    for name in names:
        word = next((w for w in words if name.endswith(w)), None)
        if word is None:
            raise RecoveryError(f"cannot read a number from {name!r}")
        idx = _NUMBER_WORDS.index(word)
        if idx >= len(subsets):
            raise RecoveryError(f"{name!r} refers to subset {idx} of only {len(subsets)}")
        edges = list(root.edges) + [(a, r) for a in subsets[idx]]
        out.append(Flag.from_edges(r + 1, r, edges))
    return out


def _lcm_den(xs: Iterable[Fraction]) -> int:
    return reduce(math.lcm, (Fraction(x).denominator for x in xs), 1)


def _root_tuples(root: Graph, w: WeightedGraph):
    # cell tuples at which the root pattern has positive weight
    from itertools import product

    pairs = [(a, b) for b in range(root.n) for a in range(b)]
    for x in product(range(w.n), repeat=root.n):
        if all((w.w[x[a]][x[b]] if root.adj[a] >> b & 1 else 1 - w.w[x[a]][x[b]])
               for a, b in pairs):
            yield x


def tight_vectors(flags: Sequence[Flag], w: WeightedGraph) -> list[tuple[Fraction, ...]]:
    """Distinct vectors (t_ind,r(F_i, W)(x))_i over root cell tuples x of a step graphon.

    If W attains the certified bound, every such vector lies in the kernel
    of the block's matrix; recovery uses this as an extra pruning rule.
    """
    seen = set()
    for x in _root_tuples(flags[0].root_graph, w):
        seen.add(tuple(flag_density(f, w, x) for f in flags))
    return sorted(seen)


def recover_flag_ordering(matrix: RatMatrix, candidates: Sequence[Flag], context: RecoveryContext,
                          partners: Sequence[FlagBlock] = (), *, scale=1,
                          initial: Sequence[int] | None = None,
                          tight: WeightedGraph | None = None) -> tuple[int, ...]:
    """Find ``order`` with ``candidates[order[i]]`` sitting at matrix index i.

    The other blocks (``partners``) are held fixed.  Backtracking assigns one
    candidate flag at a time to a free matrix index; for every graph J the
    partial sum plus a lower bound on the unassigned terms must stay within
    the slack left by the base value and the partner blocks.  ``initial`` is
    tried first (and returned at once if it already verifies).
    """
    t = len(candidates)
    if matrix.dim != t:
        raise RecoveryError(f"{t} candidate flags for a {t}x{t} matrix expected, got dim {matrix.dim}")
    scale = parse_rat(scale) if not isinstance(scale, Fraction) else scale
    flags = tuple(candidates)
    graphs = enumerate_graphs(context.ell)
    den = _lcm_den(x * scale for row in matrix.rows for x in row)
    mi = [[int(x * scale * den) for x in row] for row in matrix.rows]

    caps, tables = [], []
    for j in graphs:
        slack = base_value(context.h1, context.h2, context.lam, j) - context.alpha
        slack -= sum((block_sos(b, j) for b in partners), Fraction(0))
        items, total = _pair_table(flags, j)
        caps.append(math.floor(slack * den * total))
        tables.append(items)

    kernel = []
    if tight is not None:
        for v in tight_vectors(flags, tight):
            d = _lcm_den(v)
            vi = [int(x * d) for x in v]
            support = frozenset(i for i, x in enumerate(vi) if x)
            kernel.append((support, vi))

    preferred = list(initial) if initial is not None else list(range(t))
    if sorted(preferred) != list(range(t)):
        raise RecoveryError("initial guess must be a permutation")
    # flag f goes to matrix index pos[f]; try the guessed index first
    guess_pos = [0] * t
    for i, f in enumerate(preferred):
        guess_pos[f] = i
    var_order = sorted(range(t), key=lambda f: -sum(c for items in tables for (a, b), c in items
                                                     if a == f or b == f))
    pos = [-1] * t

    def feasible() -> bool:
        free = [i for i in range(t) if i not in set(pos)]
        diag_min = min((mi[s][s] for s in free), default=0)
        off_min = min((mi[s][u] for s in free for u in free if s != u), default=0)
        row_min = {p: min((mi[p][s] for s in free), default=0) for p in pos if p >= 0}
        for items, cap in zip(tables, caps):
            lb = 0
            for (a, b), c in items:
                pa, pb = pos[a], pos[b]
                if pa >= 0 and pb >= 0:
                    lb += mi[pa][pb] * c
                elif pa >= 0:
                    lb += row_min[pa] * c
                elif pb >= 0:
                    lb += row_min[pb] * c
                else:
                    lb += (diag_min if a == b else off_min) * c
            if lb > cap:
                return False
        assigned = {f for f in range(t) if pos[f] >= 0}
        for support, vi in kernel:
            if support <= assigned:
                for row in mi:
                    if sum(row[pos[f]] * vi[f] for f in support):
                        return False
        return True

    def rec(depth: int) -> bool:
        if not feasible():
            return False
        if depth == t:
            return True
        f = var_order[depth]
        used = set(pos)
        choices = sorted((i for i in range(t) if i not in used), key=lambda i: (i != guess_pos[f], i))
        for i in choices:
            pos[f] = i
            if rec(depth + 1):
                return True
        pos[f] = -1
        return False

    if not rec(0):
        raise RecoveryError("no ordering of the candidate flags satisfies the certificate")
    order = [0] * t
    for f, i in enumerate(pos):
        order[i] = f
    return tuple(order)


def recover_block(cert: LowerBoundCertificate, q: int, **kw) -> tuple[int, ...]:
    """Recover block ``q`` of a certificate from its own flags, others fixed."""
    block = cert.blocks[q]
    ctx = RecoveryContext(cert.h1, cert.h2, cert.lam, cert.alpha, cert.ell)
    partners = [b for i, b in enumerate(cert.blocks) if i != q]
    return recover_flag_ordering(block.matrix, block.flags, ctx, partners, scale=block.scale,
                                 initial=kw.pop("initial", range(len(block.flags))), **kw)


# ---------------------------------------------------------------------------
# JSON


def _graphon_to_json(w: Graphon) -> dict:
    if isinstance(w, ConstGraphon):
        return {"const": format_rat(w.p)}
    return {"n": w.n, "weights": [format_rat(x) for row in w.w for x in row]}


def _graphon_from_json(obj: dict) -> Graphon:
    if "const" in obj:
        return ConstGraphon(parse_rat(obj["const"]))
    n = int(obj["n"])
    ws = [parse_rat(x) for x in obj["weights"]]
    if len(ws) != n * n:
        raise CertificateError(f"expected {n * n} weights, got {len(ws)}")
    return WeightedGraph(n, tuple(tuple(ws[i * n:(i + 1) * n]) for i in range(n)))


def certificate_to_json(cert) -> dict:
    head = {"version": FORMAT_VERSION, "h1": to_graph6(cert.h1), "h2": to_graph6(cert.h2),
            "lambda": format_rat(cert.lam), "alpha": format_rat(cert.alpha)}
    if isinstance(cert, AlphaCertificate):
        return {"kind": "alpha", **head, "w1": _graphon_to_json(cert.w1), "w2": _graphon_to_json(cert.w2)}
    blocks = [{
        "r": b.r, "k": b.k, "root": to_graph6(b.root_graph),
        "flags": [f.to_text() for f in b.flags],
        "scale": format_rat(b.scale),
        "matrix": [[format_rat(x) for x in row] for row in b.matrix.rows],
    } for b in cert.blocks]
    return {"kind": "lower", **head, "ell": cert.ell, "blocks": blocks}


def certificate_from_json(obj: dict):
    try:
        kind = obj["kind"]
        version = obj.get("version", FORMAT_VERSION)
        if version != FORMAT_VERSION:
            raise CertificateError(f"unsupported certificate version {version}")
        h1, h2 = from_graph6(obj["h1"]), from_graph6(obj["h2"])
        lam, alpha = parse_rat(obj["lambda"]), parse_rat(obj["alpha"])
        if kind == "alpha":
            return AlphaCertificate(h1, h2, lam, alpha,
                                    _graphon_from_json(obj["w1"]), _graphon_from_json(obj["w2"]))
        if kind != "lower":
            raise CertificateError(f"unknown certificate kind {kind!r}")
        blocks = []
        for q, b in enumerate(obj["blocks"]):
            flags = tuple(Flag.from_text(s) for s in b["flags"])
            block = FlagBlock(flags, RatMatrix.from_rows(b["matrix"]), parse_rat(b.get("scale", "1")))
            if (block.r, block.k) != (b["r"], b["k"]):
                raise CertificateError(f"block {q}: r/k fields disagree with the flags")
            if "root" in b and from_graph6(b["root"]) != block.root_graph:
                raise CertificateError(f"block {q}: root field disagrees with the flags")
            blocks.append(block)
        return LowerBoundCertificate(h1, h2, lam, alpha, int(obj["ell"]), tuple(blocks))
    except KeyError as exc:
        raise CertificateError(f"missing field {exc.args[0]!r}") from None


def resolve_path(path) -> Path:
    """``path`` itself if it exists, else the shipped file with the same name."""
    p = Path(path)
    if p.exists():
        return p
    shipped = DATA_DIR / p.name
    if shipped.exists():
        return shipped
    raise FileNotFoundError(path)


def load_certificate(path):
    with open(resolve_path(path), encoding="utf-8") as fh:
        return certificate_from_json(json.load(fh))


def dump_certificate(cert, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(certificate_to_json(cert), fh, indent=1)
        fh.write("\n")


def shipped_certificates() -> list[str]:
    return sorted(p.name for p in DATA_DIR.glob("*.json"))


__all__ = [
    "FlagBlock", "LowerBoundCertificate", "AlphaCertificate", "VerificationReport", "AlphaReport",
    "CertificateError", "RecoveryContext", "RecoveryError", "verify_lower", "verify_alpha",
    "check_p_common", "recover_flag_ordering", "recover_block", "guess_from_names",
    "attachment_subsets", "tight_vectors", "base_value", "block_sos", "load_certificate",
    "dump_certificate", "certificate_to_json", "certificate_from_json", "shipped_certificates",
    "resolve_path", "enumerate_flags",
]
