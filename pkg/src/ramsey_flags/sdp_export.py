"""Export the flag-algebra SDP behind a lower bound on c_lam(H1, H2).

The problem is kept in exact rationals (:class:`SdpProblem`) and only turned
into decimals when rendered as SDPA sparse text.  Layout, in SDPA's primal
form ``max <F0, Y>  s.t.  <F_i, Y> = c_i,  Y psd``:

* one matrix block per flag family (the A_q);
* one diagonal LP block holding t+, t-, a slack s_J for every graph J, and,
  when lambda is a variable, lambda and mu = 2 - lambda.

Row J reads ``t+ - t- + s_J + sum_q <C_q(J), A_q> [- lam*t1(J) - mu*t2(J)] = rhs``
with rhs the fixed-lambda base value (or 0).  A variable lambda adds a single
row ``lam + mu = 2``.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from decimal import Context, Decimal
from fractions import Fraction
from typing import Sequence, Union

from .densities import t_inj
from .exact import RatMatrix
from .flags import MAX_FLAG_SIZE, Flag, FlagError, check_family, enumerate_flags, pair_counts
from .graphs import Graph, complement, enumerate_graphs, format_edge_list

SIG_DIGITS = 17
_CTX = Context(prec=SIG_DIGITS)

BlockSpec = Union[tuple, Sequence[Flag]]


class SdpExportError(ValueError):
    pass


@dataclass(frozen=True)
class SdpProblem:
    h1: Graph
    h2: Graph
    ell: int
    lam: Fraction | None  # None: lambda is a decision variable
    families: tuple[tuple[Flag, ...], ...]
    graphs: tuple[Graph, ...]
    t1: tuple[Fraction, ...]  # t_inj(H1, J)
    t2: tuple[Fraction, ...]  # t_inj(H2, co-J)
    coeffs: tuple[tuple[dict, ...], ...]  # coeffs[J][q][(i, j)] for i <= j, nonzero only

    @property
    def variable_lambda(self) -> bool:
        return self.lam is None

    @property
    def graph_constraints(self) -> int:
        return len(self.graphs)

    @property
    def num_constraints(self) -> int:
        return len(self.graphs) + self.variable_lambda

    def base(self, idx: int, lam) -> Fraction:
        return lam * self.t1[idx] + (2 - lam) * self.t2[idx]

    def slacks(self, matrices: Sequence[RatMatrix], t, lam=None) -> list[Fraction]:
        """Exact s_J for given A_q, t (and lambda if variable); feasible iff all >= 0."""
        lam = self.lam if lam is None else Fraction(lam)
        if lam is None:
            raise SdpExportError("lambda is a variable here: pass a value")
        if len(matrices) != len(self.families):
            raise SdpExportError(f"expected {len(self.families)} matrices, got {len(matrices)}")
        for m, fam in zip(matrices, self.families):
            if m.dim != len(fam):
                raise SdpExportError(f"matrix of dim {m.dim} for a family of {len(fam)} flags")
        out = []
        for idx in range(len(self.graphs)):
            sos = Fraction(0)
            for m, c in zip(matrices, self.coeffs[idx]):
                for (i, j), v in c.items():
                    sos += v * m[i, j] * (1 if i == j else 2)
            out.append(self.base(idx, lam) - sos - t)
        return out

    def to_sdpa(self) -> str:
        return render_sdpa(self)


def auto_blocks(ell: int) -> list[tuple[Graph, int]]:
    """Every (root, k) with 1 <= r < k <= 5 and 2k - r <= ell, roots up to isomorphism."""
    out = []
    for r in range(1, MAX_FLAG_SIZE):
        for root in enumerate_graphs(r):
            for k in range(r + 1, MAX_FLAG_SIZE + 1):
                if 2 * k - r <= ell:
                    out.append((root, k))
    return out


def _family(spec: BlockSpec) -> tuple[Flag, ...]:
    if isinstance(spec, tuple) and len(spec) == 2 and isinstance(spec[1], int):
        root, k = spec
        if root is None or root.n < 1:
            raise SdpExportError("a block root needs at least one vertex")
        try:
            return enumerate_flags(root, k).flags
        except FlagError as exc:
            raise SdpExportError(str(exc)) from None
    flags = tuple(spec)
    try:
        check_family(flags)
    except FlagError as exc:
        raise SdpExportError(str(exc)) from None
    if flags[0].r < 1:
        raise SdpExportError("a block root needs at least one vertex")
    return flags


def _row(args):
    h1, h2, families, j = args
    per_block = []
    for flags in families:
        counts, total = pair_counts(flags, j)
        per_block.append({(a, b): Fraction(c, total) for (a, b), c in sorted(counts.items()) if a <= b})
    return t_inj(h1, j), t_inj(h2, complement(j)), tuple(per_block)


def export_sdp(h1: Graph, h2: Graph, ell: int, blocks: Sequence[BlockSpec] | str,
               lam=None, threads: int = 1) -> SdpProblem:
    """Build the SDP.  ``blocks`` is ``"auto"`` or a list whose items are
    ``(root, k)`` pairs or explicit flag lists; ``lam=None`` makes lambda a variable."""
    if blocks == "auto":
        blocks = auto_blocks(ell)
    families = tuple(_family(b) for b in blocks)
    if not families:
        raise SdpExportError("no blocks")
    for fam in families:
        r, k = fam[0].r, fam[0].k
        if 2 * k - r > ell:
            raise SdpExportError(f"block with r={r}, k={k} needs 2k-r={2 * k - r} <= ell={ell}")
    if lam is not None:
        lam = Fraction(lam)
        if not 0 <= lam <= 2:
            raise SdpExportError(f"lambda={lam} outside [0,2]")
    graphs = tuple(enumerate_graphs(ell))
    jobs = [(h1, h2, families, j) for j in graphs]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_row, jobs, chunksize=max(1, math.ceil(len(jobs) / (4 * threads)))))
    else:
        rows = [_row(job) for job in jobs]
    return SdpProblem(h1, h2, ell, lam, families, graphs,
                      tuple(r[0] for r in rows), tuple(r[1] for r in rows), tuple(r[2] for r in rows))


def format_decimal(x: Fraction) -> str:
    """``x`` rounded to 17 significant digits (half-even), plain or exponent notation."""
    x = Fraction(x)
    if x == 0:
        return "0"
    d = _CTX.divide(Decimal(x.numerator), Decimal(x.denominator))
    return format(d.normalize(_CTX), "g")


def render_sdpa(p: SdpProblem) -> str:
    n_graphs = len(p.graphs)
    var = p.variable_lambda
    lp_size = 2 + n_graphs + (2 if var else 0)
    t_pos, t_neg = 1, 2
    slack0 = 3
    lam_pos, mu_pos = slack0 + n_graphs, slack0 + n_graphs + 1
    lp_block = len(p.families) + 1

    lines = [
        f'"max t: H1 = {format_edge_list(p.h1)} | H2 = {format_edge_list(p.h2)}',
        f'"ell={p.ell} graphs={n_graphs} lambda={"variable" if var else p.lam} blocks={len(p.families)}',
    ]
    for q, fam in enumerate(p.families, 1):
        lines.append(f'"block {q}: ' + " | ".join(f.to_text() for f in fam))
    lines.append(f'"block {lp_block}: diagonal [t+, t-, s_J x {n_graphs}'
                 + (", lambda, mu]" if var else "]"))
    lines.append(str(p.num_constraints))
    lines.append(str(lp_block))
    lines.append(" ".join([str(len(f)) for f in p.families] + [str(-lp_size)]))

    rhs = [p.base(i, p.lam) if not var else Fraction(0) for i in range(n_graphs)]
    if var:
        rhs.append(Fraction(2))
    lines.append(" ".join(format_decimal(c) for c in rhs))

    ent = []
    # objective: t = t+ - t-
    ent.append((0, lp_block, t_pos, t_pos, Fraction(1)))
    ent.append((0, lp_block, t_neg, t_neg, Fraction(-1)))
    for idx in range(n_graphs):
        m = idx + 1
        for q, c in enumerate(p.coeffs[idx], 1):
            for (i, j), v in c.items():
                ent.append((m, q, i + 1, j + 1, v))
        ent.append((m, lp_block, t_pos, t_pos, Fraction(1)))
        ent.append((m, lp_block, t_neg, t_neg, Fraction(-1)))
        ent.append((m, lp_block, slack0 + idx, slack0 + idx, Fraction(1)))
        if var:
            ent.append((m, lp_block, lam_pos, lam_pos, -p.t1[idx]))
            ent.append((m, lp_block, mu_pos, mu_pos, -p.t2[idx]))
    if var:
        ent.append((n_graphs + 1, lp_block, lam_pos, lam_pos, Fraction(1)))
        ent.append((n_graphs + 1, lp_block, mu_pos, mu_pos, Fraction(1)))
    for m, b, i, j, v in ent:
        if v:
            lines.append(f"{m} {b} {i} {j} {format_decimal(v)}")
    return "\n".join(lines) + "\n"


__all__ = ["SdpProblem", "SdpExportError", "export_sdp", "auto_blocks", "render_sdpa",
           "format_decimal", "SIG_DIGITS"]
