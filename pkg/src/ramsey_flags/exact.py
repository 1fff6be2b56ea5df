"""Exact rational scalars and symmetric matrices, with a PSD test that
produces a witness vector when it says no."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

Rat = Fraction


def parse_rat(text) -> Fraction:
    """``"p/q"``, ``"p"`` or an int -> Fraction."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise TypeError(f"cannot read a rational from {text!r}")
    return Fraction(text.strip())


def format_rat(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class NotSymmetricError(ValueError):
    pass


@dataclass(frozen=True)
class RatMatrix:
    rows: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        dim = len(self.rows)
        for i, row in enumerate(self.rows):
            if len(row) != dim:
                raise ValueError(f"row {i} has length {len(row)}, expected {dim}")
        for i in range(dim):
            for j in range(i):
                if self.rows[i][j] != self.rows[j][i]:
                    raise NotSymmetricError(f"entries ({i},{j}) and ({j},{i}) differ")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], scale=1) -> "RatMatrix":
        scale = parse_rat(scale) if not isinstance(scale, Fraction) else scale
        return cls(tuple(tuple(parse_rat(x) * scale for x in row) for row in rows))

    @classmethod
    def identity(cls, dim: int) -> "RatMatrix":
        return cls(tuple(tuple(Fraction(int(i == j)) for j in range(dim)) for i in range(dim)))

    @property
    def dim(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def scaled(self, c) -> "RatMatrix":
        c = Fraction(c)
        return RatMatrix(tuple(tuple(x * c for x in row) for row in self.rows))

    def permuted(self, order: Sequence[int]) -> "RatMatrix":
        """Matrix whose (i,j) entry is self[order[i], order[j]]."""
        return RatMatrix(tuple(tuple(self.rows[a][b] for b in order) for a in order))

    def to_float(self):
        import numpy as np

        return np.array([[float(x) for x in row] for row in self.rows])


def quadratic_form(m: RatMatrix, x: Sequence) -> Fraction:
    if len(x) != m.dim:
        raise ValueError(f"vector length {len(x)} does not match matrix dim {m.dim}")
    x = [Fraction(v) for v in x]
    total = Fraction(0)
    for i, row in enumerate(m.rows):
        if x[i]:
            total += x[i] * sum((a * b for a, b in zip(row, x) if b), Fraction(0))
    return total


@dataclass(frozen=True)
class PsdVerdict:
    psd: bool
    witness: tuple[Fraction, ...] | None = None

    def __bool__(self):
        return self.psd


def is_psd(m: RatMatrix) -> PsdVerdict:
    """Decide positive semidefiniteness by exact symmetric elimination.

    ``s`` is the current Schur complement and ``basis[j]`` a vector in the
    original coordinates with ``s[a][b] == basis[a]^T m basis[b]``, so any bad
    diagonal or zero-diagonal/nonzero-row pattern turns into a witness.
    """
    dim = m.dim
    s = [list(row) for row in m.rows]
    basis = [[Fraction(int(i == j)) for i in range(dim)] for j in range(dim)]
    alive = list(range(dim))
    while alive:
        for i in alive:
            if s[i][i] < 0:
                return PsdVerdict(False, tuple(basis[i]))
        for i in alive:
            if s[i][i] == 0:
                for j in alive:
                    if s[i][j] != 0:
                        # (t*b_i + b_j)^T m (t*b_i + b_j) = 2t*s_ij + s_jj < 0
                        t = -(abs(s[j][j]) + 1) / (2 * s[i][j])
                        vec = tuple(t * a + b for a, b in zip(basis[i], basis[j]))
                        return PsdVerdict(False, vec)
        alive = [i for i in alive if s[i][i] != 0]
        if not alive:
            break
        p = alive[0]
        piv = s[p][p]
        rest = alive[1:]
        for j in rest:
            f = s[p][j] / piv
            if f:
                bp = basis[p]
                basis[j] = [a - f * b for a, b in zip(basis[j], bp)]
                for k in rest:
                    if s[p][k]:
                        s[j][k] -= f * s[p][k]
        alive = rest
    return PsdVerdict(True)
