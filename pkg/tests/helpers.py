"""Shared checks used by several test modules."""
from fractions import Fraction

from ramsey_flags.certificates import _pair_table, verify_lower
from ramsey_flags.exact import RatMatrix, is_psd


def flip_entry(m: RatMatrix, i: int, j: int) -> RatMatrix:
    rows = [list(r) for r in m.rows]
    rows[i][j] = -rows[i][j]
    if i != j:
        rows[j][i] = -rows[j][i]
    return RatMatrix(tuple(tuple(r) for r in rows))


def sign_flip_survivors(cert):
    """All (block, i, j) whose sign flip (kept symmetric) still verifies.

    Exact and fast: flipping A(i,j) moves the value at J by
    2 * scale * A(i,j) * (c_ij + c_ji) / total (one copy on the diagonal),
    so only the PSD test has to be redone per entry.
    """
    rep = verify_lower(cert)
    survivors, tried = [], 0
    for q, b in enumerate(cert.blocks):
        tables = [_pair_table(b.flags, j) for j in rep.graphs]
        for i in range(b.matrix.dim):
            for j in range(i, b.matrix.dim):
                a = b.matrix[i, j]
                if not a:
                    continue
                tried += 1
                new_min = None
                for v, (items, total) in zip(rep.values, tables):
                    c = sum(n for key, n in items if key == (i, j) or (i != j and key == (j, i)))
                    nv = v + 2 * a * b.scale * Fraction(c, total)
                    new_min = nv if new_min is None or nv < new_min else new_min
                if new_min >= cert.alpha and is_psd(flip_entry(b.matrix, i, j)):
                    survivors.append((q, i, j))
    return survivors, tried
