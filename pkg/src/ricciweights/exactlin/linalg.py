"""Dense exact linear algebra over Q with ``Fraction`` entries.

Matrices are lists of rows.  Nothing here touches floating point.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

Matrix = list[list[Fraction]]


class SingularMatrixError(ValueError):
    pass


def to_matrix(rows) -> Matrix:
    from ..algebra import as_fraction

    return [[as_fraction(x) for x in row] for row in rows]


def zeros(r: int, c: int) -> Matrix:
    return [[Fraction(0)] * c for _ in range(r)]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def transpose(M: Sequence[Sequence[Fraction]]) -> Matrix:
    return [list(col) for col in zip(*M)] if M else []


def matmul(A: Sequence[Sequence[Fraction]], B: Sequence[Sequence[Fraction]]) -> Matrix:
    Bt = transpose(B)
    out = []
    for row in A:
        nz = [(k, a) for k, a in enumerate(row) if a]
        out.append([sum((a * col[k] for k, a in nz), Fraction(0)) for col in Bt])
    return out


def matvec(A: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> list[Fraction]:
    return [sum((a * x for a, x in zip(row, v) if a and x), Fraction(0)) for row in A]


def is_zero(M: Sequence[Sequence[Fraction]]) -> bool:
    return all(x == 0 for row in M for x in row)


def rref(M: Sequence[Sequence[Fraction]], ncols: int | None = None) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and the list of pivot columns."""
    R = [list(map(Fraction, row)) for row in M]
    if ncols is None:
        ncols = len(R[0]) if R else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == len(R):
            break
        p = next((i for i in range(r, len(R)) if R[i][c] != 0), None)
        if p is None:
            continue
        R[r], R[p] = R[p], R[r]
        piv = R[r][c]
        if piv != 1:
            R[r] = [x / piv for x in R[r]]
        prow = R[r]
        for i in range(len(R)):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                R[i] = [a - f * b for a, b in zip(R[i], prow)]
        pivots.append(c)
        r += 1
    return R, pivots


def rank(M: Sequence[Sequence[Fraction]]) -> int:
    if not M:
        return 0
    return len(rref(M)[1])


def kernel_basis(M: Sequence[Sequence[Fraction]], ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of ``{x : M x = 0}``, one vector per free column of the RREF.

    ``ncols`` is required when ``M`` has no rows.
    """
    if ncols is None:
        if not M:
            raise ValueError("ncols is required for an empty matrix")
        ncols = len(M[0])
    if not M:
        return [[Fraction(int(i == f)) for i in range(ncols)] for f in range(ncols)]
    R, pivots = rref(M, ncols)
    pivset = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, pc in enumerate(pivots):
            v[pc] = -R[row][f]
        basis.append(v)
    return basis


def det(M: Sequence[Sequence[Fraction]]) -> Fraction:
    n = len(M)
    A = [list(map(Fraction, row)) for row in M]
    d = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if A[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            d = -d
        piv = A[c][c]
        d *= piv
        for i in range(c + 1, n):
            if A[i][c]:
                f = A[i][c] / piv
                A[i] = [a - f * b for a, b in zip(A[i], A[c])]
    return d


def inverse(M: Sequence[Sequence[Fraction]]) -> Matrix:
    n = len(M)
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    R, pivots = rref(aug, n)
    if pivots != list(range(n)):
        raise SingularMatrixError("matrix is singular")
    return [row[n:] for row in R]


def solve(A: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> list[Fraction] | None:
    """One solution of ``A x = b`` (free variables set to 0), or None."""
    if not A:
        return []
    ncols = len(A[0])
    aug = [list(row) + [Fraction(bi)] for row, bi in zip(A, b)]
    R, pivots = rref(aug, ncols + 1)
    if pivots and pivots[-1] == ncols:
        return None
    x = [Fraction(0)] * ncols
    for row, pc in enumerate(pivots):
        x[pc] = R[row][ncols]
    return x


def rank_normal_form(M: Sequence[Sequence[Fraction]]) -> tuple[Matrix, Matrix, int]:
    """Invertible ``X``, ``Y`` and ``r`` with ``X M Y = diag(1,..,1,0,..,0)``."""
    m = len(M)
    ncols = len(M[0]) if M else 0
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(m)] for i, row in enumerate(M)]
    R, pivots = rref(aug, ncols)
    r = len(pivots)
    X = [row[ncols:] for row in R]
    top = [row[:ncols] for row in R[:r]]
    pivset = set(pivots)
    Z = top + [[Fraction(int(c == f)) for c in range(ncols)] for f in range(ncols) if f not in pivset]
    # reorder so that pivot rows come first and free unit rows follow; Z is invertible
    Y = inverse(Z)
    return X, Y, r


def lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


def integerize(v: Sequence[Fraction]) -> list[int]:
    """Positive rescaling of ``v`` to a primitive integer vector."""
    den = 1
    for x in v:
        den = lcm(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    if g > 1:
        ints = [x // g for x in ints]
    return ints
