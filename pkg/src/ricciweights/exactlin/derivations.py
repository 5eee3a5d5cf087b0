"""Derivations of a Lie algebra and the torus of diagonal derivations."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from ..algebra import LieAlgebra, bracket
from .linalg import Matrix, kernel_basis

Weight = tuple[Fraction, ...]


@dataclass(frozen=True)
class DerivationSpace:
    basis: tuple[tuple[tuple[Fraction, ...], ...], ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def matrices(self) -> list[Matrix]:
        return [[list(row) for row in D] for D in self.basis]


def is_derivation(L: LieAlgebra, D: Sequence[Sequence[Fraction]]) -> bool:
    """``D[x,y] == [Dx,y] + [x,Dy]`` on every pair of basis vectors."""
    n = L.n
    cols = [[D[r][c] for r in range(n)] for c in range(n)]
    br = {(i, j): bracket(L, i, j) for i in range(n) for j in range(n)}
    for i, j in combinations(range(n), 2):
        lhs = [sum((D[k][m] * br[i, j][m] for m in range(n)), Fraction(0)) for k in range(n)]
        rhs = [Fraction(0)] * n
        for r in range(n):
            if cols[i][r]:
                rhs = [a + cols[i][r] * b for a, b in zip(rhs, br[r, j])]
            if cols[j][r]:
                rhs = [a + cols[j][r] * b for a, b in zip(rhs, br[i, r])]
        if lhs != rhs:
            return False
    return True


def derivation_space(L: LieAlgebra) -> DerivationSpace:
    """All derivations, as the kernel of the Leibniz conditions on n^2 unknowns.

    Unknown ``D[r][c]`` sits at position ``r * n + c``; column ``c`` of ``D``
    is the image of ``e_c``.
    """
    n = L.n
    br = {(i, j): L.bracket_sparse(i, j) for i in range(n) for j in range(n)}
    rows = []
    for i, j in combinations(range(n), 2):
        for k in range(n):
            row = [Fraction(0)] * (n * n)
            # D[e_i,e_j]_k
            for m, c in br[i, j].items():
                row[k * n + m] += c
            # -[D e_i, e_j]_k - [e_i, D e_j]_k
            for r in range(n):
                c = br[r, j].get(k)
                if c:
                    row[r * n + i] -= c
                c = br[i, r].get(k)
                if c:
                    row[r * n + j] -= c
            if any(row):
                rows.append(row)
    vecs = kernel_basis(rows, n * n)
    basis = tuple(tuple(tuple(v[r * n:(r + 1) * n]) for r in range(n)) for v in vecs)
    return DerivationSpace(basis)


@dataclass(frozen=True)
class DiagonalTorus:
    """Weights of the basis vectors under a torus of diagonal derivations.

    ``weight_rows[i]`` is the weight of ``e_i`` as a vector in Q^rank; the
    j-th generating derivation is ``diag(weight_rows[i][j] for i)``.
    """

    rank: int
    weight_rows: tuple[Weight, ...]

    @property
    def n(self) -> int:
        return len(self.weight_rows)

    def generators(self) -> list[Matrix]:
        n = self.n
        return [
            [[self.weight_rows[i][j] if i == c else Fraction(0) for c in range(n)] for i in range(n)]
            for j in range(self.rank)
        ]

    def inconsistencies(self, L: LieAlgebra) -> list[tuple[int, int, int]]:
        """Triples ``(i, j, k)`` with ``a^k_ij != 0`` but ``w_i + w_j != w_k``."""
        bad = []
        for i, j, k, _ in L.structure_triples():
            s = tuple(a + b for a, b in zip(self.weight_rows[i], self.weight_rows[j]))
            if s != self.weight_rows[k]:
                bad.append((i, j, k))
        return bad


def diagonal_torus_equations(L: LieAlgebra) -> list[list[Fraction]]:
    rows = []
    for i, j, k, _ in L.structure_triples():
        row = [Fraction(0)] * L.n
        row[i] += 1
        row[j] += 1
        row[k] -= 1
        if row not in rows:
            rows.append(row)
    return rows


def diagonal_derivations(L: LieAlgebra) -> DiagonalTorus:
    """Solve ``w_i + w_j = w_k`` for every nonzero ``a^k_ij``.

    Columns are reduced from the last index backwards, so the free parameters
    are the lowest-indexed weights that are not determined by earlier ones;
    each free weight becomes a coordinate of Q^rank.
    """
    n = L.n
    rows = diagonal_torus_equations(L)
    rev = [list(reversed(r)) for r in rows]
    kern = kernel_basis(rev, n)
    # kernel_basis yields one vector per free column in increasing reversed
    # position; flip to increasing original index
    vecs = [list(reversed(v)) for v in reversed(kern)]
    rank = len(vecs)
    weight_rows = tuple(tuple(v[i] for v in vecs) for i in range(n))
    return DiagonalTorus(rank, weight_rows)


def torus_from_weights(L: LieAlgebra, weight_rows: Sequence[Sequence[object]]) -> DiagonalTorus:
    """Wrap user-supplied weights, checking that they define derivations of ``L``."""
    from ..algebra import as_fraction

    if len(weight_rows) != L.n:
        raise ValueError(f"expected {L.n} weights, got {len(weight_rows)}")
    rows = tuple(tuple(as_fraction(x) for x in w) for w in weight_rows)
    ranks = {len(w) for w in rows}
    if len(ranks) != 1:
        raise ValueError("weights must all have the same number of components")
    T = DiagonalTorus(ranks.pop(), rows)
    bad = T.inconsistencies(L)
    if bad:
        i, j, k = bad[0]
        raise ValueError(
            f"weights inconsistent with the algebra: w{i + 1}+w{j + 1} != w{k + 1}"
        )
    return T
