"""Positive filtrations adapted to a reordering of the basis, conditions (F1)-(F4).

The search has three stages for each candidate order of the basis:

1. the order must extend the relation "e_i before e_k whenever e_i appears
   in de^k" and pair positions p, n-1-p so that their bracket lies in the
   span of the last vector;
2. the weights are unknowns of a linear system made of the filtration
   inequalities ``w_i + w_j <= w_k``, (F1) and (F2);
3. the multiplicity hypotheses of (F3)/(F4) are made linear by fixing which
   consecutive weights are equal, one equality pattern at a time.

Every stage is exhaustive, so a ``None`` result proves that no filtration
adapted to a reordering of the given basis exists.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterator, Sequence

from .algebra import LieAlgebra, as_fraction, hat
from .exactlin.derivations import diagonal_derivations
from .exactlin.fourier_motzkin import EQ, GE, GT, Constraint, ConstraintSystem, fm_feasible
from .exactlin.linalg import integerize

log = logging.getLogger(__name__)


def dependency_relation(L: LieAlgebra) -> dict[int, set[int]]:
    """``i -> k`` whenever a term of ``de^k`` involves ``e^i``."""
    succ: dict[int, set[int]] = {i: set() for i in range(L.n)}
    for i, j, k, _ in L.structure_triples():
        succ[i].add(k)
        succ[j].add(k)
    return succ


def linear_extensions(n: int, succ: dict[int, set[int]]) -> Iterator[tuple[int, ...]]:
    """All topological orders of ``range(n)``, lexicographically (Kahn with backtracking)."""
    indeg = [0] * n
    for a in range(n):
        for c in succ[a]:
            indeg[c] += 1
    if any(c == a for a in range(n) for c in succ[a]):
        return
    order: list[int] = []
    placed = [False] * n

    def rec():
        if len(order) == n:
            yield tuple(order)
            return
        for i in range(n):
            if placed[i] or indeg[i]:
                continue
            placed[i] = True
            order.append(i)
            for c in succ[i]:
                indeg[c] -= 1
            yield from rec()
            for c in succ[i]:
                indeg[c] += 1
            order.pop()
            placed[i] = False

    yield from rec()


def reorder(L: LieAlgebra, order: Sequence[int]) -> LieAlgebra:
    """``L`` in the basis ``E_p = e_{order[p]}``."""
    pos = {i: p for p, i in enumerate(order)}
    diff = [dict() for _ in range(L.n)]
    for i, j, k, c in L.structure_triples():
        diff[pos[k]][(pos[i], pos[j])] = c
    return LieAlgebra(L.n, diff, params=L.params)


def pair_condition(L: LieAlgebra, order: Sequence[int]) -> bool:
    n = L.n
    top = order[n - 1]
    for p in range(n):
        comps = L.bracket_sparse(order[p], order[hat(p, n)])
        if any(k != top for k in comps):
            return False
    return True


@dataclass(frozen=True)
class AdmissibleOrder:
    order: tuple[int, ...]

    def basis_string(self) -> str:
        return ",".join(f"e_{i + 1}" for i in self.order)


def admissible_orders(L: LieAlgebra) -> Iterator[AdmissibleOrder]:
    succ = dependency_relation(L)
    for order in linear_extensions(L.n, succ):
        if pair_condition(L, order):
            yield AdmissibleOrder(order)


@dataclass(frozen=True)
class FCheck:
    ok: bool
    condition: str | None = None
    witness: tuple[int, ...] = ()

    def __bool__(self) -> bool:
        return self.ok

    def describe(self) -> str:
        if self.ok:
            return "pass"
        return f"fail {self.condition} at positions ({','.join(str(p + 1) for p in self.witness)})"


def _multiplicities(weights: Sequence[Fraction]) -> dict[Fraction, int]:
    mult: dict[Fraction, int] = {}
    for w in weights:
        mult[w] = mult.get(w, 0) + 1
    return mult


def check_F_assignment(L: LieAlgebra, order: Sequence[int], weights: Sequence[object]) -> FCheck:
    """Check ``w_i + w_j <= w_k`` on structure constants and (F1)-(F4), in the reordered basis."""
    order = tuple(getattr(order, "order", order))
    w = [as_fraction(x) for x in weights]
    n = L.n
    if len(w) != n or sorted(order) != list(range(n)):
        raise ValueError("order and weights must both have length n")
    Lr = reorder(L, order)
    for i, j, k, _ in Lr.structure_triples():
        if w[i] + w[j] > w[k]:
            return FCheck(False, "filtration", (i, j, k))
    if w[0] <= 0:
        return FCheck(False, "F1", (0,))
    for p in range(n - 1):
        if w[p] > w[p + 1]:
            return FCheck(False, "F1", (p, p + 1))
    top = w[n - 1]
    for p in range(n):
        s = w[p] + w[hat(p, n)]
        if s < top:
            return FCheck(False, "F2", (p, hat(p, n)))
        if n >= 2 and s <= w[n - 2]:
            return FCheck(False, "F2", (p, hat(p, n)))
    mult = _multiplicities(w)
    for p in range(n):
        q = hat(p, n)
        if q < p or w[p] + w[q] != top:
            continue
        if w[p] != w[q]:
            if mult[w[p]] < 2 and mult[w[q]] < 2:
                return FCheck(False, "F3", (p, q))
        elif p != q and mult[w[p]] <= 2:
            return FCheck(False, "F4", (p, q))
    return FCheck(True)


@dataclass(frozen=True)
class FiltrationWitness:
    order: tuple[int, ...]
    weights: tuple[int, ...]

    def format(self) -> tuple[str, str]:
        """Adapted basis and weights in the two-column table layout."""
        basis = ",".join(f"e_{i + 1}" for i in self.order)
        return basis, ",".join(str(x) for x in self.weights)


# ---------------------------------------------------------------------------
# Linear systems
# ---------------------------------------------------------------------------

def _row(n: int, terms: dict[int, int], rel: str) -> Constraint:
    coeffs = [Fraction(0)] * n
    for i, a in terms.items():
        coeffs[i] += a
    return Constraint(tuple(coeffs), Fraction(0), rel)


def base_system(Lr: LieAlgebra) -> ConstraintSystem:
    """Filtration inequalities, non-strict (F1) and (F2) for the reordered algebra."""
    n = Lr.n
    S = ConstraintSystem(n)
    seen = set()
    for i, j, k, _ in Lr.structure_triples():
        if (i, j, k) in seen:
            continue
        seen.add((i, j, k))
        S.constraints.append(_row(n, {k: 1, i: -1, j: -1}, GE))
    S.constraints.append(_row(n, {0: 1}, GT))
    for p in range(n - 1):
        S.constraints.append(_row(n, {p + 1: 1, p: -1}, GE))
    for p in range(n // 2 + n % 2):
        q = hat(p, n)
        top = _pair_minus(n, p, q, n - 1)
        if any(top.coeffs):
            S.constraints.append(top)
        if n >= 2:
            S.constraints.append(_pair_minus(n, p, q, n - 2, GT))
    return S


def _pair_minus(n: int, p: int, q: int, r: int, rel: str = GE) -> Constraint:
    """``w_p + w_q - w_r  rel  0``."""
    terms: dict[int, int] = {}
    for x, a in ((p, 1), (q, 1), (r, -1)):
        terms[x] = terms.get(x, 0) + a
    return _row(n, terms, rel)


def pattern_rows(n: int, equal: frozenset[int]) -> list[Constraint]:
    """(F1) refined by an equality pattern and the (F3)/(F4) exclusions it implies.

    ``equal`` holds the adjacencies ``p`` with ``w_p = w_{p+1}``; all others
    are strict.  A pair ``(p, n-1-p)`` whose sum may not equal ``w_n`` under
    the resulting multiplicities gets a strict ``w_p + w_phat > w_n`` row.
    """
    rows = []
    for p in range(n - 1):
        rows.append(_row(n, {p + 1: 1, p: -1}, EQ if p in equal else GT))
    run = [0] * n
    for p in range(1, n):
        run[p] = run[p - 1] if (p - 1) in equal else run[p - 1] + 1
    size: dict[int, int] = {}
    for r in run:
        size[r] = size.get(r, 0) + 1
    for p in range(n // 2 + n % 2):
        q = hat(p, n)
        if run[p] != run[q]:
            allowed = size[run[p]] >= 2 or size[run[q]] >= 2
        else:
            allowed = p == q or size[run[p]] > 2
        if not allowed:
            rows.append(_pair_minus(n, p, q, n - 1, GT))
    return rows


@dataclass
class SearchStats:
    orders: int = 0
    patterns: int = 0
    fm_calls: int = 0
    log: list[str] = field(default_factory=list)


def _search_order(L: LieAlgebra, order: tuple[int, ...], stats: SearchStats) -> FiltrationWitness | None:
    n = L.n
    Lr = reorder(L, order)
    base = base_system(Lr)
    stats.fm_calls += 1
    if not fm_feasible(base):
        stats.log.append(f"order {order}: base system infeasible")
        return None
    free = []
    for p in range(n - 1):
        stats.fm_calls += 1
        if fm_feasible(base.extended([_row(n, {p + 1: 1, p: -1}, EQ)])):
            free.append(p)
    for k in range(len(free) + 1):
        for eq in combinations(free, k):
            stats.patterns += 1
            stats.fm_calls += 1
            system = base.extended(pattern_rows(n, frozenset(eq)))
            res = fm_feasible(system)
            if res:
                weights = tuple(integerize(res.witness))
                check = check_F_assignment(L, order, weights)
                if not check:
                    raise AssertionError(f"search produced an invalid filtration: {check.describe()}")
                return FiltrationWitness(order, weights)
    stats.log.append(f"order {order}: all {2 ** len(free)} patterns infeasible")
    return None


def graded_candidate(L: LieAlgebra) -> FiltrationWitness | None:
    """Filtration induced by a rank-one diagonal grading with weights of one sign."""
    T = diagonal_derivations(L)
    if T.rank != 1:
        return None
    vals = [w[0] for w in T.weight_rows]
    if all(v < 0 for v in vals):
        vals = [-v for v in vals]
    if not all(v > 0 for v in vals):
        return None
    order = tuple(sorted(range(L.n), key=lambda i: (vals[i], i)))
    weights = tuple(integerize([vals[i] for i in order]))
    if check_F_assignment(L, order, weights):
        return FiltrationWitness(order, weights)
    return None


def search_filtration(
    L: LieAlgebra,
    prefer_grading: bool = True,
    stats: SearchStats | None = None,
) -> FiltrationWitness | None:
    """First filtration satisfying (F1)-(F4) adapted to a reordering of the basis.

    With ``prefer_grading`` the positive grading of a rank-one diagonal torus
    is tried before the exhaustive search; the exhaustive search alone
    decides ``None``.
    """
    stats = stats if stats is not None else SearchStats()
    if prefer_grading:
        cand = graded_candidate(L)
        if cand is not None:
            stats.log.append("rank-one positive grading gives a filtration")
            return cand
    for adm in admissible_orders(L):
        stats.orders += 1
        found = _search_order(L, adm.order, stats)
        if found is not None:
            return found
    log.debug("no adapted filtration after %d orders", stats.orders)
    return None


def filtration_layers(w: FiltrationWitness) -> list[tuple[int, tuple[int, ...]]]:
    """``(weight, positions spanning L_weight)`` for each distinct weight, increasing."""
    out = []
    for v in sorted(set(w.weights)):
        out.append((v, tuple(p for p, x in enumerate(w.weights) if x >= v)))
    return out
