"""Gradings from diagonal tori and weight sequences satisfying (G1)-(G5).

Weights are vectors in Q^k, the dual of a rank-k torus of diagonal
derivations.  A weight sequence assigns the original basis index
``order[p]`` to position ``p``; positions are 0-based and ``p`` is paired
with ``n - 1 - p``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .algebra import LieAlgebra, format_fraction, hat
from .exactlin.derivations import DiagonalTorus, Weight


def wadd(a: Weight, b: Weight) -> Weight:
    return tuple(x + y for x, y in zip(a, b))


def wsub(a: Weight, b: Weight) -> Weight:
    return tuple(x - y for x, y in zip(a, b))


def format_weight(w: Weight, names: Sequence[str] | None = None) -> str:
    """``(1/2, 1)`` -> ``"1/2 l1 + l2"``; rank-one weights print as a plain number."""
    if len(w) == 1 and names is None:
        return format_fraction(w[0])
    names = names or [f"l{i + 1}" for i in range(len(w))]
    out = ""
    for c, name in zip(w, names):
        if c == 0:
            continue
        mag = abs(c)
        body = name if mag == 1 else f"{format_fraction(mag)} {name}"
        if not out:
            out = body if c > 0 else f"-{body}"
        else:
            out += f" + {body}" if c > 0 else f" - {body}"
    return out or "0"


@dataclass(frozen=True)
class Grading:
    """Layers of ``L`` under a diagonal torus, keyed by weight."""

    torus: DiagonalTorus
    layers: tuple[tuple[Weight, tuple[int, ...]], ...]

    @property
    def n(self) -> int:
        return self.torus.n

    def weight_of(self, i: int) -> Weight:
        return self.torus.weight_rows[i]

    def weights(self) -> set[Weight]:
        return {w for w, _ in self.layers}

    def multiplicity(self, w: Weight) -> int:
        for ww, idx in self.layers:
            if ww == w:
                return len(idx)
        return 0

    def layer_dict(self) -> dict[Weight, tuple[int, ...]]:
        return dict(self.layers)


def _weight_key(w: Weight) -> tuple:
    """Height (sum of coordinates) first; for rank one this is the weight itself."""
    return (sum(w, Fraction(0)), tuple(w))


def grading_from_torus(L: LieAlgebra, T: DiagonalTorus) -> Grading:
    """Group basis indices by weight; raise if the torus does not act by derivations."""
    if T.n != L.n:
        raise ValueError(f"torus has {T.n} weights but the algebra has dimension {L.n}")
    bad = T.inconsistencies(L)
    if bad:
        i, j, k = bad[0]
        raise ValueError(f"weight rows inconsistent with the algebra: w{i + 1}+w{j + 1} != w{k + 1}")
    layers: dict[Weight, list[int]] = {}
    for i, w in enumerate(T.weight_rows):
        layers.setdefault(w, []).append(i)
    ordered = tuple(sorted(((w, tuple(idx)) for w, idx in layers.items()), key=lambda t: _weight_key(t[0])))
    return Grading(T, ordered)


@dataclass(frozen=True)
class WeightSequence:
    order: tuple[int, ...]
    weights: tuple[Weight, ...]

    @classmethod
    def from_order(cls, G: Grading, order: Sequence[int]) -> "WeightSequence":
        order = tuple(order)
        if sorted(order) != list(range(G.n)):
            raise ValueError("order must be a permutation of the basis indices")
        return cls(order, tuple(G.weight_of(i) for i in order))

    def format(self, names: Sequence[str] | None = None) -> tuple[str, str]:
        """Weight list and adapted basis in the two-column table layout."""
        w = ",".join(format_weight(x, names) for x in self.weights)
        basis = ",".join(f"e_{i + 1}" for i in self.order)
        return w, basis


@dataclass(frozen=True)
class GCheck:
    ok: bool
    condition: str | None = None
    witness: tuple[int, ...] = ()

    def __bool__(self) -> bool:
        return self.ok

    def describe(self) -> str:
        if self.ok:
            return "pass"
        pos = ",".join(str(p + 1) for p in self.witness)
        return f"fail {self.condition} at positions ({pos})"


def check_weight_list(weights: Sequence[Weight], weight_set: set[Weight] | None = None) -> GCheck:
    """Evaluate (G1)-(G5) on a weight sequence; the weight set defaults to its values.

    (G2) is checked in the form used by the proof: a sum ``w_i + w_ihat``
    that is a weight must equal ``w_n``, and ``w_n`` must then have
    multiplicity one.  (G5) is quantified over ``i != j``.
    """
    n = len(weights)
    W = set(weights) if weight_set is None else weight_set
    mult: dict[Weight, int] = {}
    for w in weights:
        mult[w] = mult.get(w, 0) + 1
    where: dict[Weight, list[int]] = {}
    for p, w in enumerate(weights):
        where.setdefault(w, []).append(p)
    last = weights[-1]

    # (G1) if w_i + w_j = w_k and i != j then i, j < k
    for i in range(n):
        for j in range(i + 1, n):
            s = wadd(weights[i], weights[j])
            for k in where.get(s, ()):
                if not (i < k and j < k):
                    return GCheck(False, "G1", (i, j, k))
    # (G2)
    for i in range(n):
        ih = hat(i, n)
        s = wadd(weights[i], weights[ih])
        if s in W:
            if s != last:
                return GCheck(False, "G2", (i, ih))
            if mult[last] != 1:
                return GCheck(False, "G2", (i, ih, n - 1))
    # (G3), (G4)
    for i in range(n):
        ih = hat(i, n)
        if ih < i:
            continue
        if wadd(weights[i], weights[ih]) != last:
            continue
        if weights[i] != weights[ih]:
            if mult[weights[i]] < 2 and mult[weights[ih]] < 2:
                return GCheck(False, "G3", (i, ih))
        elif i != ih and mult[weights[i]] <= 2:
            return GCheck(False, "G4", (i, ih))
    # (G5) if w_i + w_j and w_ihat + w_jhat are weights then w_j = w_ihat, w_i = w_jhat
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if wadd(weights[i], weights[j]) not in W:
                continue
            ih, jh = hat(i, n), hat(j, n)
            if wadd(weights[ih], weights[jh]) not in W:
                continue
            if weights[j] != weights[ih] or weights[i] != weights[jh]:
                return GCheck(False, "G5", (i, j))
    return GCheck(True)


def check_G_sequence(G: Grading, S: WeightSequence) -> GCheck:
    for p, i in enumerate(S.order):
        if G.weight_of(i) != S.weights[p]:
            raise ValueError(f"position {p + 1} carries a weight different from e_{i + 1}")
    return check_weight_list(S.weights, G.weights())


def precedence(G: Grading) -> dict[int, set[int]]:
    """``a -> c`` when some ``b != a`` has ``w_a + w_b = w_c``; (G1) forces a before c."""
    n = G.n
    w = G.torus.weight_rows
    by_weight = G.layer_dict()
    succ: dict[int, set[int]] = {i: set() for i in range(n)}
    for a in range(n):
        for b in range(n):
            if a == b:
                continue
            for c in by_weight.get(wadd(w[a], w[b]), ()):
                succ[a].add(c)
    return succ


@dataclass(frozen=True)
class G1Obstruction:
    """A cycle of forced precedences: ``steps[t] = (a, b, c)`` means ``d_a + d_b = d_c``."""

    steps: tuple[tuple[int, int, int], ...]

    def describe(self) -> str:
        eqs = sorted((c, min(a, b), max(a, b)) for a, b, c in self.steps)
        return ", ".join(f"d{a + 1}+d{b + 1}=d{c + 1}" for c, a, b in eqs)


def _precedence_reasons(G: Grading) -> dict[tuple[int, int], int]:
    """``(a, c) -> b`` for the first ``b != a`` with ``d_a + d_b = d_c``."""
    n = G.n
    w = G.torus.weight_rows
    by_weight = G.layer_dict()
    reason: dict[tuple[int, int], int] = {}
    for a in range(n):
        for b in range(n):
            if a == b:
                continue
            for c in by_weight.get(wadd(w[a], w[b]), ()):
                reason.setdefault((a, c), b)
    return reason


def g1_obstructions(G: Grading) -> list[G1Obstruction]:
    """Every two-step cycle of the (G1) precedence; failing that, one longer cycle."""
    reason = _precedence_reasons(G)
    out = []
    for (a, c), b in sorted(reason.items()):
        if a < c and (c, a) in reason:
            out.append(G1Obstruction(((a, b, c), (c, reason[(c, a)], a))))
    if out:
        return out
    n = G.n
    succ: dict[int, list[int]] = {i: [] for i in range(n)}
    for a, c in sorted(reason):
        succ[a].append(c)
    color = [0] * n
    stack: list[int] = []

    def dfs(u: int):
        color[u] = 1
        stack.append(u)
        for v in succ[u]:
            if color[v] == 1:
                return stack[stack.index(v):] + [v]
            if color[v] == 0:
                found = dfs(v)
                if found:
                    return found
        stack.pop()
        color[u] = 2
        return None

    for s in range(n):
        if color[s] == 0:
            cyc = dfs(s)
            if cyc:
                return [G1Obstruction(tuple((a, reason[(a, c)], c) for a, c in zip(cyc, cyc[1:])))]
    return []


def g1_obstruction(G: Grading) -> G1Obstruction | None:
    """A shortest cycle in the (G1) precedence relation, if there is one."""
    found = g1_obstructions(G)
    return found[0] if found else None


def enumerate_G_sequences(G: Grading) -> Iterator[WeightSequence]:
    """Yield every weight sequence satisfying (G1)-(G5), lexicographically.

    Sequences are grown one position at a time; an index may be placed only
    once all of its (G1) predecessors are placed.  Candidates at each
    position are tried in order of (height of the weight, original index).  The check of
    (G2)-(G5) depends only on the weights, so it is cached per weight list.
    """
    n = G.n
    succ = precedence(G)
    if g1_obstruction(G) is not None:
        return
    indeg = [0] * n
    for a in range(n):
        for c in succ[a]:
            indeg[c] += 1
    w = G.torus.weight_rows
    candidates = sorted(range(n), key=lambda i: (_weight_key(w[i])[0], i))
    W = G.weights()
    cache: dict[tuple, bool] = {}
    order: list[int] = []
    placed = [False] * n

    def rec():
        if len(order) == n:
            key = tuple(w[i] for i in order)
            ok = cache.get(key)
            if ok is None:
                ok = bool(check_weight_list(key, W))
                cache[key] = ok
            if ok:
                yield WeightSequence(tuple(order), key)
            return
        for i in candidates:
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


def first_G_sequence(G: Grading) -> WeightSequence | None:
    return next(enumerate_G_sequences(G), None)


def scale_to_unit_top(G: Grading) -> list[Fraction] | None:
    """For a rank-one grading, weights rescaled so the largest is 1."""
    if G.torus.rank != 1:
        return None
    vals = [w[0] for w in G.torus.weight_rows]
    top = max(vals, key=abs)
    if top == 0:
        return None
    return [v / top for v in vals]
