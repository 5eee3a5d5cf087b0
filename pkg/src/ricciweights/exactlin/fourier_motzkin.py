"""Feasibility of mixed strict / non-strict linear systems by Fourier-Motzkin.

Constraints are stored as ``coeffs . w  REL  const`` with ``REL`` one of
``>=``, ``>`` or ``=``.  Equalities are eliminated by substitution first; the
remaining inequalities are projected away one variable at a time, last index
first.  A feasible system yields an exact witness built by back-substituting
the midpoint of each residual interval; an infeasible one yields the derived
contradiction together with the multipliers expressing it in terms of the
input rows (nonnegative on inequalities).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from ..algebra import as_fraction, format_fraction

GE, GT, EQ = ">=", ">", "="
_FLIP = {"<=": GE, "<": GT}


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple[Fraction, ...]
    const: Fraction
    rel: str

    def value(self, w: Sequence[Fraction]) -> Fraction:
        return sum((a * x for a, x in zip(self.coeffs, w)), Fraction(0))

    def holds(self, w: Sequence[Fraction]) -> bool:
        v = self.value(w)
        if self.rel == GE:
            return v >= self.const
        if self.rel == GT:
            return v > self.const
        return v == self.const

    def __str__(self) -> str:
        return f"{format_linear(self.coeffs)} {self.rel} {format_fraction(self.const)}"


def format_linear(coeffs: Sequence[Fraction], var: str = "w") -> str:
    out = ""
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        mag = abs(c)
        body = f"{'' if mag == 1 else format_fraction(mag)}{var}{i + 1}"
        if not out:
            out = body if c > 0 else f"-{body}"
        else:
            out += f" + {body}" if c > 0 else f" - {body}"
    return out or "0"


class ConstraintSystem:
    """A list of linear constraints in ``nvars`` unknowns ``w1..wm``."""

    def __init__(self, nvars: int, constraints: Iterable[Constraint] = ()):
        if nvars < 1:
            raise ValueError("need at least one variable")
        self.nvars = nvars
        self.constraints: list[Constraint] = []
        for c in constraints:
            self._append(c)

    def _append(self, c: Constraint) -> None:
        if len(c.coeffs) != self.nvars:
            raise ValueError(f"constraint has {len(c.coeffs)} coefficients, expected {self.nvars}")
        self.constraints.append(c)

    def add(self, coeffs: Sequence[object], rel: str, const: object = 0) -> "ConstraintSystem":
        coeffs = tuple(as_fraction(a) for a in coeffs)
        const = as_fraction(const)
        if rel in _FLIP:
            coeffs, const, rel = tuple(-a for a in coeffs), -const, _FLIP[rel]
        elif rel == "==":
            rel = EQ
        if rel not in (GE, GT, EQ):
            raise ValueError(f"unknown relation {rel!r}")
        self._append(Constraint(coeffs, const, rel))
        return self

    def add_sparse(self, terms: dict[int, object], rel: str, const: object = 0) -> "ConstraintSystem":
        coeffs = [Fraction(0)] * self.nvars
        for i, a in terms.items():
            coeffs[i] += as_fraction(a)
        return self.add(coeffs, rel, const)

    def copy(self) -> "ConstraintSystem":
        return ConstraintSystem(self.nvars, self.constraints)

    def extended(self, more: Iterable[Constraint]) -> "ConstraintSystem":
        out = self.copy()
        for c in more:
            out._append(c)
        return out

    def satisfied_by(self, w: Sequence[Fraction]) -> bool:
        return all(c.holds(w) for c in self.constraints)

    def __len__(self):
        return len(self.constraints)

    def __iter__(self):
        return iter(self.constraints)

    def __str__(self) -> str:
        return "\n".join(str(c) for c in self.constraints)


@dataclass
class FeasibilityResult:
    feasible: bool
    witness: list[Fraction] | None = None
    contradiction: Constraint | None = None
    multipliers: dict[int, Fraction] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.feasible


class _Row:
    __slots__ = ("a", "b", "strict", "mult", "support")

    def __init__(self, a, b, strict, mult, support):
        self.a = a
        self.b = b
        self.strict = strict
        self.mult = mult
        self.support = support

    def scaled(self, f: Fraction) -> "_Row":
        return _Row(
            tuple(x * f for x in self.a),
            self.b * f,
            self.strict,
            {k: v * f for k, v in self.mult.items()},
            self.support,
        )


def _combine(p: _Row, fp: Fraction, q: _Row, fq: Fraction) -> tuple:
    a = tuple(x * fp + y * fq for x, y in zip(p.a, q.a))
    b = p.b * fp + q.b * fq
    mult = {k: v * fp for k, v in p.mult.items()}
    for k, v in q.mult.items():
        mult[k] = mult.get(k, Fraction(0)) + v * fq
    return a, b, {k: v for k, v in mult.items() if v != 0}


def _normalize(row: _Row) -> _Row:
    lead = next((x for x in row.a if x != 0), None)
    if lead is None or abs(lead) == 1:
        return row
    return row.scaled(1 / abs(lead))


def _violated_constant(row: _Row) -> bool:
    # row reads 0 >= b (or 0 > b)
    return row.b > 0 or (row.strict and row.b == 0)


def _dedupe(rows: list[_Row]) -> list[_Row]:
    best: dict[tuple, _Row] = {}
    order = []
    for r in rows:
        r = _normalize(r)
        key = r.a
        cur = best.get(key)
        if cur is None:
            best[key] = r
            order.append(key)
            continue
        if (r.b, r.strict) > (cur.b, cur.strict) or (
            (r.b, r.strict) == (cur.b, cur.strict) and len(r.support) < len(cur.support)
        ):
            best[key] = r
    return [best[k] for k in order]


def _infeasible(row: _Row, m: int) -> FeasibilityResult:
    contradiction = Constraint(tuple(Fraction(0) for _ in range(m)), row.b, GT if row.strict else GE)
    return FeasibilityResult(False, contradiction=contradiction, multipliers=dict(row.mult))


def fm_feasible(system: ConstraintSystem) -> FeasibilityResult:
    """Decide feasibility; return an exact witness or a certified contradiction."""
    m = system.nvars
    eqs: list[_Row] = []
    ineqs: list[_Row] = []
    for idx, c in enumerate(system.constraints):
        row = _Row(c.coeffs, c.const, c.rel == GT, {idx: Fraction(1)}, frozenset())
        (eqs if c.rel == EQ else ineqs).append(row)

    # --- equalities by substitution -------------------------------------
    substitutions: list[tuple[int, tuple, Fraction]] = []
    while eqs:
        e = eqs.pop(0)
        v = next((i for i in range(m - 1, -1, -1) if e.a[i] != 0), None)
        if v is None:
            if e.b != 0:
                # 0 = b with b != 0: orient as 0 >= |b|
                return _infeasible(e.scaled(Fraction(1 if e.b > 0 else -1)), m)
            continue
        substitutions.append((v, e.a, e.b))
        piv = e.a[v]

        def eliminate(r: _Row) -> _Row:
            if r.a[v] == 0:
                return r
            f = -r.a[v] / piv
            a, b, mult = _combine(r, Fraction(1), e, f)
            return _Row(a, b, r.strict, mult, r.support)

        eqs = [eliminate(r) for r in eqs]
        ineqs = [eliminate(r) for r in ineqs]

    substituted = {v for v, _, _ in substitutions}
    rows = []
    for k, r in enumerate(ineqs):
        r = _Row(r.a, r.b, r.strict, r.mult, frozenset([k]))
        if not any(r.a):
            if _violated_constant(r):
                return _infeasible(r, m)
            continue
        rows.append(r)
    rows = _dedupe(rows)

    # --- Fourier-Motzkin on the remaining variables ---------------------
    eliminations: list[tuple[int, list[_Row], list[_Row]]] = []
    order = [v for v in range(m - 1, -1, -1) if v not in substituted]
    for step, v in enumerate(order, start=1):
        pos = [r for r in rows if r.a[v] > 0]
        neg = [r for r in rows if r.a[v] < 0]
        rest = [r for r in rows if r.a[v] == 0]
        eliminations.append((v, pos, neg))
        new_rows = list(rest)
        for p in pos:
            for q in neg:
                support = p.support | q.support
                if len(support) > step + 1:
                    continue  # Chernikov: redundant
                a, b, mult = _combine(p, -q.a[v], q, p.a[v])
                r = _Row(a, b, p.strict or q.strict, mult, support)
                if not any(a):
                    if _violated_constant(r):
                        return _infeasible(r, m)
                    continue
                new_rows.append(r)
        rows = _dedupe(new_rows)

    # --- back substitution -----------------------------------------------
    w: list[Fraction] = [Fraction(0)] * m
    for v, pos, neg in reversed(eliminations):
        lo, lo_strict = _tightest(pos, v, w, max)
        hi, hi_strict = _tightest(neg, v, w, min)
        if lo is not None and hi is not None:
            w[v] = (lo + hi) / 2 if lo < hi else lo
        elif lo is not None:
            w[v] = lo + 1 if lo_strict else lo
        elif hi is not None:
            w[v] = hi - 1 if hi_strict else hi
        else:
            w[v] = Fraction(0)
    for v, a, b in reversed(substitutions):
        rest = sum((a[u] * w[u] for u in range(m) if u != v and a[u]), Fraction(0))
        w[v] = (b - rest) / a[v]

    if not system.satisfied_by(w):
        bad = next(c for c in system.constraints if not c.holds(w))
        raise AssertionError(f"Fourier-Motzkin witness violates {bad}")
    return FeasibilityResult(True, witness=w)


def _tightest(rows: list[_Row], v: int, w: list[Fraction], pick) -> tuple[Fraction | None, bool]:
    """Tightest bound on ``w[v]`` from ``rows`` and whether it is strict."""
    bounds = []
    for r in rows:
        rest = sum((r.a[u] * w[u] for u in range(len(w)) if u != v and r.a[u]), Fraction(0))
        bounds.append(((r.b - rest) / r.a[v], r.strict))
    if not bounds:
        return None, False
    best = pick(b for b, _ in bounds)
    return best, any(s for b, s in bounds if b == best)


def check_certificate(system: ConstraintSystem, result: FeasibilityResult) -> bool:
    """Verify that the multipliers of an infeasible result prove infeasibility."""
    if result.feasible:
        return False
    m = system.nvars
    a = [Fraction(0)] * m
    b = Fraction(0)
    strict = False
    for idx, lam in result.multipliers.items():
        c = system.constraints[idx]
        if c.rel != EQ and lam < 0:
            return False
        a = [x + lam * y for x, y in zip(a, c.coeffs)]
        b += lam * c.const
        if c.rel == GT and lam > 0:
            strict = True
    if any(a):
        return False
    return b > 0 or (b == 0 and strict)
