"""Nilpotent Lie algebras given by structure constants.

A Lie algebra is stored through the exterior derivatives of a coframe,
``de^k = sum_{i<j} a^k_{ij} e^i ^ e^j``, the convention used by Salamon-style
notation such as ``"0,0,e^{12}"``.  Indices are 0-based in the Python API and
1-based in every textual form.

Brackets follow ``d alpha(x, y) = -alpha([x, y])``, so that
``[e_i, e_j] = -sum_k a^k_{ij} e_k``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

MAX_DIM = 16
DEFAULT_PARAMETER_VALUE = Fraction(2)


class ParseError(ValueError):
    """Malformed structure-constant string; ``pos`` is a 0-based offset."""

    def __init__(self, message: str, pos: int | None = None, text: str | None = None):
        self.pos = pos
        self.text = text
        if pos is not None:
            message = f"{message} (at column {pos + 1})"
        super().__init__(message)


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip().replace("−", "-"))
    return Fraction(x)


def format_fraction(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class LieAlgebra:
    """An n-dimensional Lie algebra over Q, immutable after construction.

    ``diff`` maps each k to ``{(i, j): a^k_ij}`` with ``i < j``; zero
    coefficients are dropped.  ``params`` records the parameter values that
    were substituted while parsing.
    """

    __slots__ = ("n", "_diff", "params", "_brackets", "_key")

    def __init__(self, n: int, diff: Sequence[Mapping[tuple[int, int], object]], params=None):
        if not 1 <= n <= MAX_DIM:
            raise ValueError(f"dimension {n} outside 1..{MAX_DIM}")
        if len(diff) != n:
            raise ValueError(f"expected {n} differentials, got {len(diff)}")
        table = []
        for k, dk in enumerate(diff):
            clean = {}
            for (i, j), c in dk.items():
                c = as_fraction(c)
                if i == j:
                    raise ValueError(f"repeated index in e^{{{i + 1}{j + 1}}}")
                if not (0 <= i < n and 0 <= j < n):
                    raise ValueError(f"index out of range in de^{k + 1}")
                if i > j:
                    i, j, c = j, i, -c
                clean[(i, j)] = clean.get((i, j), Fraction(0)) + c
            table.append({ij: c for ij, c in sorted(clean.items()) if c != 0})
        self.n = n
        self._diff = tuple(table)
        self.params = dict(params or {})
        brackets: dict[tuple[int, int], dict[int, Fraction]] = {}
        for k, dk in enumerate(self._diff):
            for (i, j), c in dk.items():
                brackets.setdefault((i, j), {})[k] = -c
        self._brackets = brackets
        self._key = tuple(tuple(sorted(dk.items())) for dk in self._diff)

    # -- basic access ---------------------------------------------------
    def d(self, k: int) -> dict[tuple[int, int], Fraction]:
        """Coefficients of ``de^k`` as ``{(i, j): a}`` with ``i < j``."""
        return dict(self._diff[k])

    @property
    def diff(self) -> tuple[dict[tuple[int, int], Fraction], ...]:
        return tuple(dict(dk) for dk in self._diff)

    def coefficient(self, k: int, i: int, j: int) -> Fraction:
        """``de^k(e_i, e_j)``, antisymmetric in ``(i, j)``."""
        if i == j:
            return Fraction(0)
        if i < j:
            return self._diff[k].get((i, j), Fraction(0))
        return -self._diff[k].get((j, i), Fraction(0))

    def structure_triples(self) -> list[tuple[int, int, int, Fraction]]:
        """All ``(i, j, k, a^k_ij)`` with ``i < j`` and nonzero coefficient."""
        return [(i, j, k, c) for k, dk in enumerate(self._diff) for (i, j), c in dk.items()]

    def bracket_sparse(self, i: int, j: int) -> dict[int, Fraction]:
        if i == j:
            return {}
        if i < j:
            return dict(self._brackets.get((i, j), {}))
        return {k: -c for k, c in self._brackets.get((j, i), {}).items()}

    def is_abelian(self) -> bool:
        return not any(self._diff)

    def __eq__(self, other):
        if not isinstance(other, LieAlgebra):
            return NotImplemented
        return self.n == other.n and self._key == other._key

    def __hash__(self):
        return hash((self.n, self._key))

    def __repr__(self):
        return f"LieAlgebra({serialize(self)!r})"

    def __str__(self):
        return serialize(self)

    def __getstate__(self):
        return (self.n, self._diff, self.params)

    def __setstate__(self, state):
        n, diff, params = state
        self.__init__(n, diff, params)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<frac>\\[dt]?frac\s*(?:\{\s*(?P<fnum>\d+)\s*\}\s*\{\s*(?P<fden>\d+)\s*\}|(?P<fa>\d)(?P<fb>\d)))
  | (?P<wedge>[eE]\s*\^\s*(?:\{(?P<widx>[^}]*)\}|(?P<wbare>\d\d)))
  | (?P<num>\d+(?:\.\d+)?(?:\s*/\s*\d+)?)
  | (?P<ident>\\?[A-Za-z_α-ω][A-Za-z0-9_α-ω]*(?:_\{?\d+\}?)?)
  | (?P<op>[-+*(),−])
    """,
    re.VERBOSE,
)

_GREEK = {"λ": "lambda", "μ": "mu", "α": "alpha", "β": "beta", "γ": "gamma"}


def _normalize_ident(raw: str) -> str:
    name = raw.lstrip("\\")
    for g, latin in _GREEK.items():
        name = name.replace(g, latin)
    return name.replace("{", "").replace("}", "")


@dataclass
class _Token:
    kind: str
    value: object
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if m.group("ws"):
            pass
        elif m.group("frac"):
            num, den = (m.group("fnum"), m.group("fden")) if m.group("fnum") else (m.group("fa"), m.group("fb"))
            if int(den) == 0:
                raise ParseError("zero denominator", pos, text)
            tokens.append(_Token("num", Fraction(int(num), int(den)), pos))
        elif m.group("wedge"):
            raw = m.group("widx") if m.group("widx") is not None else m.group("wbare")
            tokens.append(_Token("wedge", raw, pos))
        elif m.group("num"):
            s = m.group("num").replace(" ", "")
            try:
                value = Fraction(s)
            except ZeroDivisionError:
                raise ParseError("zero denominator", pos, text) from None
            tokens.append(_Token("num", value, pos))
        elif m.group("ident"):
            tokens.append(_Token("ident", _normalize_ident(m.group("ident")), pos))
        else:
            op = m.group("op")
            tokens.append(_Token("op", "-" if op == "−" else op, pos))
        pos = m.end()
        del kind
    return tokens


def _wedge_indices(raw: str, pos: int, n: int, text: str) -> tuple[int, int]:
    raw = raw.strip()
    if "," in raw:
        parts = [p.strip() for p in raw.split(",")]
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise ParseError(f"bad wedge indices {{{raw}}}", pos, text)
        i, j = int(parts[0]), int(parts[1])
    else:
        if len(raw) != 2 or not raw.isdigit():
            raise ParseError(
                f"wedge e^{{{raw}}} needs two single-digit indices (use e^{{i,j}} for n >= 10)",
                pos,
                text,
            )
        i, j = int(raw[0]), int(raw[1])
    for idx in (i, j):
        if not 1 <= idx <= n:
            raise ParseError(f"index {idx} exceeds n={n}" if idx > n else f"index {idx} out of range", pos, text)
    if i == j:
        raise ParseError(f"repeated index in e^{{{raw}}}", pos, text)
    return i - 1, j - 1


class _Parser:
    """Recursive descent over one differential ``de^k``.

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := atom ('*'? atom)*          exactly one atom carries a two-form
    atom   := number | ident | wedge | '(' expr ')'
    """

    def __init__(self, tokens, n, text, subst, declared, used):
        self.tokens = tokens
        self.i = 0
        self.n = n
        self.text = text
        self.subst = subst
        self.declared = declared
        self.used = used

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def end_pos(self):
        return self.tokens[-1].pos if self.tokens else 0

    def parse(self) -> dict[tuple[int, int], Fraction]:
        tok = self.peek()
        if tok is not None and tok.kind == "num" and tok.value == 0 and len(self.tokens) == 1:
            return {}
        form = self.expr()
        if self.peek() is not None:
            tok = self.peek()
            raise ParseError(f"unexpected {tok.value!r}", tok.pos, self.text)
        return form

    def expr(self) -> dict[tuple[int, int], Fraction]:
        total: dict[tuple[int, int], Fraction] = {}
        sign = 1
        tok = self.peek()
        if tok is not None and tok.kind == "op" and tok.value in "+-":
            sign = -1 if tok.value == "-" else 1
            self.take()
        while True:
            for ij, c in self.term().items():
                total[ij] = total.get(ij, Fraction(0)) + sign * c
            tok = self.peek()
            if tok is None or not (tok.kind == "op" and tok.value in "+-"):
                return total
            self.take()
            sign = -1 if tok.value == "-" else 1

    def term(self) -> dict[tuple[int, int], Fraction]:
        scalar = Fraction(1)
        form = None
        start = self.peek()
        if start is None:
            raise ParseError("expected a term", self.end_pos(), self.text)
        natoms = 0
        while True:
            tok = self.peek()
            if tok is None:
                break
            if tok.kind == "op" and tok.value == "*":
                if natoms == 0:
                    raise ParseError("unexpected '*'", tok.pos, self.text)
                self.take()
                tok = self.peek()
                if tok is None:
                    raise ParseError("dangling '*'", self.end_pos(), self.text)
            if tok.kind == "num":
                self.take()
                scalar *= tok.value
            elif tok.kind == "ident":
                self.take()
                scalar *= self.param(tok)
            elif tok.kind == "wedge":
                self.take()
                if form is not None:
                    raise ParseError("product of two-forms is not a two-form", tok.pos, self.text)
                form = {_wedge_indices(tok.value, tok.pos, self.n, self.text): Fraction(1)}
            elif tok.kind == "op" and tok.value == "(":
                self.take()
                inner = self.expr()
                close = self.peek()
                if close is None or close.value != ")":
                    raise ParseError("missing ')'", close.pos if close else self.end_pos(), self.text)
                self.take()
                if form is not None:
                    raise ParseError("product of two-forms is not a two-form", tok.pos, self.text)
                form = inner
            else:
                break
            natoms += 1
        if natoms == 0:
            raise ParseError(f"expected a term, got {start.value!r}", start.pos, self.text)
        if form is None:
            raise ParseError("term has no e^{ij} factor", start.pos, self.text)
        return {ij: scalar * c for ij, c in form.items()}

    def param(self, tok) -> Fraction:
        name = tok.value
        if name in self.subst:
            value = as_fraction(self.subst[name])
        elif name in self.declared:
            value = DEFAULT_PARAMETER_VALUE
        else:
            raise ParseError(f"undeclared parameter {name!r}", tok.pos, self.text)
        self.used[name] = value
        return value


def parse_algebra(
    text: str,
    subst: Mapping[str, object] | None = None,
    declared: Iterable[str] = (),
) -> LieAlgebra:
    """Parse Salamon notation such as ``"0,0,e^{12},e^{13}+2e^{24}"``.

    Parameters appearing as identifiers (``\\lambda``, ``lambda``, ``t``)
    take their value from ``subst``; a name listed in ``declared`` but absent
    from ``subst`` gets the value 2.  The Jacobi identity is not checked.
    """
    subst = {_normalize_ident(k): v for k, v in (subst or {}).items()}
    declared = {_normalize_ident(d) for d in declared} | set(subst)
    tokens = _tokenize(text)
    groups: list[list[_Token]] = [[]]
    for tok in tokens:
        if tok.kind == "op" and tok.value == ",":
            groups.append([])
        else:
            groups[-1].append(tok)
    n = len(groups)
    if n > MAX_DIM:
        raise ParseError(f"dimension {n} exceeds {MAX_DIM}", 0, text)
    for g_index, g in enumerate(groups):
        if not g:
            raise ParseError(f"empty differential in slot {g_index + 1}", _slot_pos(tokens, g_index), text)
    used: dict[str, Fraction] = {}
    diff = []
    for g in groups:
        diff.append(_Parser(g, n, text, subst, declared, used).parse())
    return LieAlgebra(n, diff, params=used)


def _slot_pos(tokens, slot):
    commas = [t.pos for t in tokens if t.kind == "op" and t.value == ","]
    if slot == 0:
        return 0
    return commas[slot - 1] if slot - 1 < len(commas) else 0


def _coef_prefix(c: Fraction) -> str:
    if c == 1:
        return ""
    if c == -1:
        return "-"
    return format_fraction(c)


def serialize(L: LieAlgebra, letter: str = "e") -> str:
    """Canonical Salamon string: terms ordered by (i, j), coefficient 1 omitted."""
    wide = L.n >= 10
    parts = []
    for dk in L.diff:
        if not dk:
            parts.append("0")
            continue
        s = ""
        for (i, j), c in sorted(dk.items()):
            idx = f"{i + 1},{j + 1}" if wide else f"{i + 1}{j + 1}"
            term = f"{_coef_prefix(c)}{letter}^{{{idx}}}"
            if s and not term.startswith("-"):
                s += "+"
            s += term
        parts.append(s)
    return ",".join(parts)


# ---------------------------------------------------------------------------
# Brackets, Jacobi, niceness
# ---------------------------------------------------------------------------

def _check_index(L: LieAlgebra, *idx: int) -> None:
    for i in idx:
        if not 0 <= i < L.n:
            raise IndexError(f"index {i} out of range for dimension {L.n}")


def bracket(L: LieAlgebra, i: int, j: int) -> list[Fraction]:
    """Coordinates of ``[e_i, e_j]`` (0-based indices)."""
    _check_index(L, i, j)
    out = [Fraction(0)] * L.n
    for k, c in L.bracket_sparse(i, j).items():
        out[k] = c
    return out


def bracket_vectors(L: LieAlgebra, x: Sequence[Fraction], y: Sequence[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * L.n
    for (i, j), comps in L._brackets.items():
        coeff = x[i] * y[j] - x[j] * y[i]
        if coeff:
            for k, c in comps.items():
                out[k] += coeff * c
    return out


def hat(i: int, n: int) -> int:
    """0-based version of ``i -> n + 1 - i``."""
    return n - 1 - i


def _d_of_two_form(L: LieAlgebra, form: Mapping[tuple[int, int], Fraction]) -> dict[tuple[int, int, int], Fraction]:
    """Exterior derivative of a 2-form, as sorted-triple coefficients."""
    out: dict[tuple[int, int, int], Fraction] = {}

    def add(a, b, c, coeff):
        if len({a, b, c}) < 3:
            return
        idx = [a, b, c]
        # sign of the permutation sorting idx
        sign = 1
        for p in range(3):
            for q in range(p + 1, 3):
                if idx[p] > idx[q]:
                    sign = -sign
        key = tuple(sorted(idx))
        out[key] = out.get(key, Fraction(0)) + sign * coeff

    # d(e^i ^ e^j) = de^i ^ e^j - e^i ^ de^j
    for (i, j), a in form.items():
        for (p, q), b in L._diff[i].items():
            add(p, q, j, a * b)
        for (p, q), b in L._diff[j].items():
            add(i, p, q, -a * b)
    return {k: v for k, v in out.items() if v != 0}


def jacobi_check(L: LieAlgebra) -> list[tuple[int, int, int, int, Fraction]]:
    """Return the violations of ``d^2 = 0``; an empty list means Jacobi holds.

    Each violation is ``(k, a, b, c, coeff)``: ``d(de^k)`` has coefficient
    ``coeff`` on ``e^a ^ e^b ^ e^c``.
    """
    bad = []
    for k in range(L.n):
        for (a, b, c), v in sorted(_d_of_two_form(L, L._diff[k]).items()):
            bad.append((k, a, b, c, v))
    return bad


def jacobi_sum(L: LieAlgebra, i: int, j: int, k: int) -> list[Fraction]:
    """``[[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j]``."""
    e = _unit_vectors(L.n)
    total = [Fraction(0)] * L.n
    for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
        inner = bracket(L, a, b)
        outer = bracket_vectors(L, inner, e[c])
        total = [s + t for s, t in zip(total, outer)]
    return total


def _unit_vectors(n):
    return [[Fraction(int(r == c)) for r in range(n)] for c in range(n)]


@dataclass(frozen=True)
class NiceReport:
    is_nice: bool
    violations: tuple = field(default_factory=tuple)


def is_nice_basis(L: LieAlgebra) -> NiceReport:
    """Check that brackets and contractions ``e_i -| de^j`` each have one component.

    Violations are ``("bracket", i, j, components)`` or
    ``("contraction", i, j, components)`` with 0-based indices.
    """
    violations = []
    for i, j in combinations(range(L.n), 2):
        comps = L.bracket_sparse(i, j)
        if len(comps) >= 2:
            violations.append(("bracket", i, j, tuple(sorted(comps))))
    for j in range(L.n):
        for i in range(L.n):
            comps = set()
            for (p, q), c in L._diff[j].items():
                if p == i:
                    comps.add(q)
                elif q == i:
                    comps.add(p)
            if len(comps) >= 2:
                violations.append(("contraction", i, j, tuple(sorted(comps))))
    return NiceReport(not violations, tuple(violations))


def change_basis(L: LieAlgebra, M: Sequence[Sequence[object]]) -> LieAlgebra:
    """Rewrite ``L`` in the frame ``E_i = sum_r M[r][i] e_r`` (columns are new vectors)."""
    from .exactlin.linalg import inverse, to_matrix

    M = to_matrix(M)
    n = L.n
    if len(M) != n or any(len(row) != n for row in M):
        raise ValueError(f"basis change must be {n}x{n}")
    Minv = inverse(M)  # raises on singular input
    cols = [[M[r][i] for r in range(n)] for i in range(n)]
    diff = [dict() for _ in range(n)]
    for i, j in combinations(range(n), 2):
        br = bracket_vectors(L, cols[i], cols[j])
        if not any(br):
            continue
        for k in range(n):
            c = sum((Minv[k][r] * br[r] for r in range(n) if br[r]), Fraction(0))
            if c:
                diff[k][(i, j)] = -c
    return LieAlgebra(n, diff, params=L.params)


def lower_central_series_dims(L: LieAlgebra) -> list[int]:
    """Dimensions of g, [g,g], [g,[g,g]], ... until they stabilise."""
    from .exactlin.linalg import rank, rref

    n = L.n
    e = _unit_vectors(n)
    current = e
    dims = [n]
    while True:
        gens = []
        for x in e:
            for y in current:
                v = bracket_vectors(L, x, y)
                if any(v):
                    gens.append(v)
        r = rank(gens) if gens else 0
        if r == dims[-1]:
            return dims
        dims.append(r)
        if r == 0:
            return dims
        R, piv = rref(gens)
        current = [row for row in R[: len(piv)]]


def is_nilpotent(L: LieAlgebra) -> bool:
    return lower_central_series_dims(L)[-1] == 0
