"""Classification files: one algebra per line, with optional directives.

A record line is ``[name:] salamon`` and a ``#`` starts a comment.
Directive lines start with ``!`` and attach to the next record:

    !params lambda=3              parameter values (a bare name means the default)
    !frame e_1+e_2, e_1-e_2, ...  rewrite in this frame before anything else
    !torus 2/5 l1, 1/5 l1, ...    weights of a diagonal torus, one per basis vector
    !sequence e_2,e_1,... [: w_1,...,w_n]
                                  adapted basis of a weight sequence, with its weights;
                                  the weights also define the torus when !torus is absent
    !filtration e_1,...,e_7 : 2,3,8,11,12,16,18
    !sigma 18 35 [: g_1,...,g_n]  sigma-diagonal ansatz, with optional explicit parameters
    !expect grading|filtration|sigma|unresolved
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .algebra import LieAlgebra, ParseError, change_basis, parse_algebra

_LIN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | \\frac\{(?P<fnum>[^{}]*)\}\{(?P<fden>[^{}]*)\}
  | \\frac(?P<fa>\d)(?P<fb>\d)
  | (?P<num>\d+(?:\.\d+)?(?:/\d+)?)
  | (?P<sym>(?:\\lambda|λ|lambda|l|e)(?:_?\{\d+\}|_?\d+))
  | (?P<op>[-+*()−])
    """,
    re.VERBOSE,
)


def _number(text: str) -> Fraction:
    if "/" in text:
        a, b = text.split("/")
        return Fraction(Fraction(a), Fraction(b))
    return Fraction(text)


def parse_linear(text: str, symbol: str) -> dict[int | None, Fraction]:
    """Parse ``"2/5 l1 - \\frac{1}{2}l_2 + 3"`` into ``{0: 2/5, 1: -1/2, None: 3}``.

    ``symbol`` is the allowed symbol family: ``"l"`` for torus parameters
    (``l1``, ``λ1``, ``\\lambda_1``) or ``"e"`` for basis vectors (``e_1``).
    Keys are 0-based symbol indices; ``None`` is the constant term.
    """
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _LIN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind == "ws":
            pass
        elif kind in ("fden", "fnum"):
            toks.append(("num", Fraction(_number(m.group("fnum")), _number(m.group("fden"))), m.start()))
        elif kind in ("fa", "fb"):
            toks.append(("num", Fraction(int(m.group("fa")), int(m.group("fb"))), m.start()))
        elif kind == "num":
            toks.append(("num", _number(m.group("num")), m.start()))
        elif kind == "sym":
            raw = m.group("sym")
            family = "e" if raw.startswith("e") else "l"
            if family != symbol:
                raise ParseError(f"unexpected symbol {raw!r}", m.start(), text)
            idx = int(re.search(r"(\d+)\}?$", raw).group(1))
            if idx < 1:
                raise ParseError("symbol indices start at 1", m.start(), text)
            toks.append(("sym", idx - 1, m.start()))
        else:
            op = m.group("op").replace("−", "-")
            toks.append((op, None, m.start()))
        pos = m.end()
    toks.append(("end", None, len(text)))

    i = 0

    def peek():
        return toks[i][0]

    def take():
        nonlocal i
        t = toks[i]
        i += 1
        return t

    def expr() -> dict:
        out: dict = {}
        sign = 1
        if peek() in "+-":
            sign = -1 if take()[0] == "-" else 1
        while True:
            for k, v in term().items():
                out[k] = out.get(k, Fraction(0)) + sign * v
            if peek() in ("+", "-"):
                sign = -1 if take()[0] == "-" else 1
                continue
            return out

    def term() -> dict:
        coef = Fraction(1)
        seen_num = False
        while peek() == "num":
            coef *= take()[1]
            seen_num = True
            if peek() == "*":
                take()
        if peek() == "sym":
            return {take()[1]: coef}
        if peek() == "(":
            take()
            inner = expr()
            if take()[0] != ")":
                raise ParseError("missing ')'", toks[i - 1][2], text)
            return {k: coef * v for k, v in inner.items()}
        if seen_num:
            return {None: coef}
        kind, _, p = toks[i]
        raise ParseError(f"expected a term, found {kind!r}", p, text)

    result = expr()
    if peek() != "end":
        raise ParseError("trailing input", toks[i][2], text)
    return {k: v for k, v in result.items() if v != 0}


def split_top(text: str, sep: str = ",") -> list[str]:
    """Split on ``sep`` outside parentheses and braces."""
    out, depth, cur = [], 0, ""
    for ch in text:
        if ch in "({":
            depth += 1
        elif ch in ")}":
            depth -= 1
        if ch == sep and depth == 0:
            out.append(cur)
            cur = ""
        else:
            cur += ch
    out.append(cur)
    return [s.strip() for s in out]


def parse_weights(text: str) -> list[tuple[Fraction, ...]]:
    """Comma-separated weights; plain numbers give a rank-one torus."""
    items = [parse_linear(s, "l") for s in split_top(text)]
    rank = 0
    for d in items:
        for k in d:
            if k is not None:
                rank = max(rank, k + 1)
    if rank == 0:
        return [(d.get(None, Fraction(0)),) for d in items]
    if any(None in d for d in items):
        raise ParseError("weights mix constants with torus parameters", 0, text)
    return [tuple(d.get(k, Fraction(0)) for k in range(rank)) for d in items]


def parse_frame(text: str, n: int) -> list[list[Fraction]]:
    """``"e_1+e_2, e_1-e_2, -2e_3"`` -> matrix whose columns are the new vectors."""
    vecs = split_top(text)
    if len(vecs) != n:
        raise ParseError(f"frame has {len(vecs)} vectors, expected {n}", 0, text)
    M = [[Fraction(0)] * n for _ in range(n)]
    for c, v in enumerate(vecs):
        d = parse_linear(v, "e")
        if None in d:
            raise ParseError(f"constant term in frame vector {v!r}", 0, text)
        for r, a in d.items():
            if r >= n:
                raise ParseError(f"index e_{r + 1} out of range", 0, text)
            M[r][c] = a
    return M


def parse_order(text: str, n: int) -> tuple[int, ...]:
    """``"e_2,e_1,e_3"`` (or ``"2,1,3"``) -> 0-based permutation."""
    out = []
    for tok in split_top(text):
        m = re.fullmatch(r"(?:e_?\{?)?(\d+)\}?", tok.strip())
        if not m:
            raise ParseError(f"bad basis element {tok!r}", 0, text)
        out.append(int(m.group(1)) - 1)
    if sorted(out) != list(range(n)):
        raise ParseError(f"{text!r} is not a permutation of the basis", 0, text)
    return tuple(out)


def parse_rationals(text: str) -> list[Fraction]:
    out = []
    for tok in split_top(text):
        d = parse_linear(tok, "l")
        if any(k is not None for k in d):
            raise ParseError(f"expected a number, got {tok!r}", 0, text)
        out.append(d.get(None, Fraction(0)))
    return out


def parse_subst(items: Iterable[str]) -> dict[str, Fraction]:
    """``["lambda=3", "mu=1/2"]`` -> substitutions."""
    out = {}
    for item in items:
        if "=" not in item:
            raise ValueError(f"expected name=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip().lstrip("\\")] = _number(v.strip())
    return out


_METRIC_TERM = re.compile(r"\s*([-+]?)\s*([\d/]*)\s*e\^\{?(\d+)\}?\s*(⊙|⊗|\(\.\)|\(x\))\s*e\^\{?(\d+)\}?")


def parse_metric(text: str, n: int) -> list[list[Fraction]]:
    """Human form ``e^1⊙e^3+e^2⊗e^2`` (⊙ symmetric product, ⊗ tensor product)."""
    g = [[Fraction(0)] * n for _ in range(n)]
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _METRIC_TERM.match(text, pos)
        if not m:
            raise ParseError("bad metric term", pos, text)
        sign = -1 if m.group(1) == "-" else 1
        c = sign * (_number(m.group(2)) if m.group(2) else Fraction(1))
        i, j = int(m.group(3)) - 1, int(m.group(5)) - 1
        if not (0 <= i < n and 0 <= j < n):
            raise ParseError("index out of range", m.start(), text)
        if m.group(4) in ("⊙", "(.)"):
            g[i][j] += c
            g[j][i] += c
        else:
            g[i][j] += c
            if i != j:
                raise ParseError("use ⊙ for off-diagonal terms so the metric stays symmetric", m.start(), text)
        pos = m.end()
    return g


@dataclass
class AlgebraRecord:
    name: str
    algebra: LieAlgebra
    line: int
    text: str
    torus: list[tuple[Fraction, ...]] | None = None
    sequence: tuple[int, ...] | None = None
    sequence_weights: list[tuple[Fraction, ...]] | None = None
    filtration: tuple[tuple[int, ...], tuple[Fraction, ...]] | None = None
    sigma: str | None = None
    sigma_params: list[Fraction] | None = None
    expect: str | None = None
    frame: list[list[Fraction]] | None = None
    original: LieAlgebra | None = None
    errors: list[str] = field(default_factory=list)


_EXPECT = {"grading", "filtration", "sigma", "unresolved", "none"}


def parse_records(text: str, subst: dict | None = None, source: str = "<input>") -> list[AlgebraRecord]:
    """Parse a classification file; errors carry ``source:line``."""
    records = []
    pending: dict = {}
    names = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if line.startswith("!"):
                key, _, rest = line[1:].partition(" ")
                rest = rest.strip()
                if key in pending:
                    raise ParseError(f"duplicate directive !{key}")
                if key == "params":
                    pending["params"] = rest
                elif key in ("frame", "torus", "sequence", "filtration", "sigma"):
                    pending[key] = rest
                elif key == "expect":
                    if rest not in _EXPECT:
                        raise ParseError(f"unknown outcome {rest!r}")
                    pending["expect"] = "unresolved" if rest == "none" else rest
                else:
                    raise ParseError(f"unknown directive !{key}")
                continue
            records.append(_build_record(line, lineno, pending, subst or {}, names))
            pending = {}
        except (ParseError, ValueError) as exc:
            raise ParseError(f"{source}:{lineno}: {exc}") from exc
    if pending:
        raise ParseError(f"{source}: directives after the last record")
    return records


def _split_name(line: str) -> tuple[str | None, str]:
    m = re.match(r"^([^,:^{}]+?)\s*:\s*(.*)$", line)
    if m and not re.fullmatch(r"\s*[-+]?\s*\d*\s*", m.group(1)):
        return m.group(1).strip(), m.group(2)
    return None, line


def _build_record(line: str, lineno: int, pending: dict, subst: dict, names: set) -> AlgebraRecord:
    name, body = _split_name(line)
    name = name or f"L{lineno}"
    if name in names:
        raise ParseError(f"duplicate record name {name!r}")
    names.add(name)
    params = dict(subst)
    declared = []
    for item in pending.get("params", "").replace(",", " ").split():
        if "=" in item:
            params.update(parse_subst([item]))
        else:
            declared.append(item.lstrip("\\"))
    L = parse_algebra(body, subst=params, declared=declared)
    rec = AlgebraRecord(name, L, lineno, body)
    if "frame" in pending:
        rec.frame = parse_frame(pending["frame"], L.n)
        rec.original = L
        rec.algebra = change_basis(L, rec.frame)
    n = L.n
    if "torus" in pending:
        rec.torus = parse_weights(pending["torus"])
        if len(rec.torus) != n:
            raise ParseError(f"torus lists {len(rec.torus)} weights, expected {n}")
    if "sequence" in pending:
        order, _, ws = pending["sequence"].partition(":")
        rec.sequence = parse_order(order, n)
        if ws.strip():
            rec.sequence_weights = parse_weights(ws)
            if len(rec.sequence_weights) != n:
                raise ParseError(f"sequence lists {len(rec.sequence_weights)} weights, expected {n}")
            if rec.torus is None:
                torus = [None] * n
                for p, i in enumerate(rec.sequence):
                    torus[i] = rec.sequence_weights[p]
                rec.torus = torus
    if "filtration" in pending:
        order, _, ws = pending["filtration"].partition(":")
        rec.filtration = (parse_order(order, n), tuple(parse_rationals(ws)))
        if len(rec.filtration[1]) != n:
            raise ParseError("filtration needs one weight per basis vector")
    if "sigma" in pending:
        sig, _, ps = pending["sigma"].partition(":")
        rec.sigma = sig.strip()
        if ps.strip():
            rec.sigma_params = parse_rationals(ps)
    rec.expect = pending.get("expect")
    return rec


def read_records(path: str, subst: dict | None = None) -> list[AlgebraRecord]:
    with open(path, encoding="utf-8") as fh:
        return parse_records(fh.read(), subst, source=path)



def fixture_names() -> list[str]:
    """Names of the classification files shipped with the package."""
    from importlib.resources import files

    return sorted(p.name for p in files(__package__).joinpath("data").iterdir() if p.name.endswith(".txt"))


def load_fixture(name: str, subst: dict | None = None) -> list[AlgebraRecord]:
    """Records of a shipped classification file such as ``"table1.txt"``."""
    from importlib.resources import files

    text = files(__package__).joinpath("data", name).read_text(encoding="utf-8")
    return parse_records(text, subst, source=name)
