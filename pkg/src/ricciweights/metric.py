"""Antidiagonal and sigma-diagonal metrics, isotropic basis adaptation and exact Ricci tensors.

Metrics are stored as symmetric matrices ``g[i][j] = g(e_i, e_j)`` in the
original basis.  A basis change is a matrix whose columns are the new
vectors; the antidiagonal metric ``sum E^p (x) E^(n-1-p)`` of the frame ``B``
is ``B^{-T} J B^{-1}``.

Two-forms pair through the inverse matrix ``g*`` by the determinant rule
``g(a^b, c^d) = g*(a,c) g*(b,d) - g*(a,d) g*(b,c)``, and endomorphisms by
``g(a (x) x, b (x) y) = g*(a,b) g(x,y)``.  With these conventions the
Ricci formula for nilpotent algebras needs no extra normalisation to agree
with the Levi-Civita computation.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

from .algebra import LieAlgebra, as_fraction, format_fraction, hat, is_nilpotent
from .exactlin.linalg import Matrix, det, identity, inverse, matmul, transpose

# ---------------------------------------------------------------------------
# Errors and small helpers
# ---------------------------------------------------------------------------


class DegenerateMetricError(ValueError):
    pass


class AdaptationError(ValueError):
    """The multiplicity hypotheses needed to make the two-form isotropic fail."""


class RicciMismatch(AssertionError):
    """The two Ricci computations disagree; this always indicates a bug."""


def _zero(n: int, m: int | None = None) -> Matrix:
    return [[Fraction(0)] * (n if m is None else m) for _ in range(n)]


def _frozen(M) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(as_fraction(x) for x in row) for row in M)


def _bilinear(M, u, v) -> Fraction:
    total = Fraction(0)
    for i, ui in enumerate(u):
        if ui:
            row = M[i]
            total += ui * sum((row[j] * vj for j, vj in enumerate(v) if vj), Fraction(0))
    return total


def _wsum(a, b):
    if isinstance(a, tuple):
        return tuple(x + y for x, y in zip(a, b))
    return a + b


# ---------------------------------------------------------------------------
# Two-forms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TwoForm:
    """``sum F_ij e^i ^ e^j`` over ``i < j``."""

    n: int
    coeffs: Mapping[tuple[int, int], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (i, j), c in dict(self.coeffs).items():
            c = as_fraction(c)
            if i == j:
                continue
            if i > j:
                i, j, c = j, i, -c
            clean[(i, j)] = clean.get((i, j), Fraction(0)) + c
        object.__setattr__(self, "coeffs", {k: v for k, v in sorted(clean.items()) if v})

    @classmethod
    def from_matrix(cls, M) -> "TwoForm":
        n = len(M)
        return cls(n, {(i, j): M[i][j] for i in range(n) for j in range(i + 1, n) if M[i][j]})

    @classmethod
    def differential(cls, L: LieAlgebra, k: int) -> "TwoForm":
        return cls(L.n, L.d(k))

    def matrix(self) -> Matrix:
        M = _zero(self.n)
        for (i, j), c in self.coeffs.items():
            M[i][j] = c
            M[j][i] = -c
        return M

    def __call__(self, u, v) -> Fraction:
        return _bilinear(self.matrix(), u, v)

    def pullback(self, B) -> "TwoForm":
        """Coefficients in the frame whose vectors are the columns of ``B``."""
        M = self.matrix()
        return TwoForm.from_matrix(matmul(transpose(B), matmul(M, B)))

    def is_zero(self) -> bool:
        return not self.coeffs

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        out = ""
        for (i, j), c in self.coeffs.items():
            mag = abs(c)
            body = ("" if mag == 1 else format_fraction(mag)) + f"e^{{{i + 1}{j + 1}}}"
            out += (body if c > 0 else "-" + body) if not out else (f"+{body}" if c > 0 else f"-{body}")
        return out


def pair_two_forms(ginv, F, G) -> Fraction:
    """``g(F, G)`` for antisymmetric matrices, i.e. ``1/2 sum F_ab (g* G g*)_ab``."""
    X = matmul(ginv, matmul(G, ginv))
    n = len(F)
    return sum((F[a][b] * X[a][b] for a in range(n) for b in range(n) if F[a][b]), Fraction(0)) / 2


def form_norm(g, F: TwoForm) -> Fraction:
    M = F.matrix()
    return pair_two_forms(inverse(g), M, M)


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MetricSpec:
    """A nondegenerate symmetric bilinear form and where it came from.

    ``kind`` is ``"antidiagonal"``, ``"sigma"`` or ``"explicit"``.  For
    antidiagonal metrics ``basis`` holds the adapted frame (columns) and
    ``order`` the basis permutation it refines; sigma-diagonal metrics keep
    the involution and the parameters.
    """

    g: tuple[tuple[Fraction, ...], ...]
    kind: str = "explicit"
    order: tuple[int, ...] | None = None
    basis: tuple[tuple[Fraction, ...], ...] | None = None
    sigma: tuple[int, ...] | None = None
    params: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        g = _frozen(self.g)
        n = len(g)
        if any(len(row) != n for row in g):
            raise ValueError("metric must be a square matrix")
        for i in range(n):
            for j in range(i + 1, n):
                if g[i][j] != g[j][i]:
                    raise ValueError(f"metric is not symmetric at ({i + 1},{j + 1})")
        if det(g) == 0:
            raise DegenerateMetricError("metric is degenerate")
        object.__setattr__(self, "g", g)

    @property
    def n(self) -> int:
        return len(self.g)

    def matrix(self) -> Matrix:
        return [list(row) for row in self.g]

    def inverse(self) -> Matrix:
        return inverse(self.g)

    def signature(self) -> tuple[int, int]:
        return signature(self.g)

    def index(self) -> int:
        p, q = self.signature()
        return p - q

    def human(self) -> str:
        return format_metric(self.g)

    def to_json(self) -> list[list[str]]:
        return [[format_fraction(x) for x in row] for row in self.g]

    @classmethod
    def from_json(cls, rows) -> "MetricSpec":
        return cls(tuple(tuple(Fraction(x) for x in row) for row in rows))


def format_metric(g) -> str:
    """``e^1⊙e^3+e^2⊗e^2`` style, with ``e^i⊙e^j = e^i⊗e^j + e^j⊗e^i``."""
    n = len(g)
    sep = "," if n >= 10 else ""
    terms = []
    for i in range(n):
        for j in range(i, n):
            c = as_fraction(g[i][j])
            if not c:
                continue
            body = f"e^{i + 1}⊗e^{j + 1}" if i == j else f"e^{i + 1}⊙e^{j + 1}"
            if sep:
                body = body.replace("^", "^{", 1)
            mag = abs(c)
            coef = "" if mag == 1 else format_fraction(mag)
            sign = "-" if c < 0 else "+"
            terms.append((sign, coef + body))
    if not terms:
        return "0"
    out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, body in terms[1:]:
        out += sign + body
    return out


def signature(g) -> tuple[int, int]:
    """``(p, q)`` by symmetric Gaussian elimination (congruence)."""
    A = [list(map(as_fraction, row)) for row in g]
    n = len(A)
    p = q = 0
    active = list(range(n))
    while active:
        piv = next((i for i in active if A[i][i] != 0), None)
        if piv is None:
            pair = next(((i, j) for i in active for j in active if i != j and A[i][j] != 0), None)
            if pair is None:
                break  # the rest is zero
            i, j = pair
            # replace e_i by e_i + e_j: A[i][i] becomes 2 A[i][j] != 0
            for k in range(n):
                A[i][k] += A[j][k]
            for k in range(n):
                A[k][i] += A[k][j]
            piv = i
        d = A[piv][piv]
        if d > 0:
            p += 1
        else:
            q += 1
        active.remove(piv)
        for r in active:
            f = A[r][piv] / d
            if f:
                for c in range(n):
                    A[r][c] -= f * A[piv][c]
        for r in active:
            A[piv][r] = A[r][piv] = Fraction(0)
    return p, q


def antidiagonal(n: int) -> Matrix:
    return [[Fraction(int(i + j == n - 1)) for j in range(n)] for i in range(n)]


def metric_from_frame(B) -> Matrix:
    """``g`` in the old basis such that the columns of ``B`` are antidiagonal."""
    Binv = inverse(B)
    return matmul(transpose(Binv), matmul(antidiagonal(len(B)), Binv))


# ---------------------------------------------------------------------------
# Isotropic adaptation
# ---------------------------------------------------------------------------


def _biorthogonalize(us: list[list[Fraction]], ws: list[list[Fraction]], F: Matrix):
    """New bases of span(us), span(ws) with ``F(u_a, w_b) = delta_ab`` for ``a, b < r``.

    Returns ``(us', ws', r)``; the remaining vectors pair to zero with everything.
    """
    us = [list(u) for u in us]
    ws = [list(w) for w in ws]
    out_u, out_w = [], []
    while True:
        hit = None
        for a, u in enumerate(us):
            for b, w in enumerate(ws):
                c = _bilinear(F, u, w)
                if c:
                    hit = (a, b, c)
                    break
            if hit:
                break
        if hit is None:
            break
        a, b, c = hit
        u0 = us.pop(a)
        w0 = [x / c for x in ws.pop(b)]
        us = [[x - _bilinear(F, u, w0) * y for x, y in zip(u, u0)] for u in us]
        ws = [[x - _bilinear(F, u0, w) * y for x, y in zip(w, w0)] for w in ws]
        out_u.append(u0)
        out_w.append(w0)
    r = len(out_u)
    return out_u + us, out_w + ws, r


def _darboux(vs: list[list[Fraction]], F: Matrix):
    """Split ``span(vs)`` into pairs ``(x_a, y_a)`` with ``F(x_a, y_a) = 1`` and a kernel."""
    vs = [list(v) for v in vs]
    xs, ys = [], []
    while True:
        hit = None
        for a in range(len(vs)):
            for b in range(a + 1, len(vs)):
                c = _bilinear(F, vs[a], vs[b])
                if c:
                    hit = (a, b, c)
                    break
            if hit:
                break
        if hit is None:
            break
        a, b, c = hit
        x = vs[a]
        y = [t / c for t in vs[b]]
        rest = [v for k, v in enumerate(vs) if k not in (a, b)]
        vs = []
        for v in rest:
            fy, fx = _bilinear(F, v, y), _bilinear(F, v, x)
            vs.append([vi - fy * xi + fx * yi for vi, xi, yi in zip(v, x, y)])
        xs.append(x)
        ys.append(y)
    return xs, ys, vs


def canonical_split_form(k: int, r: int) -> Matrix:
    """Target ``N`` of rank ``r`` with ``Tr(N^2) = 0``, as a k x k matrix."""
    T = _zero(k)
    if r >= 3:
        for a in range(r):
            T[a][(a + 1) % r] = Fraction(1)
    elif r == 2:
        T[0][0], T[0][1], T[1][0], T[1][1] = Fraction(1), Fraction(-1), Fraction(1), Fraction(1)
    elif r == 1:
        if k < 2:
            raise AdaptationError("rank one pairing on one-dimensional spaces cannot be made isotropic")
        T[0][1] = Fraction(1)
    return T


def _split_pairing(us, ws, F: Matrix):
    """Bases ``u``, ``w`` (same length) of ``span(us)``, ``span(ws)`` with ``Tr(N^2) = 0``.

    ``N[a][b] = F(u_a, w_b)``; the result realises the canonical form of
    rank ``r`` (cyclic, the 2x2 rotation-like block, or a single nilpotent
    entry).
    """
    k = len(us)
    if len(ws) != k:
        raise ValueError("both sides need the same dimension")
    u1, w1, r = _biorthogonalize(us, ws, F)
    T = canonical_split_form(k, r)
    # N = D_r Q with Q = [T_top; completion]; choose w_b = sum_c Q[c][b] w1_c
    Q = _zero(k)
    for a in range(r):
        Q[a] = list(T[a])
    if r == 1:
        Q[1][0] = Fraction(1)
        for a in range(2, k):
            Q[a][a] = Fraction(1)
    else:
        for a in range(r, k):
            Q[a][a] = Fraction(1)
    w = [[sum((Q[c][b] * w1[c][t] for c in range(k)), Fraction(0)) for t in range(len(w1[0]))] for b in range(k)]
    return u1, w, r


def isotropic_split_metric(F: TwoForm, dim_u: int | None = None):
    """Bases of ``U`` (first half of the coordinates) and ``W`` (second half) making ``F`` isotropic.

    ``F`` must lie in ``U* ^ W*``.  Pairing ``u_a`` with ``w_a`` gives a
    neutral metric on ``U + W`` for which ``U``, ``W`` and ``F`` are
    isotropic; the matrix ``N[a][b] = F(u_a, w_b)`` has ``Tr(N^2) = 0``.
    """
    n = F.n
    k = n // 2 if dim_u is None else dim_u
    if 2 * k != n or k < 1:
        raise ValueError("U and W must have the same positive dimension")
    for (i, j) in F.coeffs:
        if (i < k) == (j < k):
            raise ValueError(f"F has a component e^{{{i + 1}{j + 1}}} outside U*^W*")
    M = F.matrix()
    e = identity(n)
    us, ws, r = _split_pairing([e[i] for i in range(k)], [e[k + i] for i in range(k)], M)
    return us, ws


def split_pairing_matrix(us, ws, F: TwoForm) -> Matrix:
    M = F.matrix()
    return [[_bilinear(M, u, w) for w in ws] for u in us]


def trace_of_square(N) -> Fraction:
    k = len(N)
    return sum((N[a][b] * N[b][a] for a in range(k) for b in range(k)), Fraction(0))


def _isotropic_on_subspace(vs, F: Matrix):
    """Order a basis of ``span(vs)`` so ``F`` is isotropic for its antidiagonal metric."""
    k = len(vs)
    if k <= 1:
        return [list(v) for v in vs]
    if k == 2:
        if _bilinear(F, vs[0], vs[1]):
            raise AdaptationError("a two-dimensional space carries no antidiagonal metric isotropic for a nonzero F")
        return [list(v) for v in vs]
    xs, ys, zs = _darboux(vs, F)
    if k == 3:
        if xs:
            return [xs[0], ys[0], zs[0]]
        return [list(v) for v in vs]
    h = k // 2
    half = (len(zs) - k % 2) // 2
    U1 = xs + zs[:half]
    W1 = ys + zs[half:2 * half]
    mid = zs[2 * half:]
    u, w, _ = _split_pairing(U1, W1, F)
    assert len(u) == h and len(mid) == k % 2
    # positions 0..h-1 get u, the middle (odd k) a kernel vector, then w reversed
    return u + mid + list(reversed(w))


def adapt_basis_isotropic(weights: Sequence, F: TwoForm) -> Matrix:
    """Frame adapted to the layers of ``weights`` making ``F`` isotropic for the antidiagonal metric.

    ``weights[p]`` is the weight of position ``p`` (numbers or tuples) and
    ``F`` is given in the current basis, with components only in layer
    pairs whose weights add up to ``weights[-1]``.  The result ``B`` has the
    new vectors as columns; column ``p`` lies in the layer of ``weights[p]``.
    """
    n = len(weights)
    if F.n != n:
        raise ValueError("two-form and weight sequence have different dimensions")
    target = weights[-1]
    for (i, j) in F.coeffs:
        if _wsum(weights[i], weights[j]) != target:
            raise ValueError(f"F has a component e^{{{i + 1}{j + 1}}} whose weights do not add up to the top weight")
    M = F.matrix()
    e = identity(n)
    layers: dict = {}
    for p, w in enumerate(weights):
        layers.setdefault(w, []).append(p)
    cols: list[list[Fraction] | None] = [None] * n
    done = set()
    for alpha, P in layers.items():
        if alpha in done:
            continue
        beta = None
        for b in layers:
            if _wsum(alpha, b) == target:
                beta = b
        done.add(alpha)
        if beta is None:
            for p in P:
                cols[p] = e[p]
            continue
        done.add(beta)
        if beta == alpha:
            I = [p for p in P if weights[hat(p, n)] == alpha]
            J = [p for p in P if p not in I]
            vs = [e[p] for p in P]
            if len(I) == 2:
                if len(P) < 3:
                    raise AdaptationError(
                        f"positions {I[0] + 1},{I[1] + 1} need a layer of multiplicity greater than two"
                    )
                # a plane on which F vanishes: v0 and a vector F-orthogonal to it
                v0 = vs[0]
                a, b = _bilinear(M, v0, vs[1]), _bilinear(M, v0, vs[2])
                if a == 0:
                    v1 = vs[1]
                elif b == 0:
                    v1 = vs[2]
                else:
                    v1 = [x * b - y * a for x, y in zip(vs[1], vs[2])]
                U = [v0, v1]
            else:
                U = vs[: len(I)]
            basis_u = _isotropic_on_subspace(U, M)
            rest = _complete(basis_u, vs)
            for p, v in zip(I, basis_u):
                cols[p] = v
            for p, v in zip(J, rest):
                cols[p] = v
        else:
            Q = layers[beta]
            I = [p for p in P if weights[hat(p, n)] == beta]
            Ihat = [hat(p, n) for p in I]
            us, ws, r = _biorthogonalize([e[p] for p in P], [e[q] for q in Q], M)
            k = len(I)
            if k == 0:
                U, W, rest_u, rest_w = [], [], us, ws
            elif k == 1:
                pick = next(((a, b) for a in range(len(us)) for b in range(len(ws))
                             if not (a == b and a < r)), None)
                if pick is None:
                    raise AdaptationError(
                        f"positions {I[0] + 1},{Ihat[0] + 1}: neither weight has multiplicity at least two"
                    )
                a, b = pick
                U, W = [us[a]], [ws[b]]
                rest_u = [u for t, u in enumerate(us) if t != a]
                rest_w = [w for t, w in enumerate(ws) if t != b]
            else:
                U, W, _ = _split_pairing(us[:k], ws[:k], M)
                rest_u, rest_w = us[k:], ws[k:]
            for p, v in zip(I, U):
                cols[p] = v
            for p, v in zip(Ihat, W):
                cols[p] = v
            for p, v in zip([p for p in P if p not in I], rest_u):
                cols[p] = v
            for q, v in zip([q for q in Q if q not in Ihat], rest_w):
                cols[q] = v
    B = [[cols[p][r] for p in range(n)] for r in range(n)]
    if det(B) == 0:
        raise AssertionError("adapted frame is singular")
    Fn = F.pullback(B).matrix()
    if pair_two_forms(antidiagonal(n), Fn, Fn) != 0:
        raise AdaptationError("two-form is not isotropic in the adapted frame; the pairing hypotheses fail")
    return B


def _complete(basis: list[list[Fraction]], span: list[list[Fraction]]) -> list[list[Fraction]]:
    """Vectors of ``span`` extending ``basis`` to a basis of ``span(span)``."""
    from .exactlin.linalg import rank

    out = []
    current = [list(v) for v in basis]
    r = rank(current) if current else 0
    for v in span:
        trial = current + [list(v)]
        if rank(trial) > r:
            current = trial
            r += 1
            out.append(list(v))
    return out


# ---------------------------------------------------------------------------
# Metrics from gradings, filtrations and involutions
# ---------------------------------------------------------------------------


def _permutation_frame(order: Sequence[int]) -> Matrix:
    n = len(order)
    P = _zero(n)
    for p, i in enumerate(order):
        P[i][p] = Fraction(1)
    return P


def _metric_from_positions(L: LieAlgebra, order, weights, F: TwoForm) -> MetricSpec:
    Br = adapt_basis_isotropic(weights, F)
    B = matmul(_permutation_frame(order), Br)
    return MetricSpec(metric_from_frame(B), kind="antidiagonal", order=tuple(order), basis=_frozen(B))


def build_grading_metric(L: LieAlgebra, G, S) -> MetricSpec:
    """Ricci-flat antidiagonal metric from a weight sequence satisfying (G1)-(G5)."""
    from .filtration import reorder
    from .grading import check_G_sequence

    chk = check_G_sequence(G, S)
    if not chk:
        raise ValueError(f"weight sequence does not satisfy the conditions: {chk.describe()}")
    Lr = reorder(L, S.order)
    F = TwoForm.differential(Lr, L.n - 1)
    return _metric_from_positions(L, S.order, list(S.weights), F)


def top_component(Lr: LieAlgebra, weights: Sequence) -> TwoForm:
    """Part of ``de^n`` in the layer pairs whose weights add up to ``w_n``."""
    n = Lr.n
    t = weights[-1]
    return TwoForm(n, {(i, j): c for (i, j), c in Lr.d(n - 1).items() if _wsum(weights[i], weights[j]) == t})


def pi_projection(Lr: LieAlgebra, weights: Sequence) -> TwoForm:
    """Keep ``e^{ij}`` in ``de^n`` iff ``w_j = w_ihat`` (in either orientation of the pair)."""
    n = Lr.n
    keep = {}
    for (i, j), c in Lr.d(n - 1).items():
        if weights[j] == weights[hat(i, n)] or weights[i] == weights[hat(j, n)]:
            keep[(i, j)] = c
    return TwoForm(n, keep)


def build_filtration_metric(L: LieAlgebra, W) -> MetricSpec:
    """Ricci-flat antidiagonal metric from a filtration satisfying (F1)-(F4)."""
    from .filtration import check_F_assignment, reorder

    chk = check_F_assignment(L, W.order, W.weights)
    if not chk:
        raise ValueError(f"filtration does not satisfy the conditions: {chk.describe()}")
    Lr = reorder(L, W.order)
    weights = [Fraction(w) for w in W.weights]
    F = top_component(Lr, weights)
    return _metric_from_positions(L, W.order, weights, F)


def parse_sigma(text: str, n: int) -> tuple[int, ...]:
    """``"18 35"`` or ``"(1,8)(3,5)"`` -> 0-based involution of ``range(n)``."""
    import re

    text = text.strip()
    pairs = []
    if "(" in text:
        for grp in re.findall(r"\(([^)]*)\)", text):
            pairs.append([int(x) for x in re.split(r"[\s,]+", grp.strip()) if x])
    else:
        for tok in text.replace(",", " ").split():
            if not tok.isdigit():
                raise ValueError(f"bad transposition {tok!r}")
            pairs.append([int(c) for c in tok])
    sigma = list(range(n))
    seen = set()
    for cyc in pairs:
        if len(cyc) != 2:
            raise ValueError(f"sigma must be a product of transpositions, got cycle {cyc}")
        a, b = cyc[0] - 1, cyc[1] - 1
        if not (0 <= a < n and 0 <= b < n) or a == b or a in seen or b in seen:
            raise ValueError(f"bad transposition ({a + 1} {b + 1})")
        seen.update((a, b))
        sigma[a], sigma[b] = b, a
    return tuple(sigma)


def sigma_diagonal_metric(n: int, sigma, params: Sequence[object]) -> MetricSpec:
    """``sum g_i e^i (x) e^sigma(i)`` for an involution ``sigma``."""
    if isinstance(sigma, str):
        sigma = parse_sigma(sigma, n)
    sigma = tuple(sigma)
    if sorted(sigma) != list(range(n)):
        raise ValueError("sigma must be a permutation of the basis")
    for i in range(n):
        if sigma[sigma[i]] != i:
            raise ValueError("sigma is not of order two")
    gs = tuple(as_fraction(x) for x in params)
    if len(gs) != n:
        raise ValueError(f"expected {n} parameters")
    for i in range(n):
        if gs[i] == 0:
            raise ValueError(f"g_{i + 1} is zero")
        if gs[i] != gs[sigma[i]]:
            raise ValueError(f"g_{i + 1} != g_{sigma[i] + 1}")
    g = _zero(n)
    for i in range(n):
        g[i][sigma[i]] = gs[i]
    return MetricSpec(g, kind="sigma", sigma=sigma, params=gs)


def sigma_orbits(sigma: Sequence[int]) -> list[tuple[int, ...]]:
    out = []
    for i in range(len(sigma)):
        if i <= sigma[i]:
            out.append((i,) if sigma[i] == i else (i, sigma[i]))
    return out


def random_rational(rng: random.Random) -> Fraction:
    """Nonzero rational with numerator and denominator in [1, 1000] and random sign."""
    x = Fraction(rng.randint(1, 1000), rng.randint(1, 1000))
    return x if rng.random() < 0.5 else -x


def random_sigma_params(sigma: Sequence[int], rng: random.Random) -> list[Fraction]:
    gs = [Fraction(0)] * len(sigma)
    for orb in sigma_orbits(sigma):
        v = random_rational(rng)
        for i in orb:
            gs[i] = v
    return gs


# ---------------------------------------------------------------------------
# Ricci tensors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RicciReport:
    ric: tuple[tuple[Fraction, ...], ...]
    method: str

    @property
    def is_flat(self) -> bool:
        return all(x == 0 for row in self.ric for x in row)


@lru_cache(maxsize=256)
def _nilpotent(L: LieAlgebra) -> bool:
    return is_nilpotent(L)


def _metric_matrix(g) -> Matrix:
    if isinstance(g, MetricSpec):
        return g.matrix()
    M = [list(map(as_fraction, row)) for row in g]
    if det(M) == 0:
        raise DegenerateMetricError("metric is degenerate")
    return M


def _ad(L: LieAlgebra, v: int) -> Matrix:
    n = L.n
    A = _zero(n)
    for x in range(n):
        for k, c in L.bracket_sparse(v, x).items():
            A[k][x] = c
    return A


def ricci_formula(L: LieAlgebra, g) -> RicciReport:
    """``ric(v,w) = 1/2 g(dv_flat, dw_flat) - 1/2 g(ad v, ad w)`` on basis vectors."""
    if not _nilpotent(L):
        raise ValueError("the Ricci formula used here needs a nilpotent algebra")
    G = _metric_matrix(g)
    n = L.n
    Gi = inverse(G)
    diffs = [TwoForm.differential(L, k).matrix() for k in range(n)]
    # d(v_flat) for v = e_a
    D = []
    for a in range(n):
        M = _zero(n)
        for k in range(n):
            c = G[a][k]
            if c:
                for i in range(n):
                    for j in range(n):
                        if diffs[k][i][j]:
                            M[i][j] += c * diffs[k][i][j]
        D.append(M)
    DX = [matmul(Gi, matmul(M, Gi)) for M in D]
    A = [_ad(L, a) for a in range(n)]
    AY = [matmul(G, matmul(M, Gi)) for M in A]
    ric = _zero(n)
    for a in range(n):
        for b in range(a, n):
            s = Fraction(0)
            Da, Xb = D[a], DX[b]
            for i in range(n):
                for j in range(n):
                    if Da[i][j] and Xb[i][j]:
                        s += Da[i][j] * Xb[i][j]
            s /= 2  # pairing of two-forms
            t = Fraction(0)
            Aa, Yb = A[a], AY[b]
            for k in range(n):
                for m in range(n):
                    if Aa[k][m] and Yb[k][m]:
                        t += Aa[k][m] * Yb[k][m]
            ric[a][b] = ric[b][a] = s / 2 - t / 2
    return RicciReport(_frozen(ric), "formula")


def ricci_koszul(L: LieAlgebra, g) -> RicciReport:
    """Ricci tensor of the left-invariant metric through the Levi-Civita connection."""
    G = _metric_matrix(g)
    n = L.n
    Gi = inverse(G)
    br = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            for k, c in L.bracket_sparse(i, j).items():
                br[i][j][k] = c
    # gb[i][j][k] = g([e_i, e_j], e_k)
    gb = [[[sum((br[i][j][m] * G[m][k] for m in range(n) if br[i][j][m]), Fraction(0)) for k in range(n)]
           for j in range(n)] for i in range(n)]
    # N[i][l][j] = component l of nabla_{e_i} e_j
    N = [_zero(n) for _ in range(n)]
    for i in range(n):
        for j in range(n):
            C = [(gb[i][j][k] - gb[j][k][i] + gb[k][i][j]) / 2 for k in range(n)]
            if not any(C):
                continue
            for l in range(n):
                N[i][l][j] = sum((Gi[l][k] * C[k] for k in range(n) if C[k]), Fraction(0))
    ric = _zero(n)
    for b in range(n):
        for c in range(n):
            s = Fraction(0)
            for a in range(n):
                Na, Nb = N[a], N[b]
                for m in range(n):
                    if Na[a][m] and Nb[m][c]:
                        s += Na[a][m] * Nb[m][c]
                    if Nb[a][m] and Na[m][c]:
                        s -= Nb[a][m] * Na[m][c]
                for d in range(n):
                    if br[a][b][d] and N[d][a][c]:
                        s -= br[a][b][d] * N[d][a][c]
            ric[b][c] = s
    return RicciReport(_frozen(ric), "koszul")


@dataclass(frozen=True)
class Verdict:
    flat: bool
    mode: str
    samples: int = 1
    detail: str = ""
    formula_zero: bool = False
    koszul_zero: bool = False
    failing_params: tuple[Fraction, ...] | None = None

    def __bool__(self) -> bool:
        return self.flat

    def describe(self) -> str:
        if self.mode == "generic":
            state = "generically flat (probabilistic)" if self.flat else "not flat"
            return f"{state}, {self.samples} samples"
        return "Ricci-flat" if self.flat else "not Ricci-flat"


def compare_ricci(L: LieAlgebra, g) -> tuple[RicciReport, RicciReport]:
    """Both Ricci tensors; raise :class:`RicciMismatch` if they differ."""
    a = ricci_formula(L, g)
    b = ricci_koszul(L, g)
    if a.ric != b.ric:
        bad = next((i, j) for i in range(L.n) for j in range(L.n) if a.ric[i][j] != b.ric[i][j])
        raise RicciMismatch(
            f"Ricci formula and Levi-Civita disagree at ({bad[0] + 1},{bad[1] + 1}): "
            f"{a.ric[bad[0]][bad[1]]} != {b.ric[bad[0]][bad[1]]}"
        )
    return a, b


def verify_ricci_flat(L: LieAlgebra, g, mode: str = "exact", samples: int = 5, seed: int | None = None) -> Verdict:
    """Exact check of one metric, or random sampling of a sigma-diagonal family."""
    if mode == "exact":
        a, b = compare_ricci(L, g)
        return Verdict(a.is_flat and b.is_flat, "exact", 1, formula_zero=a.is_flat, koszul_zero=b.is_flat)
    if mode != "generic":
        raise ValueError(f"unknown mode {mode!r}")
    if not isinstance(g, MetricSpec) or g.kind != "sigma":
        raise ValueError("generic verification needs a sigma-diagonal metric")
    rng = random.Random(seed)
    for _ in range(samples):
        params = random_sigma_params(g.sigma, rng)
        spec = sigma_diagonal_metric(g.n, g.sigma, params)
        a, b = compare_ricci(L, spec)
        if not (a.is_flat and b.is_flat):
            return Verdict(False, "generic", samples, "nonzero Ricci at sampled parameters",
                           a.is_flat, b.is_flat, tuple(params))
    return Verdict(True, "generic", samples, formula_zero=True, koszul_zero=True)


# ---------------------------------------------------------------------------
# Isotropy checks used by tests and reports
# ---------------------------------------------------------------------------


def ad_isotropic(L: LieAlgebra, g) -> bool:
    G = _metric_matrix(g)
    Gi = inverse(G)
    A = [_ad(L, a) for a in range(L.n)]
    for a in range(L.n):
        Y = matmul(G, matmul(A[a], Gi))
        for b in range(L.n):
            s = sum((A[b][k][m] * Y[k][m] for k in range(L.n) for m in range(L.n)), Fraction(0))
            if s:
                return False
    return True


def dual_differentials_isotropic(L: LieAlgebra, g) -> bool:
    """All ``g(dx, dy)`` vanish for ``x, y`` in the dual space."""
    G = _metric_matrix(g)
    Gi = inverse(G)
    D = [TwoForm.differential(L, k).matrix() for k in range(L.n)]
    return all(pair_two_forms(Gi, D[i], D[j]) == 0 for i in range(L.n) for j in range(i, L.n))
