from fractions import Fraction
from itertools import product

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from ricciweights.algebra import parse_algebra
from ricciweights.exactlin import (
    EQ,
    GE,
    GT,
    ConstraintSystem,
    SingularMatrixError,
    check_certificate,
    derivation_space,
    det,
    diagonal_derivations,
    fm_feasible,
    integerize,
    inverse,
    is_derivation,
    kernel_basis,
    matmul,
    rank,
    rank_normal_form,
    rref,
    solve,
    torus_from_weights,
)
from ricciweights.exactlin.linalg import identity, matvec

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=4)


def matrices(max_rows=5, max_cols=5):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(rationals, min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


def square(max_n=5):
    return st.integers(1, max_n).flatmap(
        lambda n: st.lists(st.lists(rationals, min_size=n, max_size=n), min_size=n, max_size=n)
    )


def to_sympy(M):
    return sp.Matrix([[sp.Rational(x.numerator, x.denominator) for x in row] for row in M])


def from_sympy(x):
    return Fraction(int(x.p), int(x.q))


@given(matrices())
def test_rank_and_rref_match_sympy(M):
    S = to_sympy(M)
    assert rank(M) == S.rank()
    R, piv = rref(M)
    SR, spiv = S.rref()
    assert piv == list(spiv)
    assert [[from_sympy(x) for x in SR.row(i)] for i in range(SR.rows)] == R


@given(matrices())
def test_kernel_is_kernel_with_right_dimension(M):
    K = kernel_basis(M)
    assert len(K) == len(M[0]) - to_sympy(M).rank()
    for v in K:
        assert not any(matvec(M, v))
    if K:
        assert rank(K) == len(K)


@given(square())
def test_det_and_inverse_match_sympy(M):
    S = to_sympy(M)
    d = det(M)
    assert d == from_sympy(S.det())
    if d == 0:
        with pytest.raises(SingularMatrixError):
            inverse(M)
    else:
        Minv = inverse(M)
        assert matmul(M, Minv) == identity(len(M))
        assert Minv == [[from_sympy(x) for x in S.inv().row(i)] for i in range(S.rows)]


@given(matrices(), st.data())
def test_solve(M, data):
    b = data.draw(st.lists(rationals, min_size=len(M), max_size=len(M)))
    x = solve(M, b)
    consistent = to_sympy(M).rank() == to_sympy([row + [bi] for row, bi in zip(M, b)]).rank()
    assert (x is not None) == consistent
    if x is not None:
        assert matvec(M, x) == b


@given(matrices())
def test_rank_normal_form(M):
    X, Y, r = rank_normal_form(M)
    P = matmul(matmul(X, M), Y)
    assert r == rank(M)
    assert P == [[Fraction(int(i == j and i < r)) for j in range(len(M[0]))] for i in range(len(M))]
    assert det(X) != 0 and det(Y) != 0


def test_integerize():
    assert integerize([Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)]) == [1, 2, 3]
    assert integerize([Fraction(2, 5), Fraction(4, 5)]) == [1, 2]
    assert integerize([Fraction(-1, 3), Fraction(2, 3)]) == [-1, 2]


# ---------------------------------------------------------------------------
# Derivations
# ---------------------------------------------------------------------------

def _sympy_derivation_dim(L):
    n = L.n
    D = sp.Matrix(n, n, sp.symbols(f"d0:{n * n}"))
    C = {}
    for i in range(n):
        for j in range(n):
            C[i, j] = sp.Matrix([sp.Rational(c.numerator, c.denominator) if (c := L.bracket_sparse(i, j).get(k)) else 0
                                 for k in range(n)])
    eqs = []
    e = [sp.Matrix([int(r == s) for r in range(n)]) for s in range(n)]

    def br(x, y):
        return sum((x[a] * y[b] * C[a, b] for a in range(n) for b in range(n)), sp.zeros(n, 1))

    for i in range(n):
        for j in range(i + 1, n):
            eqs.extend(D * C[i, j] - br(D * e[i], e[j]) - br(e[i], D * e[j]))
    A, _ = sp.linear_eq_to_matrix([q for q in eqs if q != 0], list(D))
    return n * n - A.rank()


@pytest.mark.parametrize("text,dim", [
    ("0,0,e^{12},e^{13},e^{23},e^{25}+e^{14}", 10),
    ("0,0,e^{12}", None),
    ("0,0,e^{12},e^{13}", None),
    ("0,0,0,e^{12},e^{14},e^{15}+e^{23}+e^{24}", None),
    ("0,0,e^{12},e^{13},e^{14}+e^{23}", None),
])
def test_derivation_dimension_against_sympy(text, dim):
    L = parse_algebra(text)
    D = derivation_space(L)
    assert D.dim == _sympy_derivation_dim(L)
    if dim is not None:
        assert D.dim == dim
    for M in D.matrices():
        assert is_derivation(L, M)


def test_diagonal_torus_examples():
    T = diagonal_derivations(parse_algebra("0,0,e^{12},e^{13},e^{23},e^{25}+e^{14}"))
    assert T.rank == 1
    assert integerize([w[0] for w in T.weight_rows]) == [1, 1, 2, 3, 3, 4]
    T = diagonal_derivations(parse_algebra("0,0,0,e^{12},e^{14},e^{15}+e^{23}+e^{24}"))
    assert T.rank == 1
    assert integerize([w[0] for w in T.weight_rows]) == [1, 2, 3, 3, 4, 5]
    T = diagonal_derivations(parse_algebra("0,0,e^{12}"))
    assert T.rank == 2 and not T.inconsistencies(parse_algebra("0,0,e^{12}"))


@given(st.sampled_from([
    "0,0,e^{12},e^{13},e^{23},e^{25}+e^{14}",
    "0,0,0,e^{12},e^{14},e^{15}+e^{23}+e^{24}",
    "0,0,e^{12},e^{13},e^{14}+e^{23}",
    "0,0,0,e^{12},e^{13},e^{23}",
]), st.data())
def test_diagonal_torus_generators_are_derivations(text, data):
    L = parse_algebra(text)
    T = diagonal_derivations(L)
    coeffs = [data.draw(rationals) for _ in range(T.rank)]
    D = [[sum((c * Gm[r][s] for c, Gm in zip(coeffs, T.generators())), Fraction(0)) for s in range(L.n)]
         for r in range(L.n)]
    assert is_derivation(L, D)
    # the torus is all of the diagonal derivations: compare with a sympy nullspace
    x = sp.symbols(f"x0:{L.n}")
    eqs = [x[i] + x[j] - x[k] for i, j, k, _ in L.structure_triples()]
    A = sp.linear_eq_to_matrix(eqs, x)[0] if eqs else sp.zeros(1, L.n)
    assert T.rank == len(A.nullspace())


def test_torus_from_weights_rejects_inconsistent():
    L = parse_algebra("0,0,e^{12}")
    torus_from_weights(L, [[1], [2], [3]])
    with pytest.raises(ValueError):
        torus_from_weights(L, [[1], [2], [4]])


# ---------------------------------------------------------------------------
# Fourier-Motzkin
# ---------------------------------------------------------------------------

def _grid_feasible(system, lo=-4, hi=4, den=2):
    pts = [Fraction(k, den) for k in range(lo * den, hi * den + 1)]
    return any(system.satisfied_by(list(p)) for p in product(pts, repeat=system.nvars))


@st.composite
def systems(draw):
    m = draw(st.integers(1, 2))
    S = ConstraintSystem(m)
    for _ in range(draw(st.integers(1, 5))):
        coeffs = [Fraction(draw(st.integers(-2, 2))) for _ in range(m)]
        rel = draw(st.sampled_from([GE, GT, EQ, GE]))
        S.add(coeffs, rel, Fraction(draw(st.integers(-3, 3))))
    # keep the feasible region bounded so a grid search is a complete oracle
    for v in range(m):
        S.add_sparse({v: 1}, GE, -3)
        S.add_sparse({v: -1}, GE, -3)
    return S


@settings(max_examples=150)
@given(systems())
def test_fm_witness_or_certificate(S):
    res = fm_feasible(S)
    if res:
        assert S.satisfied_by(res.witness)
    else:
        assert check_certificate(S, res)
        # small integer data: vertices of the region have denominators dividing 8
        assert not _grid_feasible(S, den=8, lo=-3, hi=3)


@settings(max_examples=150)
@given(systems())
def test_fm_agrees_with_grid_when_grid_finds_a_point(S):
    if _grid_feasible(S, lo=-3, hi=3, den=2):
        assert fm_feasible(S)


def test_fm_strict_versus_nonstrict():
    S = ConstraintSystem(1)
    S.add([1], GE, 0)
    S.add([-1], GE, 0)
    assert fm_feasible(S).witness == [0]
    T = ConstraintSystem(1)
    T.add([1], GT, 0)
    T.add([-1], GE, 0)
    res = fm_feasible(T)
    assert not res and check_certificate(T, res)


def test_fm_equalities():
    S = ConstraintSystem(3)
    S.add([1, 1, -1], EQ, 0)
    S.add([1, 0, 0], GT, 0)
    S.add([0, 1, -1], GT, -1)
    S.add([0, 0, 1], GE, 5)
    res = fm_feasible(S)
    assert res and S.satisfied_by(res.witness)
    S.add([1, 0, 0], GE, 10)
    S.add([0, 1, 0], GE, 0)
    S.add([0, 0, -1], GE, -9)
    res = fm_feasible(S)
    assert not res and check_certificate(S, res)
