from fractions import Fraction
from itertools import permutations

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from ricciweights.algebra import (
    LieAlgebra,
    ParseError,
    bracket,
    change_basis,
    hat,
    is_nice_basis,
    is_nilpotent,
    jacobi_check,
    jacobi_sum,
    lower_central_series_dims,
    parse_algebra,
    serialize,
)
from ricciweights.records import load_fixture

HEIS = "0,0,e^{12}"
EX6 = "0,0,e^{12},e^{13},e^{23},e^{25}+e^{14}"


def test_parse_basic():
    L = parse_algebra(HEIS)
    assert L.n == 3
    assert L.d(2) == {(0, 1): Fraction(1)}
    # [e_1, e_2] = -e_3 with d alpha(x, y) = -alpha([x, y])
    assert bracket(L, 0, 1) == [0, 0, -1]
    assert bracket(L, 1, 0) == [0, 0, 1]


def test_parse_spacing_signs_and_fractions():
    L = parse_algebra(r"0,0,- e^{12},\frac{3}{2} e^{13}-\frac12 e^{12}")
    assert L.d(2) == {(0, 1): -1}
    assert L.d(3) == {(0, 1): Fraction(-1, 2), (0, 2): Fraction(3, 2)}


def test_parse_reversed_wedge_flips_sign():
    assert parse_algebra("0,0,e^{21}").d(2) == {(0, 1): -1}


def test_parse_parameters():
    L = parse_algebra(r"0,0,e^{12},0,e^{13},e^{23}+e^{24},e^{15}+\lambda e^{26}", subst={"lambda": 3})
    assert L.d(6)[(1, 5)] == 3
    L2 = parse_algebra(r"0,0,0,e^{12},e^{23},-e^{13},(-e^{16}+e^{25}) \lambda+2 e^{26}-2 e^{34}", declared=["lambda"])
    assert L2.d(6) == {(0, 5): -2, (1, 4): 2, (1, 5): 2, (2, 3): -2}
    assert L2.params == {"lambda": 2}


def test_parse_errors_carry_position():
    with pytest.raises(ParseError) as exc:
        parse_algebra("0,0,e^{1x}")
    assert exc.value.pos is not None
    with pytest.raises(ParseError):
        parse_algebra("0,0,e^{11}")
    with pytest.raises(ParseError):
        parse_algebra("0,0,e^{14}")
    with pytest.raises(ParseError):
        parse_algebra(r"0,0,\mu e^{12}")


def test_serialize_round_trip_fixtures():
    for name in ("table1.txt", "table2.txt", "exceptions.txt", "small.txt"):
        for rec in load_fixture(name):
            assert parse_algebra(serialize(rec.algebra)) == rec.algebra


@st.composite
def algebras(draw, max_n=7):
    """Random (possibly non-Lie) structure constants, strictly upper triangular."""
    n = draw(st.integers(1, max_n))
    diff = []
    for k in range(n):
        terms = {}
        for i in range(k):
            for j in range(i + 1, k):
                if draw(st.integers(0, 4)) == 0:
                    terms[(i, j)] = Fraction(draw(st.integers(-3, 3)), draw(st.integers(1, 3)))
        diff.append(terms)
    return LieAlgebra(n, diff)


@given(algebras())
def test_serialize_parse_property(L):
    assert parse_algebra(serialize(L)) == L


@given(algebras())
def test_upper_triangular_is_nilpotent(L):
    # e^k only involves e^i, e^j with i, j < k: always nilpotent (when Lie)
    assert lower_central_series_dims(L)[-1] == 0


def test_hat():
    assert [hat(i, 5) for i in range(5)] == [4, 3, 2, 1, 0]
    assert hat(2, 6) == 3


def _sympy_jacobi(L):
    """d(de^k) = 0 computed with sympy exterior algebra on explicit coordinates."""
    n = L.n
    out = []
    for i, j, k in [(a, b, c) for a in range(n) for b in range(n) for c in range(n)]:
        e = [sp.Matrix([1 if r == s else 0 for r in range(n)]) for s in range(n)]

        def br(x, y):
            v = sp.zeros(n, 1)
            for a in range(n):
                for b in range(n):
                    if x[a] and y[b]:
                        for m, c in L.bracket_sparse(a, b).items():
                            v[m] += x[a] * y[b] * sp.Rational(c.numerator, c.denominator)
            return v

        s = br(br(e[i], e[j]), e[k]) + br(br(e[j], e[k]), e[i]) + br(br(e[k], e[i]), e[j])
        if any(s):
            out.append((i, j, k))
    return out


@pytest.mark.parametrize("text,ok", [
    (HEIS, True),
    (EX6, True),
    ("0,0,e^{12},e^{13},e^{14}+e^{23}", True),
    ("0,0,e^{12},e^{13},e^{14},e^{34}+e^{25}", False),
    ("0,0,e^{12},e^{13},e^{23}", True),
    ("0,0,0,e^{12},e^{14}+e^{23}+e^{13}", True),
    ("0,0,e^{12},e^{13},e^{24}", False),
])
def test_jacobi_against_sympy(text, ok):
    L = parse_algebra(text)
    assert (not jacobi_check(L)) == ok
    assert (not _sympy_jacobi(L)) == ok
    assert all(not any(jacobi_sum(L, a, b, c)) for a in range(L.n) for b in range(L.n) for c in range(L.n)) == ok


def test_lower_central_series():
    assert lower_central_series_dims(parse_algebra(EX6)) == [6, 4, 3, 1, 0]
    assert lower_central_series_dims(parse_algebra("0,0,0,e^{12},e^{14},e^{15}+e^{23}+e^{24}")) == [6, 3, 2, 1, 0]
    assert not is_nilpotent(parse_algebra("0,0,e^{13}"))


def test_nice_basis():
    assert is_nice_basis(parse_algebra(EX6)).is_nice
    report = is_nice_basis(parse_algebra("0,0,0,e^{12},e^{14},e^{15}+e^{23}+e^{24}"))
    assert not report.is_nice and report.violations


def test_change_basis_permutation_matches_relabeling():
    L = parse_algebra(EX6)
    for perm in list(permutations(range(6)))[::97]:
        M = [[Fraction(int(perm[c] == r)) for c in range(6)] for r in range(6)]
        L2 = change_basis(L, M)
        for i in range(6):
            for j in range(6):
                for k in range(6):
                    assert L2.coefficient(k, i, j) == L.coefficient(perm[k], perm[i], perm[j])


def test_change_basis_scaling_and_inverse():
    L = parse_algebra(EX6)
    M = [[Fraction(int(r == c)) * (r + 1) for c in range(6)] for r in range(6)]
    M[0][1] = Fraction(1, 2)
    L2 = change_basis(L, M)
    assert not jacobi_check(L2)
    from ricciweights.exactlin.linalg import inverse

    assert change_basis(L2, inverse(M)) == L


def test_appendix_frames_give_nice_forms():
    expected = {
        "A6-1": "0,0,e^{12},e^{13},e^{23},e^{15}+e^{24}",
        "A6-2": "0,0,0,e^{12},e^{13},e^{25}+e^{34}",
        "247F": "0,0,0,e^{12},e^{13},e^{24},e^{35}",
        "247G": "0,0,0,e^{12},e^{13},e^{24},e^{14}+e^{35}",
        "257J1": "0,0,e^{12},0,0,2e^{13}+e^{14}+e^{25},e^{15}+2e^{23}-e^{24}",
        "2457L": "0,0,e^{12},e^{13},e^{23},e^{14},e^{25}",
    }
    recs = {r.name: r for r in load_fixture("appendix.txt")}
    for name, text in expected.items():
        assert recs[name].algebra == parse_algebra(text), name


def test_algebra_hashable_and_picklable():
    import pickle

    L = parse_algebra(EX6)
    assert pickle.loads(pickle.dumps(L)) == L
    assert len({L, parse_algebra(EX6)}) == 1


@settings(max_examples=30)
@given(st.integers(2, 5), st.data())
def test_change_basis_preserves_jacobi(n, data):
    L = parse_algebra(["0,0", "0,0,e^{12}", "0,0,e^{12},e^{13}", "0,0,e^{12},e^{13},e^{14}+e^{23}"][n - 2])
    n = L.n
    M = [[Fraction(data.draw(st.integers(-2, 2))) for _ in range(n)] for _ in range(n)]
    from ricciweights.exactlin.linalg import det

    if det(M) == 0:
        return
    assert not jacobi_check(change_basis(L, M))
