from fractions import Fraction
from math import prod

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heckeint.exact import (
    CycInt,
    MonicPoly,
    SingularMatrixError,
    charpoly,
    cyclotomic_polynomial,
    det,
    elementary_divisors,
    euler_phi,
    hnf,
    identity,
    inverse,
    is_integral,
    mat_mul,
    nullspace,
    rank,
    rank_mod_p,
    snf,
)

small = st.integers(-6, 6)


def square(n):
    return st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n).map(
        lambda r: tuple(tuple(x) for x in r)
    )


@given(st.integers(1, 3).flatmap(square))
@settings(max_examples=150, deadline=None)
def test_snf_is_a_smith_form(a):
    if det(a) == 0:
        with pytest.raises(SingularMatrixError):
            snf(a)
        return
    u, s, v = snf(a)
    assert mat_mul(mat_mul(u, a), v) == s
    assert abs(det(u)) == 1 and abs(det(v)) == 1
    d = [s[i][i] for i in range(len(s))]
    assert all(x > 0 for x in d)
    assert all(d[i + 1] % d[i] == 0 for i in range(len(d) - 1))
    assert all(s[i][j] == 0 for i in range(len(s)) for j in range(len(s)) if i != j)
    assert abs(det(a)) == prod(d)


def test_elementary_divisors_known():
    assert elementary_divisors(((2, 0), (0, 4))) == (2, 4)
    assert elementary_divisors(((2, 0), (0, 3))) == (1, 6)
    assert elementary_divisors(((4, 6), (6, 4))) == (2, 10)


@given(st.integers(1, 3).flatmap(square))
@settings(max_examples=150, deadline=None)
def test_hnf_row_lattice(a):
    h, u = hnf(a)
    assert mat_mul(u, a) == h
    assert abs(det(u)) == 1
    # same row lattice: the HNF of the HNF is itself
    assert hnf(h)[0] == h


def test_hnf_reduces_above_pivots():
    h, _ = hnf(((2, 5), (0, 3)))
    assert h == ((2, 2), (0, 3))


@given(st.integers(1, 4).flatmap(square))
@settings(max_examples=100, deadline=None)
def test_cayley_hamilton(a):
    p = charpoly(a)
    assert p.degree == len(a) and p.monic
    zero = tuple(tuple(0 for _ in r) for r in a)
    assert p.evaluate_matrix(a) == zero


def test_charpoly_example():
    p = charpoly(((2049, 0), (0, -24)))
    assert str(p) == "X^2 - 2025X - 49176"
    assert is_integral(p)
    assert not is_integral(charpoly(((Fraction(1, 2),),)))


@given(st.integers(1, 3).flatmap(square))
@settings(max_examples=100, deadline=None)
def test_inverse_and_rank(a):
    r = rank(a)
    if det(a) == 0:
        assert r < len(a)
        for v in nullspace(a):
            assert all(sum(x * y for x, y in zip(row, v)) == 0 for row in a)
    else:
        assert r == len(a)
        assert mat_mul(a, inverse(a)) == identity(len(a))


def test_rank_mod_p():
    assert rank_mod_p(((2, 0), (0, 1)), 2) == 1
    assert rank_mod_p(((1, 1), (1, 1)), 3) == 1
    assert rank_mod_p(((3, 0), (0, 3)), 3) == 0


def test_cyclotomic_polynomials():
    assert cyclotomic_polynomial(1) == (-1, 1)
    assert cyclotomic_polynomial(4) == (1, 0, 1)
    assert cyclotomic_polynomial(6) == (1, -1, 1)
    assert [euler_phi(n) for n in (1, 2, 6, 12)] == [1, 1, 2, 4]


cyc = st.tuples(st.sampled_from([3, 4, 5, 8, 12]), st.lists(st.integers(-5, 5), min_size=12, max_size=12))


@given(cyc, st.lists(st.integers(-5, 5), min_size=12, max_size=12))
@settings(max_examples=100, deadline=None)
def test_cycint_field_axioms(a, bcoeffs):
    n, c = a
    x, y = CycInt(n, c), CycInt(n, bcoeffs)
    assert x + y == y + x and x * y == y * x
    assert (x + y) * x == x * x + y * x
    if not x.is_zero():
        assert x * x.inverse() == CycInt(n, [1])


def test_cycint_roots_of_unity():
    z = CycInt.zeta(12)
    one = CycInt(12, [1])
    acc = one
    for _ in range(12):
        acc = acc * z
    assert acc == one
    # sum of all 5th roots of unity vanishes
    assert CycInt.from_exponent_counts(5, {e: 1 for e in range(5)}).is_zero()
    # Gauss sum for p = 5: (sum e(x^2/5))^2 = 5
    g = CycInt.from_exponent_counts(5, _square_counts(5))
    assert (g * g).to_rational() == 5
    assert z.conj() * z == one
    assert z.is_integral() and not (z * Fraction(1, 2)).is_integral()


def _square_counts(p):
    c = {}
    for x in range(p):
        c[x * x % p] = c.get(x * x % p, 0) + 1
    return c


def test_monic_poly_format():
    assert str(MonicPoly((2, -3, 1))) == "X^2 - 3X + 2"
