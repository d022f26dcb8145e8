import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heckeint.corpus import delta
from heckeint.exact import hnf
from heckeint.hecke import apply_T, eigen_ratio
from heckeint.hilbert import (
    HilbertParseError,
    IdealCoeffMap,
    MissingIdealsError,
    QuadField,
    _hnf2,
    certify_maps,
    classical_rule,
    commute_check,
    format_map,
    hecke_prime,
    ideal_arith,
    parse_map,
    random_map,
)

Q5 = QuadField(5)
Q = QuadField(1)


vecs = st.lists(st.tuples(st.integers(-30, 30), st.integers(-30, 30)), min_size=2, max_size=5)


@given(vecs)
@settings(max_examples=300, deadline=None)
def test_hnf2_matches_general_hnf(vs):
    c, b, a = _hnf2(vs)
    h, _ = hnf(tuple((y, x) for x, y in vs))
    nz = [r for r in h if any(r)]
    if len(nz) == 2 and nz[0][0] and nz[1][1]:
        assert (c, b, a) == (nz[0][0], nz[0][1], nz[1][1])


def test_field_basics():
    assert Q5.disc == 5 and QuadField(3).disc == 12 and QuadField(2).degree == 2
    for bad in (0, 4, 12):
        with pytest.raises(ValueError):
            QuadField(bad)


def test_spec_examples():
    two = Q5.principal(2)
    assert two.norm == 4
    assert Q5.primes_above(2) == [two]  # inert
    r5 = Q5.principal(-1, 2)  # sqrt 5 = 2w - 1
    assert r5.norm == 5
    assert Q5.mul(r5, r5) == Q5.principal(5)
    assert Q5.divisors_of_sum(two, Q5.principal(3)) == [Q5.unit()]
    assert ideal_arith(Q5, two, None, "norm") == 4
    assert ideal_arith(Q5, two, Q5.principal(4), "divides")


def test_hnf_validation():
    with pytest.raises(ValueError):
        Q5.ideal(2, 0, 1)  # not closed under w
    with pytest.raises(ValueError):
        Q5.ideal(4, 5, 1)
    assert Q5.ideal(2, 0, 2) == Q5.principal(2)
    with pytest.raises(ValueError):
        Q5.mul(Q5.unit(), QuadField(2).unit())


@pytest.mark.parametrize("d", [2, 3, 5, 13, 1])
def test_splitting(d):
    F = QuadField(d)
    for p in (2, 3, 5, 7, 11, 13):
        ps = F.primes_above(p)
        prod = F.unit()
        for P in ps:
            prod = F.mul(prod, P)
        if F.degree == 2 and len(ps) == 1 and ps[0].norm == p:
            prod = F.mul(prod, ps[0])  # ramified: p = P^2
        assert prod == F.principal(p)
        assert all(F.is_prime(P) for P in ps)


ideals5 = Q5.ideals_up_to(60)


@given(st.sampled_from(ideals5), st.sampled_from(ideals5), st.sampled_from(ideals5))
@settings(max_examples=200, deadline=None)
def test_ideal_arithmetic_laws(a, b, c):
    F = Q5
    assert F.mul(a, b) == F.mul(b, a)
    assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
    assert F.mul(a, b).norm == a.norm * b.norm
    assert F.div(F.mul(a, b), b) == a
    assert F.contains(a, F.mul(a, b))
    assert F.mul(a, F.conj(a)) == F.principal(a.norm)
    s = F.add(a, b)
    assert F.contains(s, a) and F.contains(s, b)


def test_ideal_counts_and_divisors():
    # the Dedekind zeta of Q(sqrt 5) has a_n = sum_{d | n} (d / 5)
    def a(n):
        t = 0
        for d in range(1, n + 1):
            if n % d == 0:
                r = d % 5
                t += 0 if r == 0 else (1 if r in (1, 4) else -1)
        return t

    ideals = Q5.ideals_up_to(200)
    for n in range(1, 201):
        assert sum(1 for I in ideals if I.norm == n) == a(n)
    I = Q5.principal(12)
    divs = Q5.divisors(I)
    assert all(Q5.contains(D, I) for D in divs)
    assert len(divs) == len({D for D in Q5.ideals_up_to(144) if Q5.contains(D, I)})


def test_classical_example():
    C = IdealCoeffMap(Q, 2, {Q.ideal(1): 1, Q.ideal(2): 5, Q.ideal(4): 9})
    out = hecke_prime(C, Q.ideal(2), [Q.ideal(2)])
    assert out.coeffs == {Q.ideal(2): 11}
    out = hecke_prime(C, Q.ideal(2), [Q.ideal(1)])
    assert out.coeffs == {Q.ideal(1): 5}


def test_matches_classical_rule():
    rng = random.Random(5)
    for k0 in (1, 2, 5, 12):
        C = random_map(Q, 700, k0, rng)
        plain = {I.a: v for I, v in C.coeffs.items()}
        for p in (2, 3, 5, 7):
            out = hecke_prime(C, Q.ideal(p), [Q.ideal(m) for m in range(1, 101)])
            for m in range(1, 101):
                assert out.coeffs[Q.ideal(m)] == classical_rule(plain, m, p, k0)


def test_delta_agrees_with_siegel_engine():
    d = delta(80)
    C = IdealCoeffMap(Q, 12, {Q.ideal(m): d.scalar_series()[m] for m in range(1, 81)})
    engine = eigen_ratio(d, apply_T(d, 2, theta_out=40))
    out = hecke_prime(C, Q.ideal(2), [Q.ideal(m) for m in range(1, 41)])
    assert all(out.coeffs[Q.ideal(m)] == engine * C.coeffs[Q.ideal(m)] for m in range(1, 41))


def test_errors():
    C = IdealCoeffMap(Q, 2, {Q.ideal(1): 1})
    with pytest.raises(MissingIdealsError) as exc:
        hecke_prime(C, Q.ideal(2), [Q.ideal(2)])
    assert exc.value.missing == [Q.ideal(4)]
    with pytest.raises(ValueError):
        hecke_prime(C, Q.ideal(4))
    lev = IdealCoeffMap(Q, 2, {Q.ideal(1): 1}, level=Q.ideal(6))
    with pytest.raises(ValueError):
        hecke_prime(lev, Q.ideal(3))


def test_commute_rational():
    rng = random.Random(1)
    ideals = [Q.ideal(2**i * 3**j) for i in range(4) for j in range(4)]
    C = IdealCoeffMap(Q, 3, {I: rng.randint(-99, 99) for I in ideals})
    support = [Q.ideal(2**i * 3**j) for i in range(3) for j in range(3)]
    assert commute_check(C, Q.ideal(2), Q.ideal(3), support)
    assert commute_check(C, Q.ideal(2), Q.ideal(2), support)
    with pytest.raises(MissingIdealsError):
        commute_check(C, Q.ideal(2), Q.ideal(5), support)


def test_commute_quadratic():
    rng = random.Random(2)
    p5 = Q5.primes_above(5)[0]
    two = Q5.principal(2)
    p11a, p11b = Q5.primes_above(11)
    support = Q5.ideals_up_to(100)
    C = random_map(Q5, 100 * 121, 2, rng)
    for p, q in ((p5, two), (p5, p11a), (p11a, p11b), (two, p11b)):
        assert commute_check(C, p, q, support)


def _sigma_map(F, bound, k0, psi=lambda I: 1):
    out = {}
    for I in F.ideals_up_to(bound):
        out[I] = psi(I) * sum(D.norm ** (k0 - 1) for D in F.divisors(I))
    return IdealCoeffMap(F, k0, out)


def test_eisenstein_like_maps_are_eigen_and_certified():
    F = Q5
    legendre3 = lambda I: (0, 1, -1)[I.norm % 3]
    sig = _sigma_map(F, 500, 2)
    tw = _sigma_map(F, 500, 2, legendre3)
    p11 = F.primes_above(11)[0]
    support = F.ideals_up_to(40)
    out = hecke_prime(sig, p11, support)
    assert all(out.coeffs[m] == 12 * sig.coeffs[m] for m in support)
    cert = certify_maps([sig, tw], p11, support)
    assert cert.verdict
    assert str(cert.charpoly) == "X^2 - 144"  # eigenvalues 12 and -12


def test_integer_maps_stay_integral():
    rng = random.Random(3)
    C = random_map(Q5, 400, 4, rng)
    out = hecke_prime(C, Q5.principal(2), Q5.ideals_up_to(100))
    assert all(isinstance(v, int) for v in out.coeffs.values())


def test_file_round_trip():
    rng = random.Random(4)
    C = random_map(Q5, 30, 2, rng)
    text = format_map(C)
    assert text.startswith("HILBERT 1\nd=5 k0=2 chi=trivial\n1 0 1 : ")
    assert parse_map(text).coeffs == C.coeffs
    assert format_map(parse_map(text)) == text


@pytest.mark.parametrize(
    "text,line",
    [
        ("HILBERT 2\n", 1),
        ("HILBERT 1\nd=5 k0=2\n", 2),
        ("HILBERT 1\nd=4 k0=2 chi=trivial\n", 2),
        ("HILBERT 1\nd=5 k0=2 chi=trivial\n2 0 1 : 3\n", 3),
        ("HILBERT 1\nd=5 k0=2 chi=trivial\n1 0 1 3\n", 3),
        ("HILBERT 1\nd=5 k0=2 chi=trivial\n1 0 1 : 3\n1 0 1 : 4\n", 4),
    ],
)
def test_parse_errors(text, line):
    with pytest.raises(HilbertParseError) as exc:
        parse_map(text)
    assert exc.value.line == line
