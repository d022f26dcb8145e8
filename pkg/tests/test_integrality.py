import itertools
from fractions import Fraction

import numpy as np
import pytest

from heckeint.corpus import delta, eisenstein
from heckeint.exact import CapExceeded, charpoly, mat_mul
from heckeint.fourier import HalfIntMat, QExpansion, trivial_chi
from heckeint.hecke import apply_T
from heckeint.integrality import (
    DependentBasisError,
    F_b,
    F_b0_printed,
    InstabilityError,
    certify,
    certify_basis,
    check_Fb,
    check_weight_exponent,
    count_E,
    fingerprint,
    hecke_matrix,
    injective_truncation,
    saturate,
    scan_Fb,
    scan_weight_exponent,
    weight_margins,
)


def basis():
    return [eisenstein(12, 12), delta(12)]


def T2(f):
    return apply_T(f, 2, theta_out=5)


def test_machine_of_int_example():
    b = basis()
    assert injective_truncation(b) == 2
    C = hecke_matrix(b, T2)
    assert C == ((2049, 0), (0, -24))
    cert = certify_basis(b, T2, params=(("op", "T(2)"),))
    assert str(cert.charpoly) == "X^2 - 2025X - 49176"
    assert cert.verdict and cert.witness is None
    text = cert.render()
    assert text.startswith("CERTIFICATE 1\nop: T(2)\n")
    assert "charpoly: X^2 - 2025X - 49176" in text
    assert text.endswith("INTEGRAL: yes\n")
    assert cert.render() == certify_basis(basis(), T2, params=(("op", "T(2)"),)).render()


def test_non_integral_certificate_has_witness():
    cert = certify(((Fraction(1, 2),),))
    assert not cert.verdict
    assert cert.witness == (1,)
    assert cert.render().endswith("INTEGRAL: no\n")
    swap = certify(((0, 1), (1, 0)))
    assert swap.verdict and str(swap.charpoly) == "X^2 - 1"


def test_saturation():
    rows = [[2, 4, 6], [Fraction(1, 2), 0, Fraction(1, 2)]]
    P, L = saturate(rows)
    # L spans the same Q-space, is integral and primitive (its SNF is all ones)
    assert all(Fraction(x).denominator == 1 for r in L for x in r)
    assert mat_mul(P, tuple(tuple(Fraction(x) for x in r) for r in rows)) == tuple(tuple(Fraction(x) for x in r) for r in L)
    minors = {abs(L[0][i] * L[1][j] - L[0][j] * L[1][i]) for i, j in itertools.combinations(range(3), 2)}
    from math import gcd

    g = 0
    for m in minors:
        g = gcd(g, int(m))
    assert g == 1


def test_saturation_changes_verdict():
    # op(f1) = f2 / 2 ... is non-integral on the standard basis but the basis rows
    # span a lattice on which the operator is integral
    rows = [[2, 0], [0, 1]]
    C = ((0, Fraction(1, 2)), (2, 0))  # f1 -> f2 / 2, f2 -> 2 f1
    assert certify(C).witness is not None
    cert = certify(C, rows)
    assert cert.verdict


def test_dependent_basis():
    e = eisenstein(12, 6)
    twice = e.replace(coeffs={t: (2 * v[0],) for t, v in e.coeffs.items()})
    with pytest.raises(DependentBasisError) as exc:
        injective_truncation([e, twice])
    v = exc.value.vector
    assert v[0] != 0 and v[0] + 2 * v[1] == 0


def test_instability():
    d = delta(12)
    # a non-eigen perturbation: the span of one series is not T(2)-stable
    bad = d.replace(coeffs={t: (v[0] + (1 if t.key[0] == 4 else 0),) for t, v in d.coeffs.items()})
    with pytest.raises(InstabilityError):
        hecke_matrix([bad], T2)


def test_fingerprint_is_stable():
    assert fingerprint([[1, 2], [3, 4]]) == fingerprint(((1, 2), (3, 4)))
    assert fingerprint([[1, 2]]) != fingerprint([[2, 1]])


# ---------------------------------------------------------------------------
# inequality scans


def test_F_b_values():
    assert F_b(2, 2, 0, 0) == 2 * 2 * 2 - 6
    assert F_b(3, 2, 0, 1) == -2
    # the printed closed form exceeds F_b(0) by b - k_n
    for n, kn, b in itertools.product(range(1, 6), range(0, 8), range(0, 6)):
        assert F_b0_printed(n, kn, b) - F_b(n, kn, 0, b) == b - kn


def test_scans_clean():
    r = scan_Fb(6, 12)
    assert r.ok and r.checked > 1000
    assert r.notes  # the F_b(0) expression mismatch is recorded, not a violation
    w = scan_weight_exponent(6, 12)
    assert w.ok


def test_Fb_minimum_bound():
    for n in range(1, 7):
        for kn in range(0, n + 1):
            floor = -(n - kn) * (n - kn + 1)
            assert min(F_b(n, kn, a, b) for b in range(n + 1) for a in range(n - b + 1)) >= -n * (n - kn + 1)
            assert check_Fb(n, kn).ok
            assert floor <= 0


def test_weight_margins_and_operators():
    assert weight_margins((6, 4, 2)) == [4, 3, 2]
    for n, k in ((1, (1,)), (1, (4,)), (2, (4, 4)), (2, (3, 1)), (2, (2, 2)), (2, (1, 1)), (3, (2, 2, 2))):
        assert check_weight_exponent(n, k).ok, k
    with pytest.raises(ValueError):
        check_weight_exponent(2, (4,))


# ---------------------------------------------------------------------------
# E(M, d)


def _brute_quadratic(M):
    n = 0
    for b in range(-2 * M, 2 * M + 1):
        for c in range(-M * M, M * M + 1):
            disc = b * b - 4 * c
            if disc >= 0 and int(disc**0.5) ** 2 == disc:
                continue
            if all(abs(r) <= M + 1e-9 for r in np.roots([1, b, c])):
                n += 1
    return n


@pytest.mark.parametrize("M", [1, 2, 3, 5])
def test_count_E_quadratic_against_numeric(M):
    count, bound = count_E(M, 2)
    assert count == 2 * M + 1 + 2 * _brute_quadratic(M)
    assert bound == (16 * M) ** 4 and count <= bound


def test_count_E_examples():
    assert count_E(1, 1) == (3, 16)
    assert count_E(2, 1) == (5, 32)
    assert count_E(1, 2)[0] == 9


def test_count_E_roots_of_unity():
    # Kronecker: for M = 1 these are 0 and roots of unity of degree <= d
    assert count_E(1, 3)[0] == 9
    assert count_E(1, 4)[0] == 25


def test_count_E_errors():
    with pytest.raises(ValueError):
        count_E(0, 1)
    with pytest.raises(CapExceeded):
        count_E(5, 4, cap=1000)
