import itertools
from fractions import Fraction
from math import prod

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heckeint.characters import all_characters
from heckeint.corpus import delta, eisenstein, sigma, theta_e8
from heckeint.exact import CycInt, det
from heckeint.fourier import HalfIntMat, MissingIndicesError, QExpansion, enumerate_indices, trivial_chi
from heckeint.hecke import (
    G_ab,
    G_j,
    TorusAction,
    apply_T,
    apply_Tj,
    d_ab,
    d_j,
    eigen_ratio,
    exp_sum,
    gauss_brute,
    gauss_closed,
    gauss_literal_disagrees,
    gauss_rank_filtered,
    gauss_rank_filtered_brute,
    lattice_preserved,
    needed_indices,
    norm_factor,
    ord_p,
    project_char,
)

# ---------------------------------------------------------------------------
# Gauss sums


def test_exp_sum():
    assert exp_sum([Fraction(k, 5) for k in range(5)]) == 0
    assert exp_sum([0, 0, Fraction(1, 2)]) == 1
    with pytest.raises(ArithmeticError):
        exp_sum([Fraction(1, 4)])


DIVS = [d for d in range(1, 145) if 144 % d == 0]
PAIRS = [(a, c) for a in DIVS for c in DIVS if 144 % (a * c) == 0]


def _dmat(x):
    (a, c), b, k = x
    # [[a, b], [0, c]] times a unimodular [[1, 0], [k, 1]] on the right
    return ((a + b * k, b), (c * k, c))


sym = st.tuples(st.integers(-6, 6), st.integers(-6, 6), st.integers(-6, 6))
dmat = st.tuples(st.sampled_from(PAIRS), st.integers(-6, 6), st.integers(-3, 3)).map(_dmat)


@given(sym, dmat)
@settings(max_examples=500, deadline=None)
def test_gauss_closed_equals_brute(s, D):
    g = ((2 * s[0], s[1]), (s[1], 2 * s[2]))
    c = gauss_closed(g, D)
    b = gauss_brute(g, D)
    assert c.value == b.value
    d = c.snf_divisors
    assert c.value in (0, prod(d[j] ** (2 - j) for j in range(2)))


@pytest.mark.parametrize("m", [1, 2, 3, 4, 6, 8, 9, 12])
def test_gauss_degree_one(m):
    for g in range(-10, 11, 2):
        want = m if (g // 2) % m == 0 else 0
        assert gauss_closed(((g,),), ((m,),)).value == want == gauss_brute(((g,),), ((m,),)).value


def test_gauss_literal_reading_differs_somewhere():
    # the stronger 'd_nu | s_mu,nu' reading disagrees with the exact sum on some pairs
    D = ((1, 0), (0, 2))
    g = ((2, 1), (1, 4))
    assert gauss_closed(g, D).value == gauss_brute(g, D).value == 2
    found = any(
        gauss_literal_disagrees(((2 * a, b), (b, 2 * c)), ((2, 0), (0, 4)))
        for a, b, c in itertools.product(range(3), range(-3, 4), range(3))
    )
    assert found


# ---------------------------------------------------------------------------
# rank-filtered sums


@pytest.mark.parametrize("n,p", [(1, 2), (1, 3), (2, 2), (2, 3)])
def test_rank_filtered_matches_brute(n, p):
    for t in enumerate_indices(n, 3):
        for a in range(n + 1):
            for b in range(n + 1 - a):
                d = d_ab(n, a, b, p)
                for j in range(n + 1):
                    assert gauss_rank_filtered(t, d, p, j) == gauss_rank_filtered_brute(t, d, p, j)


def test_rank_filtered_matches_brute_degree_three():
    p = 2
    for t in enumerate_indices(3, 1):
        for d in ((1, 2, 4), (2, 2, 4), (4, 4, 2)):
            for j in range(4):
                assert gauss_rank_filtered(t, d, p, j) == gauss_rank_filtered_brute(t, d, p, j)


@pytest.mark.parametrize("n,p", [(2, 2), (2, 3), (3, 2)])
def test_valuation_bounds(n, p):
    for t in enumerate_indices(n, 3 if n == 3 else 4):
        for a in range(n + 1):
            for b in range(n + 1 - a):
                for j in range(n + 1):
                    assert ord_p(G_ab(t, n, a, b, p, j), p) >= b * (a + b + 1)
        for j in range(n):
            assert G_j(t, n, j, p) in (0, p ** (j * (n + 1)))


def test_d_shapes():
    assert d_ab(3, 1, 1, 2) == (1, 2, 4)
    assert d_j(2, 1, 3) == (9, 3)
    with pytest.raises(ValueError):
        d_ab(2, 2, 1, 2)
    assert ord_p(0, 2) == float("inf") and ord_p(12, 2) == 2


# ---------------------------------------------------------------------------
# operators


@pytest.mark.parametrize("k", [4, 6, 8, 10, 12, 14])
@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_eisenstein_eigenvalues(k, p):
    f = eisenstein(k, 30 * p)
    g = apply_T(f, p, theta_out=30)
    assert eigen_ratio(f, g) == 1 + p ** (k - 1)


def test_eisenstein_prime_power():
    f = eisenstein(4, 40)
    g = apply_T(f, 2, delta=2, theta_out=10)
    # T(4) = T(2)^2 - 2^(k-1) on level one
    assert eigen_ratio(f, g) == 9 * 9 - 8


def test_delta_eigenvalues():
    d = delta(100)
    assert eigen_ratio(d, apply_T(d, 2, theta_out=40)) == -24
    assert eigen_ratio(d, apply_T(d, 3, theta_out=30)) == 252
    assert eigen_ratio(d, apply_T(d, 5, theta_out=20)) == 4830


def _level_form(k, N, chi, theta):
    """sum_{d | m} chi(d) d^(k-1) q^m with zero constant term."""
    coeffs = {HalfIntMat((0,), 1): (0,)}
    for m in range(1, theta + 1):
        coeffs[HalfIntMat((2 * m,), 1)] = (sum((chi(d) * d ** (k - 1) for d in range(1, m + 1) if m % d == 0), 0),)
    return QExpansion(1, N, (k,), (chi,), "Z", coeffs)


def test_level_and_character():
    chi4 = [c for c in all_characters(4) if not c.is_trivial()][0]
    f = _level_form(3, 4, chi4, 60)
    assert eigen_ratio(f, apply_T(f, 3, theta_out=20)) == 1 - 9
    assert eigen_ratio(f, apply_T(f, 5, theta_out=12)) == 1 + 25
    triv = trivial_chi(1, 3)[0]
    e = _level_form(4, 3, triv, 40)
    assert eigen_ratio(e, apply_T(e, 2, theta_out=20)) == 9
    with pytest.raises(ValueError):
        apply_T(e, 3)


def test_seed_does_not_change_output():
    chi4 = [c for c in all_characters(4) if not c.is_trivial()][0]
    f = _level_form(3, 4, chi4, 60)
    base = apply_T(f, 3, theta_out=20)
    for seed in (1, 2, 99):
        assert apply_T(f, 3, theta_out=20, seed=seed) == base


def test_theta_degree_two_eigenvalues():
    targets = enumerate_indices(2, 2)
    need = set(targets)
    need |= needed_indices(targets, 2, 1, None, 1, "class")
    need |= needed_indices(targets, 2, 1, 0, 1, "class")
    need |= needed_indices(targets, 2, 1, 1, 1, "class")
    f = theta_e8(2, sorted(need))
    # Siegel Eisenstein series of weight 4: (1 + p^(k-1)) (1 + p^(k-2))
    assert eigen_ratio(f, apply_T(f, 2, theta_out=2)) == 45
    # T_0(p^2) is the scalar p 1_4: p^(2(2k-3)) p^(-2k) = p^(2k-6)
    assert eigen_ratio(f, apply_Tj(f, 0, 2, theta_out=2)) == 4
    assert eigen_ratio(f, apply_Tj(f, 1, 2, theta_out=2)) == 210
    g = apply_T(f, 2, theta_out=2, seed=5)
    assert g == apply_T(f, 2, theta_out=2)


def test_missing_indices():
    f = eisenstein(4, 5)
    with pytest.raises(MissingIndicesError) as exc:
        apply_T(f, 2, theta_out=5)
    assert [t.key[0] for t in exc.value.missing] == [12, 16, 20]


def test_empty_input():
    f = eisenstein(4, 3).replace(coeffs={})
    assert apply_T(f, 2).coeffs == {}


def test_norm_factor():
    assert norm_factor(3, 1, "T") == 3
    assert norm_factor(3, 1, "T", delta=2) == 6
    assert norm_factor(2, 4, "T") == 0
    assert norm_factor(2, 2, "Tj") == 2
    assert norm_factor(2, 3, "Tj") == 0
    with pytest.raises(ValueError):
        norm_factor(2, 2, "X")


def test_lattice_preserved():
    f = eisenstein(4, 10)
    half = f.replace(coeffs={t: (Fraction(v[0], 2),) for t, v in f.coeffs.items()}, ring="Q")
    assert lattice_preserved(f, half, 2, 1)
    assert not lattice_preserved(f, half, 3, 1)
    assert lattice_preserved(half, f, 2, 0)


# ---------------------------------------------------------------------------
# character projection


def _graded_action(N, psis, indices):
    """gamma acts on the coefficient at T by psi_T(gamma)."""
    from heckeint.characters import units

    table = {}
    for g in itertools.product(units(N), repeat=1):
        table[g] = {t: (t, psis[t](g[0])) for t in indices}
    return TorusAction(N, 1, table)


def test_project_char():
    N = 5
    chars = all_characters(N)
    idx = [HalfIntMat((2 * m,), 1) for m in range(1, 9)]
    psis = {t: chars[i % len(chars)] for i, t in enumerate(idx)}
    action = _graded_action(N, psis, idx)
    f = QExpansion(1, N, (4,), trivial_chi(1, N), "Z", {t: (i + 1,) for i, t in enumerate(idx)})
    total = {t: 0 for t in idx}
    for c in chars:
        pf = project_char(f, (c,), action)
        assert project_char(pf, (c,), action).coeffs == pf.coeffs
        for t in idx:
            v = pf.coeffs[t][0]
            expect = f.coeffs[t][0] if psis[t] == c else 0
            assert v == expect
            total[t] = total[t] + v
    assert total == {t: f.coeffs[t][0] for t in idx}


def test_torus_action_validation():
    idx = [HalfIntMat((2,), 1)]
    with pytest.raises(ValueError):
        TorusAction(3, 1, {(1,): {idx[0]: (idx[0], 1)}})
    with pytest.raises(ValueError):
        TorusAction(3, 1, {(1,): {idx[0]: (idx[0], 1)}, (2,): {idx[0]: (idx[0], 2)}})
    act = TorusAction.trivial(3, 1, idx)
    f = QExpansion(1, 3, (4,), trivial_chi(1, 3), "Z", {idx[0]: (7,)})
    assert project_char(f, trivial_chi(1, 3), act).coeffs == f.coeffs
