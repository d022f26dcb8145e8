"""The acceptance suite: ten checks, each returning a CheckResult.

``run_all(fast=True)`` runs every check on reduced parameters.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .cosets import brute_cosets_oracle, coset_invariants, v_cosets
from .corpus import delta, eisenstein, theta_e8
from .fourier import HalfIntMat, enumerate_indices
from .hecke import (
    G_ab,
    G_j,
    apply_T,
    apply_Tj,
    eigen_ratio,
    gauss_brute,
    gauss_closed,
    lattice_preserved,
    needed_indices,
    norm_factor,
    ord_p,
)
from .hilbert import IdealCoeffMap, QuadField, classical_rule, commute_check, hecke_prime, random_map
from .integrality import (
    certify,
    certify_basis,
    count_E,
    hecke_matrix,
    injective_truncation,
    scan_Fb,
    scan_weight_exponent,
)


@dataclass
class CheckResult:
    number: int
    name: str
    ok: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'} {self.number:2d} {self.name}: {self.detail}"


@dataclass
class _Runs:
    """(input, output, p, exponent) for every operator application, for check 7."""
    items: list = field(default_factory=list)


RUNS = _Runs()


def _record(f, g, p, exponent):
    RUNS.items.append((f, g, p, exponent))
    return g


# ---------------------------------------------------------------------------


def check_classical(fast: bool = False) -> CheckResult:
    theta = 20 if fast else 50
    bad = []
    for k in (4, 6, 12):
        f = eisenstein(k, theta * 5)
        for p in (2, 3, 5):
            g = _record(f, apply_T(f, p, theta_out=theta), p, norm_factor(1, k, "T"))
            r = eigen_ratio(f, g)
            if r != 1 + p ** (k - 1):
                bad.append(f"E{k} T({p}) -> {r}")
    d = delta(theta * 3)
    for p, want in ((2, -24), (3, 252)):
        g = _record(d, apply_T(d, p, theta_out=theta), p, 0)
        r = eigen_ratio(d, g)
        if r != want:
            bad.append(f"Delta T({p}) -> {r}")
    return CheckResult(1, "classical reduction", not bad, "; ".join(bad) or f"E4,E6,E12,Delta exact on tr <= {theta}")


def check_cosets(fast: bool = False) -> CheckResult:
    bad = []
    total = 0
    for n, p, dl, N in itertools.product((1, 2), (2, 3), (1, 2), (1, 2, 3)):
        if N % p == 0 or (fast and n == 2 and dl == 2):
            continue
        reps = v_cosets(n, p, dl, N)
        inv = coset_invariants(reps)
        oracle = brute_cosets_oracle(n, p, dl, N)
        total += 1
        if len(set(inv)) != len(inv) or frozenset(inv) != oracle:
            bad.append(f"(n,p,d,N)=({n},{p},{dl},{N}): {len(reps)} vs {len(oracle)}")
    c1 = len(v_cosets(1, 2, 1, 1))
    c2 = len(v_cosets(2, 2, 1, 1))
    if (c1, c2) != (3, 15):
        bad.append(f"counts {c1}, {c2}")
    return CheckResult(2, "coset completeness", not bad, "; ".join(bad) or f"{total} systems equal the oracle")


def _hnf_matrices(n: int, det_: int):
    if n == 1:
        yield ((det_,),)
        return
    for a in range(1, det_ + 1):
        if det_ % a:
            continue
        c = det_ // a
        for b in range(c):
            yield ((a, b), (0, c))


def gauss_sweep(dets=(1, 2, 3, 4, 8, 9, 12), theta: int = 4):
    """Yield (S gram, D) over the exhaustive sweep, including non-PSD variants of S."""
    for n in (1, 2):
        grams = set()
        for t in enumerate_indices(n, theta):
            g = t.gram
            grams.add(g)
            grams.add(tuple(tuple(-x for x in r) for r in g))
            if n == 2:
                grams.add(((-g[0][0], g[0][1]), (g[1][0], g[1][1])))
                grams.add(((g[0][0], g[0][1]), (g[1][0], -g[1][1] - 2)))
        for dt in dets:
            for D in _hnf_matrices(n, dt):
                for g in sorted(grams):
                    yield g, D


def check_gauss(fast: bool = False) -> CheckResult:
    dets = (1, 2, 3, 4) if fast else (1, 2, 3, 4, 8, 9, 12)
    bad = []
    count = 0
    for g, D in gauss_sweep(dets):
        c = gauss_closed(g, D)
        b = gauss_brute(g, D)
        count += 1
        full = 1
        for j, d in enumerate(c.snf_divisors):
            full *= d ** (len(D) - j)
        if c.value != b.value or c.value not in (0, full):
            bad.append(f"S={g} D={D}: closed {c.value} brute {b.value}")
            if len(bad) > 5:
                break
    return CheckResult(3, "gauss-sum equivalence", not bad, "; ".join(bad) or f"{count} pairs agree")


def check_valuations(fast: bool = False) -> CheckResult:
    bad = []
    count = 0
    for n in ((2,) if fast else (2, 3)):
        idx = enumerate_indices(n, 4)
        for p in (2, 3):
            for t in idx:
                for a in range(n + 1):
                    for b in range(n + 1 - a):
                        for j in range(n + 1):
                            v = G_ab(t, n, a, b, p, j)
                            count += 1
                            if ord_p(v, p) < b * (a + b + 1):
                                bad.append(f"G_{a},{b} n={n} p={p} j={j} T={t.key}: {v}")
                for j in range(n):
                    v = G_j(t, n, j, p)
                    count += 1
                    if v not in (0, p ** (j * (n + 1))):
                        bad.append(f"G_{j} n={n} p={p} T={t.key}: {v}")
    return CheckResult(4, "valuation bounds", not bad, "; ".join(bad[:5]) or f"{count} sums, zero violations")


def check_scans(fast: bool = False) -> CheckResult:
    fb = scan_Fb(6, 12)
    we = scan_weight_exponent(6, 12)
    ok = fb.ok and we.ok
    detail = f"F_b: {fb.checked} checked, weight exponent: {we.checked} checked"
    if not ok:
        detail = "; ".join((fb.violations + we.violations)[:5])
    return CheckResult(5, "inequality scans", ok, detail)


def _theta_ops():
    return (
        ("T(2)", lambda f: apply_T(f, 2, theta_out=3), 2, 1, None),
        ("T_0(4)", lambda f: apply_Tj(f, 0, 2, theta_out=3), 2, None, 0),
        ("T_1(4)", lambda f: apply_Tj(f, 1, 2, theta_out=3), 2, None, 1),
    )


def check_theta(fast: bool = False) -> CheckResult:
    targets = enumerate_indices(2, 3)
    need = set(targets)
    for _, _, p, dl, j in _theta_ops():
        need |= needed_indices(targets, p, dl or 1, j, 1, "class")
    f = theta_e8(2, sorted(need))
    bad = []
    found = []
    nf = norm_factor(2, 4, "T")
    if nf != 0 or norm_factor(2, 4, "Tj") != 0:
        bad.append("norm_factor is not 0 for k_n = 4")
    for name, op, p, dl, j in _theta_ops():
        g = _record(f, op(f), p, nf)
        r = eigen_ratio(f, g)
        if r is None or Fraction(r).denominator != 1:
            bad.append(f"{name}: not an integral eigenvector ({r})")
            continue
        cert = certify_basis([f], op, params=(("op", name),))
        if not cert.verdict:
            bad.append(f"{name}: certificate not integral")
        found.append(f"{name}={r}")
    return CheckResult(6, "degree-2 theta eigenform", not bad, "; ".join(bad) or ", ".join(found) + ", INTEGRAL: yes")


def check_lattice(fast: bool = False) -> CheckResult:
    if not RUNS.items:
        check_classical(fast)
        check_theta(fast)
    bad = [f"run {i}" for i, (f, g, p, e) in enumerate(RUNS.items) if not lattice_preserved(f, g, p, e)]
    return CheckResult(7, "lattice preservation", not bad, "; ".join(bad) or f"{len(RUNS.items)} runs preserve the lattice")


def _e12_delta_basis(theta: int = 12):
    e = eisenstein(12, theta)
    d = delta(theta)
    return [e, d]


def check_machine(fast: bool = False) -> CheckResult:
    basis = _e12_delta_basis()
    nstar = injective_truncation(basis)
    op = lambda f: apply_T(f, 2, theta_out=5)
    C = hecke_matrix(basis, op)
    cert = certify_basis(basis, op)
    cp = str(cert.charpoly)
    ok = nstar == 2 and cp == "X^2 - 2025X - 49176" and cert.verdict
    return CheckResult(8, "integrality pipeline", ok, f"N*={nstar}, C={C}, charpoly {cp}, integral={cert.verdict}")


def check_hilbert(fast: bool = False) -> CheckResult:
    rng = random.Random(20240611)
    bad = []
    Q = QuadField(1)
    trials = 200 if fast else 1000
    maps = {k0: random_map(Q, 1500, k0, rng) for k0 in (1, 2, 4, 12)}
    for _ in range(trials):
        k0 = rng.choice(sorted(maps))
        p = rng.choice((2, 3, 5, 7))
        m = rng.randint(1, 200)
        C = maps[k0]
        got = hecke_prime(C, Q.ideal(p), [Q.ideal(m)]).coeffs[Q.ideal(m)]
        plain = {I.a: v for I, v in C.coeffs.items()}
        if got != classical_rule(plain, m, p, k0):
            bad.append(f"Q: m={m} p={p} k0={k0}")
    # Delta as an ideal-indexed map: T'(2) acts by -24
    d = delta(60)
    C = IdealCoeffMap(Q, 12, {Q.ideal(m): d.scalar_series()[m] for m in range(1, 61)})
    out = hecke_prime(C, Q.ideal(2), [Q.ideal(m) for m in range(1, 31)])
    if any(out.coeffs[Q.ideal(m)] != -24 * C.coeffs[Q.ideal(m)] for m in range(1, 31)):
        bad.append("Delta eigenvalue")
    F = QuadField(5)
    two = F.primes_above(2)[0]
    p5 = F.primes_above(5)[0]
    p11a, p11b = F.primes_above(11)
    pairs = [(two, p5), (p5, p11a)] if fast else [(two, p5), (p5, p11a), (p11a, p11b)]
    bound = max(p.norm * q.norm for p, q in pairs) * 100
    C = random_map(F, bound, 3, rng)
    sup = F.ideals_up_to(100)
    for p, q in pairs:
        if not commute_check(C, p, q, sup):
            bad.append(f"Q(sqrt5): {p} and {q} do not commute")
    return CheckResult(9, "hilbert recursion", not bad, "; ".join(bad[:5]) or
                       f"{trials} rational trials, {len(pairs)} commuting pairs on {len(sup)} ideals")


def check_count(fast: bool = False) -> CheckResult:
    want = {(1, 1): 3, (2, 1): 5, (1, 2): 9}
    bad = []
    parts = []
    for (M, d), c in want.items():
        got, bound = count_E(M, d)
        parts.append(f"E({M},{d})={got}<={bound}")
        if got != c or got > bound:
            bad.append(f"E({M},{d}) = {got}")
    return CheckResult(10, "counting bound", not bad, "; ".join(bad) or ", ".join(parts))


CHECKS: list[Callable[[bool], CheckResult]] = [
    check_classical,
    check_cosets,
    check_gauss,
    check_valuations,
    check_scans,
    check_theta,
    check_lattice,
    check_machine,
    check_hilbert,
    check_count,
]


def run_check(number: int, fast: bool = False) -> CheckResult:
    fn = CHECKS[number - 1]
    t0 = time.perf_counter()
    try:
        res = fn(fast)
    except Exception as exc:  # a crash is a failed criterion
        res = CheckResult(number, fn.__name__, False, f"{type(exc).__name__}: {exc}")
    res.seconds = time.perf_counter() - t0
    return res


def run_all(fast: bool = False) -> list[CheckResult]:
    RUNS.items.clear()
    return [run_check(i, fast) for i in range(1, len(CHECKS) + 1)]
