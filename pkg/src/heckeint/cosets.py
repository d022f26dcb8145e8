"""Coset representatives for Hecke operators on Gamma(N).

A representative of Gamma(N) \\ S_{p^delta}(N) is

    g_1(p^a_1) ... g_n(p^a_n) . [[A, N B], [0, D]],   A = p^delta D^{-t},

with D = diag(p^beta) R, beta_j = a_0 + ... + a_{j-1}, R in SL_n(Z) congruent
to 1 mod N, and B running over Lambda_D / Sym_n(Z) D.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, prod

from .exact import (
    CapExceeded,
    Matrix,
    SingularMatrixError,
    block,
    det,
    diag,
    hnf,
    identity,
    inverse,
    mat_mul,
    mat_scale,
    rank_mod_p,
    snf,
    to_int_matrix,
    transpose,
    zeros,
)

MAX_N = 3
MAX_PDELTA = 27
MAX_REPS = 200000
ORACLE_MAX_N = 2
ORACLE_MAX_M = 9


def symplectic_J(n: int) -> Matrix:
    return block(zeros(n, n), identity(n), mat_scale(-1, identity(n)), zeros(n, n))


def is_prime(p: int) -> bool:
    return p >= 2 and all(p % q for q in range(2, int(p**0.5) + 1))


@dataclass(frozen=True)
class CosetRep:
    alpha: tuple[int, ...]  # (a_0, ..., a_n)
    R: Matrix
    D: Matrix
    B: Matrix
    assembled: Matrix
    p: int
    delta: int
    N: int

    @property
    def n(self) -> int:
        return len(self.D)

    @property
    def nu(self) -> int:
        return self.p**self.delta

    def validate(self) -> None:
        n, g = self.n, self.assembled
        J = symplectic_J(n)
        if mat_mul(mat_mul(transpose(g), J), g) != mat_scale(self.nu, J):
            raise AssertionError("representative is not a symplectic similitude")
        if mat_mul(transpose(self.B), self.D) != mat_mul(transpose(self.D), self.B):
            raise AssertionError("B^t D is not symmetric")
        target = diag([1] * n + [self.nu] * n)
        if any((g[i][j] - target[i][j]) % self.N for i in range(2 * n) for j in range(2 * n)):
            raise AssertionError("representative fails the congruence mod N")

    def invariant(self) -> Matrix:
        return lattice_invariant(self.assembled)


def lattice_invariant(g: Matrix) -> Matrix:
    """HNF of the row lattice: a complete invariant of the left Gamma-class."""
    return hnf(g)[0]


# ---------------------------------------------------------------------------
# torus lifts g_j(m)


@lru_cache(maxsize=None)
def _g1(m: int, N: int) -> Matrix:
    if N == 1 or m % N == 1:
        return identity(2)
    minv = pow(m, -1, N)
    bound = 1
    while True:
        # candidates with max entry == bound, scanned lexicographically
        for a, b, c, d in itertools.product(range(bound + 1), repeat=4):
            if max(a, b, c, d) != bound:
                continue
            if b % N or c % N or (a - minv) % N or (d - m) % N:
                continue
            if a * d - b * c == 1:
                return ((a, b), (c, d))
        bound += 1


def gj_matrix(j: int, m: int, N: int, n: int | None = None) -> Matrix:
    """Element of Sp_2n(Z) congruent to diag(m^-1 1_j, 1, m 1_j, 1) mod N."""
    if n is None:
        n = j
    if not 1 <= j <= n:
        raise ValueError("need 1 <= j <= n")
    if gcd(m, N) != 1:
        raise ValueError(f"gcd({m}, {N}) != 1")
    (a, b), (c, d) = _g1(m % N if N > 1 else 1, N)
    g = [list(r) for r in identity(2 * n)]
    for i in range(j):
        g[i][i], g[i][n + i], g[n + i][i], g[n + i][n + i] = a, b, c, d
    return tuple(tuple(r) for r in g)


# ---------------------------------------------------------------------------
# SL_n cosets


def sl_cosets(beta, p: int, N: int, seed: int | None = None) -> list[Matrix]:
    """Representatives R = 1 mod N of (SL_n(Z) cap P^-1 SL_n(Z) P) \\ SL_n(Z), P = diag(p^beta)."""
    beta = tuple(beta)
    if N % p == 0:
        raise ValueError(f"p={p} divides the level N={N}")
    return list(_sl_cosets(beta, p, N, seed))


@lru_cache(maxsize=None)
def _sl_cosets(beta: tuple, p: int, N: int, seed) -> tuple:
    n = len(beta)
    P = diag([p**b for b in beta])
    gens = []
    for i in range(n):
        for j in range(n):
            if i != j:
                for s in (N, -N):
                    e = [list(r) for r in identity(n)]
                    e[i][j] = s
                    gens.append(tuple(tuple(r) for r in e))
    if seed is not None:
        random.Random(seed).shuffle(gens)
    start = identity(n)
    seen = {hnf(P)[0]: start}
    order = [start]
    queue = [start]
    while queue:
        nxt = []
        for r in queue:
            for e in gens:
                r2 = mat_mul(r, e)
                key = hnf(mat_mul(P, r2))[0]
                if key not in seen:
                    seen[key] = r2
                    order.append(r2)
                    nxt.append(r2)
        queue = nxt
        if len(order) > MAX_REPS:
            raise CapExceeded("too many SL_n cosets")
    return tuple(order)


# ---------------------------------------------------------------------------
# B representatives


def b_class_shape(D: Matrix) -> tuple[Matrix, tuple[int, ...]]:
    """(U, d) with U D V = diag(d) the Smith form used to parametrize B classes."""
    u, s, _ = snf(D)
    return u, tuple(s[i][i] for i in range(len(s)))


def b_reps(D: Matrix) -> list[Matrix]:
    """Representatives of {B : B^t D = D^t B} / Sym_n(Z) D.

    With U D V = diag(d), B = U^t M' U D where M' is symmetric with
    M'_ij in (1/d_min(i,j)) Z taken mod 1.
    """
    if det(D) == 0:
        raise SingularMatrixError("b_reps of a singular D")
    return list(_b_reps(tuple(tuple(r) for r in D)))


@lru_cache(maxsize=None)
def _b_reps(D: Matrix) -> tuple:
    n = len(D)
    u, d = b_class_shape(D)
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    ranges = [range(d[min(i, j)]) for i, j in pairs]
    ut = transpose(u)
    out = []
    for rs in itertools.product(*ranges):
        m = [[Fraction(0)] * n for _ in range(n)]
        for (i, j), r in zip(pairs, rs):
            m[i][j] = m[j][i] = Fraction(r, d[min(i, j)])
        mm = mat_mul(mat_mul(ut, tuple(tuple(r) for r in m)), u)
        out.append(to_int_matrix(mat_mul(mm, D)))
    return tuple(out)


def b_count(D: Matrix) -> int:
    _, d = b_class_shape(D)
    n = len(d)
    return prod(d[j] ** (n - j) for j in range(n))


# ---------------------------------------------------------------------------
# V_N(p^delta)


def _check(n: int, p: int, delta: int, N: int, max_pdelta: int) -> None:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if N < 1:
        raise ValueError("level must be positive")
    if N % p == 0:
        raise ValueError(f"p={p} divides the level N={N}")
    if n < 1 or n > MAX_N:
        raise CapExceeded(f"degree n={n} exceeds cap {MAX_N}")
    if delta < 0 or p**delta > max_pdelta:
        raise CapExceeded(f"p^delta={p}^{delta} exceeds cap {max_pdelta}")


def alpha_tuples(n: int, delta: int) -> list[tuple[int, ...]]:
    out = []
    for head in itertools.product(range(delta + 1), repeat=n):
        if sum(head) <= delta:
            out.append(head + (delta - sum(head),))
    return out


def torus_twist(alpha, p: int, N: int) -> Matrix:
    n = len(alpha) - 1
    g = identity(2 * n)
    for j in range(1, n + 1):
        if alpha[j]:
            g = mat_mul(g, gj_matrix(j, p ** alpha[j], N, n))
    return g


def assemble(alpha, D: Matrix, B: Matrix, p: int, delta: int, N: int) -> Matrix:
    nu = p**delta
    A = to_int_matrix(mat_scale(nu, transpose(inverse(D))))
    core = block(A, mat_scale(N, B), zeros(len(D), len(D)), D)
    return mat_mul(torus_twist(alpha, p, N), core)


def v_cosets(n: int, p: int, delta: int, N: int = 1, seed: int | None = None,
             max_pdelta: int = MAX_PDELTA, max_reps: int = MAX_REPS) -> list[CosetRep]:
    _check(n, p, delta, N, max_pdelta)
    total = 0
    plan = []
    for alpha in alpha_tuples(n, delta):
        beta = tuple(sum(alpha[:j + 1]) for j in range(n))
        P = diag([p**b for b in beta])
        for R in sl_cosets(beta, p, N, seed):
            D = mat_mul(P, R)
            total += b_count(D)
            plan.append((alpha, R, D))
    if total > max_reps:
        raise CapExceeded(f"{total} representatives exceed cap {max_reps}")
    out = []
    for alpha, R, D in plan:
        for B in b_reps(D):
            out.append(CosetRep(alpha, R, D, B, assemble(alpha, D, B, p, delta, N), p, delta, N))
    return out


def coset_groups(reps: list[CosetRep]) -> list[tuple[tuple, Matrix, list[Matrix]]]:
    """Group representatives sharing (alpha, D): [(alpha, D, [B, ...]), ...]."""
    groups: dict = {}
    for r in reps:
        groups.setdefault((r.alpha, r.D), []).append(r.B)
    return [(a, d, bs) for (a, d), bs in groups.items()]


def tj_type(n: int, j: int, p: int) -> Matrix:
    return diag([1] * j + [p] * (n - j) + [p * p] * j + [p] * (n - j))


def tj_cosets(n: int, j: int, p: int, N: int = 1, seed: int | None = None,
              max_reps: int = MAX_REPS) -> list[CosetRep]:
    """Representatives of Gamma(N) \\ Gamma(N) diag(1_j, p 1, p^2 1_j, p 1) Gamma(N).

    Among the similitude-p^2 cosets the double coset is cut out by the rank
    of the representative mod p, which equals j.
    """
    if not 0 <= j <= n - 1:
        raise ValueError("need 0 <= j <= n-1")
    _check(n, p, 2, N, max(MAX_PDELTA, p * p))
    out = []
    for r in v_cosets(n, p, 2, N, seed, max_pdelta=max(MAX_PDELTA, p * p), max_reps=max_reps):
        core = block(mat_scale(p * p, transpose(inverse(r.D))), r.B, zeros(n, n), r.D)
        if rank_mod_p(to_int_matrix(core), p) == j:
            out.append(r)
    return out


# ---------------------------------------------------------------------------
# brute-force oracle


def _pair(x, y, n: int) -> int:
    return sum(x[i] * y[n + i] - x[n + i] * y[i] for i in range(n))


def _divisors(m: int) -> list[int]:
    return [d for d in range(1, m + 1) if m % d == 0]


def brute_cosets_oracle(n: int, p: int, delta: int, N: int = 1,
                        max_n: int = ORACLE_MAX_N, max_m: int = ORACLE_MAX_M) -> frozenset:
    """HNF invariants of all left classes in S_{p^delta}, found without any coset theory.

    A row lattice L of Z^2n is the lattice of some g with g^t J g = m J iff
    [Z^2n : L] = m^n and the symplectic form is divisible by m on L.  The
    classes are enumerated as Hermite normal forms with that property.  For
    p coprime to N, left Gamma(N)-classes in S-bar_m(N) correspond to these
    one-to-one, so the answer does not depend on N.
    """
    m = p**delta
    if n > max_n or m > max_m:
        raise CapExceeded(f"oracle caps: n <= {max_n}, p^delta <= {max_m}")
    if N % p == 0:
        raise ValueError(f"p={p} divides the level N={N}")
    size = 2 * n
    divs = _divisors(m)
    found = set()
    for hs in itertools.product(divs, repeat=size):
        if prod(hs) != m**n:
            continue
        rows: list = [None] * size

        def rec(i: int):
            if i < 0:
                found.add(tuple(tuple(r) for r in rows))
                return
            free = list(range(i + 1, size))
            for xs in itertools.product(*[range(hs[c]) for c in free]):
                row = [0] * size
                row[i] = hs[i]
                for c, x in zip(free, xs):
                    row[c] = x
                if all(_pair(row, rows[k], n) % m == 0 for k in range(i + 1, size)):
                    rows[i] = row
                    rec(i - 1)
            rows[i] = None

        rec(size - 1)
    return frozenset(found)


def coset_invariants(reps: list[CosetRep]) -> list[Matrix]:
    return [r.invariant() for r in reps]
