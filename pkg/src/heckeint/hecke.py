"""Gauss sums and the coefficient-level action of T(p^delta), T_{j,n-j}(p^2).

For a representative with blocks (alpha, D, B) and similitude nu = p^delta,

    a(T, f|T) = nu^(sum k - n(n+1)/2) * sum chi_1(p^a_1)...chi_n(p^a_n)
                * rho(D)^-1 * e(tr(S B D^-1)) * a(S, f),     S = nu^-1 D T D^t,

where a(S, f) = 0 unless S is half-integral and positive semi-definite.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, prod
from typing import Callable, Mapping

import numpy as np

from .characters import DirichletChar
from .cosets import b_class_shape, b_count, b_reps, coset_groups, tj_cosets, v_cosets
from .exact import CycInt, Matrix, det, diag, inverse, mat_mul, rank_mod_p, transpose
from .fourier import (
    HalfIntMat,
    MissingIndicesError,
    QExpansion,
    canonical,
    enumerate_indices,
    transform_index,
)
from .weights import build_model, rho_matrix


def _gram(s) -> Matrix:
    return s.gram if isinstance(s, HalfIntMat) else tuple(tuple(r) for r in s)


@dataclass(frozen=True)
class GaussSumResult:
    value: int
    vanished: bool
    snf_divisors: tuple[int, ...]


# ---------------------------------------------------------------------------
# G(S, D) = sum over B of e(tr(S B D^-1))


def _exponent(g: Matrix, m: Matrix) -> Fraction:
    """tr(S M) for S = g/2 and symmetric M."""
    n = len(g)
    return sum((Fraction(g[i][j]) * m[j][i] for i in range(n) for j in range(n)), Fraction(0)) / 2


def exp_sum(exponents) -> int:
    """Exact value of sum e(x) over rationals x; must be a rational integer."""
    counts: dict = {}
    L = 1
    xs = []
    for x in exponents:
        x = Fraction(x) % 1
        xs.append(x)
        L = L * x.denominator // gcd(L, x.denominator)
    for x in xs:
        e = int(x * L)
        counts[e] = counts.get(e, 0) + 1
    val = CycInt.from_exponent_counts(L, counts)
    if not val.is_rational() or val.to_rational().denominator != 1:
        raise ArithmeticError(f"exponential sum did not collapse to an integer: {val!r}")
    return int(val.to_rational())


def gauss_brute(s, D: Matrix, Bs=None) -> GaussSumResult:
    """Sum over b_reps(D) (or the supplied B list) evaluated in a cyclotomic field."""
    g = _gram(s)
    dinv = inverse(D)
    if Bs is None:
        Bs = b_reps(D)
    val = exp_sum(_exponent(g, mat_mul(b, dinv)) for b in Bs)
    _, d = b_class_shape(D)
    return GaussSumResult(val, val == 0, d)


def gauss_closed(s, D: Matrix) -> GaussSumResult:
    """Closed form: prod d_j^(n-j+1) if d_i | s_ij for all i <= j, else 0.

    Here U D V = diag(d) is the Smith form and S' = U S U^t, s_ii = S'_ii,
    s_ij = 2 S'_ij, which is exactly triviality of B -> e(tr(S B D^-1)).
    """
    g = _gram(s)
    u, d = b_class_shape(D)
    gp = mat_mul(mat_mul(u, g), transpose(u))
    n = len(d)
    for i in range(n):
        for j in range(i, n):
            sij = gp[i][i] // 2 if i == j else gp[i][j]
            if sij % d[i]:
                return GaussSumResult(0, True, d)
    return GaussSumResult(b_count(D), False, d)


def gauss_literal_disagrees(s, D: Matrix) -> bool:
    """True when the reading 'd_nu | s_mu,nu' (larger divisor) differs from the closed form."""
    g = _gram(s)
    u, d = b_class_shape(D)
    gp = mat_mul(mat_mul(u, g), transpose(u))
    n = len(d)
    literal = all(
        (gp[i][i] // 2 if i == j else gp[i][j]) % d[j] == 0 for i in range(n) for j in range(i, n)
    )
    return literal != (not gauss_closed(s, D).vanished)


# ---------------------------------------------------------------------------
# rank-filtered sums G_{a,b}(T) and G_j(T) for diagonal D


def d_ab(n: int, a: int, b: int, p: int) -> tuple[int, ...]:
    if a < 0 or b < 0 or a + b > n:
        raise ValueError("need a, b >= 0 and a + b <= n")
    return (1,) * (n - a - b) + (p,) * a + (p * p,) * b


def d_j(n: int, j: int, p: int) -> tuple[int, ...]:
    return (p * p,) * j + (p,) * (n - j)


@lru_cache(maxsize=None)
def _residue_table(d: tuple, p: int):
    """Free entries, residue configurations and the rank mod p of each configuration."""
    n = len(d)
    free = [(i, j) for i in range(n) for j in range(i, n) if gcd(d[i], d[j]) > 1]
    raw = list(itertools.product(range(p), repeat=len(free)))
    configs = np.array(raw, dtype=np.int64).reshape(len(raw), len(free))
    ranks = np.empty(len(configs), dtype=np.int64)
    for k, c in enumerate(configs):
        core = [[0] * (2 * n) for _ in range(2 * n)]
        for i in range(n):
            core[i][i] = p * p // d[i]
            core[n + i][n + i] = d[i]
        for (i, j), r in zip(free, c):
            g = gcd(d[i], d[j])
            core[i][n + j] = int(r) * d[j] // g
            core[j][n + i] = int(r) * d[i] // g
        ranks[k] = rank_mod_p(core, p)
    return free, configs, ranks


def gauss_rank_filtered(t, d: tuple, p: int, j: int) -> int:
    """sum of e(tr(T B D^-1)) over B with rank_p [[p^2 D^-1, B], [0, D]] = j, D = diag(d).

    d has entries in {1, p, p^2}.  The rank only sees B mod p, so the sum over
    each residue class factors entrywise.
    """
    g = _gram(t)
    d = tuple(d)
    if any(x not in (1, p, p * p) for x in d):
        raise ValueError("diagonal entries must be 1, p or p^2")
    free, configs, ranks = _residue_table(d, p)
    mult = 1
    u = []
    for i, jj in free:
        s = g[i][i] // 2 if i == jj else g[i][jj]
        gg = gcd(d[i], d[jj])
        if gg == p * p:
            if s % p:
                return 0
            mult *= p
            u.append((s // p) % p)
        else:
            u.append(s % p)
    sel = configs[ranks == j]
    if len(sel) == 0:
        return 0
    lin = (sel @ np.array(u, dtype=np.int64)) % p if len(u) else np.zeros(len(sel), dtype=np.int64)
    cnt = np.bincount(lin, minlength=p)
    if any(cnt[k] != cnt[1] for k in range(1, p)):
        raise ArithmeticError("rank-filtered Gauss sum is not rational")
    return mult * int(cnt[0] - cnt[1])


def gauss_rank_filtered_brute(t, d: tuple, p: int, j: int) -> int:
    D = diag(list(d))
    n = len(d)
    keep = []
    for b in b_reps(D):
        core = [[0] * (2 * n) for _ in range(2 * n)]
        for i in range(n):
            core[i][i] = p * p // d[i]
            core[n + i][n + i] = d[i]
            for k in range(n):
                core[i][n + k] = b[i][k]
        if rank_mod_p(core, p) == j:
            keep.append(b)
    return gauss_brute(t, D, keep).value if keep else 0


def G_ab(t, n: int, a: int, b: int, p: int, j: int) -> int:
    return gauss_rank_filtered(t, d_ab(n, a, b, p), p, j)


def G_j(t, n: int, j: int, p: int) -> int:
    return gauss_rank_filtered(t, d_j(n, j, p), p, j)


def ord_p(x: int, p: int) -> float:
    if x == 0:
        return float("inf")
    k = 0
    while x % p == 0:
        x //= p
        k += 1
    return k


# ---------------------------------------------------------------------------
# operators


def norm_factor(n: int, kn: int, kind: str, delta: int = 1) -> int:
    """Exponent e such that p^e times the operator preserves integral lattices.

    kind 'T' is T(p^delta) (e is delta times the T(p) exponent), kind 'Tj'
    is T_{j,n-j}(p^2).
    """
    if kind == "T":
        return delta * ((n - kn) * (n - kn + 1) // 2 if kn < n else 0)
    if kind == "Tj":
        return n * (n - kn + 1) if kn <= n else 0
    raise ValueError(f"unknown operator kind {kind!r}")


def _chi_factor(chi: tuple[DirichletChar, ...], alpha, p: int):
    v = 1
    for c, a in zip(chi, alpha[1:]):
        if a:
            v = v * c(p**a)
    return v


def _groups(n: int, p: int, N: int, delta: int | None, j: int | None, seed):
    if j is None:
        reps = v_cosets(n, p, delta, N, seed)
        full = True
    else:
        reps = tj_cosets(n, j, p, N, seed)
        full = False
    return coset_groups(reps), full


def needed_indices(targets, p: int, delta: int = 1, j: int | None = None, N: int = 1,
                   mode: str = "explicit", seed: int | None = None) -> set[HalfIntMat]:
    """All S = nu^-1 D T D^t in A_n (nu = p^delta, or p^2 for T_j) the action reads."""
    targets = list(targets)
    if not targets:
        return set()
    n = targets[0].n
    groups, _ = _groups(n, p, N, delta, j, seed)
    dl = delta if j is None else 2
    out = set()
    for t in targets:
        for _, D, _ in groups:
            s = transform_index(t, D, p, dl)
            if s is not None:
                out.add(canonical(s, mode))
    return out


def _scale_vec(c, v):
    return tuple(c * x for x in v)


def _add_vec(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _clean(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    if isinstance(x, CycInt) and x.is_rational():
        return _clean(x.to_rational())
    return x


def ring_of(values, default: str) -> str:
    ring = "Z"
    for v in values:
        if isinstance(v, CycInt):
            return f"cyc:{v.conductor}"
        if isinstance(v, Fraction) and v.denominator != 1:
            ring = "Q"
    if default.startswith("cyc:"):
        return default
    if ring == "Z" and default == "Q":
        return "Q"
    return ring


def _apply(f: QExpansion, p: int, delta: int | None, j: int | None, theta_out: int, seed) -> QExpansion:
    if f.level % p == 0:
        raise ValueError(f"p={p} divides the level N={f.level}")
    if not f.coeffs:
        return f.replace(coeffs={})
    n = f.n
    targets = [t for t in enumerate_indices(n, theta_out) if canonical(t, f.mode) == t]
    needed = needed_indices(targets, p, delta or 1, j, f.level, f.mode, seed)
    missing = [s for s in needed if not f.has(s)]
    if missing:
        raise MissingIndicesError(missing)
    groups, full = _groups(n, p, f.level, delta, j, seed)
    dl = delta if j is None else 2
    nu = p**dl
    model = build_model(f.weight)
    e = sum(f.weight) - n * (n + 1) // 2
    scale = Fraction(nu) ** e
    rho_inv = {D: rho_matrix(model, inverse(D)) for _, D, _ in groups}
    dinv = {D: inverse(D) for _, D, _ in groups}
    out = {}
    zero = tuple(0 for _ in range(model.dim))
    for t in targets:
        acc = zero
        for alpha, D, Bs in groups:
            s = transform_index(t, D, p, dl)
            if s is None:
                continue
            if full:
                gs = gauss_closed(s, D).value
            else:
                gs = exp_sum(_exponent(s.gram, mat_mul(b, dinv[D])) for b in Bs)
            if gs == 0:
                continue
            chi = _chi_factor(f.chi, alpha, p)
            a = f[s]
            v = tuple(sum((r * x for r, x in zip(row, a)), 0) for row in rho_inv[D])
            acc = _add_vec(acc, _scale_vec(chi * gs, v))
        out[t] = tuple(_clean(scale * x) for x in acc)
    ring = ring_of((x for v in out.values() for x in v), f.ring)
    return f.replace(coeffs=out, ring=ring)


def apply_T(f: QExpansion, p: int, delta: int = 1, theta_out: int = 1, seed: int | None = None) -> QExpansion:
    """Coefficients of T(p^delta) f on all indices of trace <= theta_out."""
    if delta < 1:
        raise ValueError("delta must be >= 1")
    return _apply(f, p, delta, None, theta_out, seed)


def apply_Tj(f: QExpansion, j: int, p: int, theta_out: int = 1, seed: int | None = None) -> QExpansion:
    """Coefficients of T_{j,n-j}(p^2) f on all indices of trace <= theta_out."""
    if not 0 <= j <= f.n - 1:
        raise ValueError("need 0 <= j <= n-1")
    return _apply(f, p, None, j, theta_out, seed)


def eigen_ratio(f: QExpansion, g: QExpansion):
    """The common ratio g(T)/f(T) over shared nonzero coefficients, or None if not constant."""
    ratio = None
    for t, v in g.coeffs.items():
        if not f.has(t):
            continue
        w = f[t]
        for x, y in zip(w, v):
            if x == 0:
                if y != 0:
                    return None
                continue
            r = Fraction(y) / Fraction(x) if not isinstance(y, CycInt) and not isinstance(x, CycInt) else y / x
            r = _clean(r)
            if ratio is None:
                ratio = r
            elif r != ratio:
                return None
    return ratio


def lattice_preserved(f: QExpansion, g: QExpansion, p: int, exponent: int) -> bool:
    """If f has integral coefficients then p^exponent g must as well."""
    def integral(x):
        if isinstance(x, CycInt):
            return x.is_integral()
        return Fraction(x).denominator == 1

    if not all(integral(x) for v in f.coeffs.values() for x in v):
        return True
    return all(integral(p**exponent * x) for v in g.coeffs.values() for x in v)


# ---------------------------------------------------------------------------
# character projection


def _units(N: int) -> list[int]:
    return [a for a in range(1, N) if gcd(a, N) == 1] if N > 1 else [1]


class TorusAction:
    """Coefficient-level action of ((Z/N)^x)^n on a finite index set.

    ``table[gamma][T] = (T_src, c)`` means a(T, f|gamma) = c * a(T_src, f).
    The group-action axioms are checked on construction.
    """

    def __init__(self, N: int, n: int, table: Mapping):
        self.N, self.n = N, n
        self.table = {tuple(g): dict(m) for g, m in table.items()}
        self.group = list(itertools.product(_units(N), repeat=n))
        if set(self.table) != set(self.group):
            raise ValueError("torus action table must cover the whole group")
        keys = None
        for g in self.group:
            ks = set(self.table[g])
            if keys is None:
                keys = ks
            elif ks != keys:
                raise ValueError("torus action entries must share one index set")
            srcs = [src for src, _ in self.table[g].values()]
            if set(srcs) != ks:
                raise ValueError("torus action must permute the index set")
        self.indices = keys or set()
        ident = tuple(1 % N if N > 1 else 1 for _ in range(n))
        for t in self.indices:
            src, c = self.table[ident][t]
            if src != t or c != 1:
                raise ValueError("identity element does not act trivially")
        for g in self.group:
            for h in self.group:
                gh = tuple((x * y) % N if N > 1 else 1 for x, y in zip(g, h))
                for t in self.indices:
                    # (f|g)|h at T = c_h * (f|g)(src_h) = c_h c_g f(src_g(src_h))
                    s1, c1 = self.table[h][t]
                    s2, c2 = self.table[g][s1]
                    s3, c3 = self.table[gh][t]
                    if s2 != s3 or c1 * c2 != c3:
                        raise ValueError("torus action table is not a group action")

    @classmethod
    def trivial(cls, N: int, n: int, indices) -> "TorusAction":
        group = itertools.product(_units(N), repeat=n)
        return cls(N, n, {g: {t: (t, 1) for t in indices} for g in group})


def _char_inverse(v):
    if isinstance(v, CycInt):
        return v.conj()
    return Fraction(1) / v


def project_char(f: QExpansion, chi: tuple[DirichletChar, ...], action: TorusAction) -> QExpansion:
    """P_chi f = phi(N)^-n sum_gamma chi(gamma)^-1 f|gamma."""
    N, n = f.level, f.n
    if action.N != N or action.n != n:
        raise ValueError("torus action does not match the expansion")
    if set(f.coeffs) - action.indices:
        raise ValueError("torus action does not cover the support")
    group = action.group
    out = {}
    for t in f.coeffs:
        acc = tuple(0 for _ in range(f.dim))
        for g in group:
            cv = 1
            for c, x in zip(chi, g):
                cv = cv * c(x)
            src, sc = action.table[g][t]
            w = _char_inverse(cv) * sc
            acc = _add_vec(acc, tuple(w * x for x in f.coeffs[src]))
        k = Fraction(1, len(group))
        out[t] = tuple(_clean(k * x) for x in acc)
    return f.replace(coeffs=out, chi=tuple(chi), ring=ring_of((x for v in out.values() for x in v), f.ring))
