"""Oracle q-expansions computed without the Hecke engine.

* elliptic Eisenstein series with integral scaling,
* Delta = q prod (1 - q^m)^24 from Euler's pentagonal series,
* theta series of E8 in degree 1 and 2.

E8 is realised in doubled coordinates: y in Z^8 with all y_i even or all
odd and sum(y) = 0 mod 4; the inner product is <y, z> = sum(y_i z_i) / 4.
This is the lattice D8+; the Gram matrix of its simple roots is the E8
Cartan matrix.
"""

from __future__ import annotations

import itertools
import os
from fractions import Fraction
from functools import lru_cache
from math import factorial
from pathlib import Path

import numpy as np
from sympy import bernoulli
from sympy.utilities.iterables import multiset_permutations

from .exact import CapExceeded, det
from .fourier import HalfIntMat, QExpansion, canonical, reduce_binary, trivial_chi

SUPPORTED_K = (4, 6, 8, 10, 12, 14)
MAX_SHELL_NORM = 32  # x.x for explicit shells
CACHE_ENV = "HECKEINT_CACHE"
CACHE_VERSION = 1

# Bourbaki simple roots of E8, doubled coordinates
E8_BASIS = (
    (1, -1, -1, -1, -1, -1, -1, 1),
    (2, 2, 0, 0, 0, 0, 0, 0),
    (-2, 2, 0, 0, 0, 0, 0, 0),
    (0, -2, 2, 0, 0, 0, 0, 0),
    (0, 0, -2, 2, 0, 0, 0, 0),
    (0, 0, 0, -2, 2, 0, 0, 0),
    (0, 0, 0, 0, -2, 2, 0, 0),
    (0, 0, 0, 0, 0, -2, 2, 0),
)


def sigma(k: int, m: int) -> int:
    return sum(d**k for d in range(1, m + 1) if m % d == 0)


def eisenstein(k: int, theta: int) -> QExpansion:
    """v * (-B_k/2k) * E_k = u + v sum sigma_{k-1}(m) q^m with -B_k/2k = u/v."""
    if k not in SUPPORTED_K:
        raise ValueError(f"unsupported weight {k}; choose from {SUPPORTED_K}")
    c = -Fraction(int(bernoulli(k).p), int(bernoulli(k).q)) / (2 * k)
    u, v = c.numerator, c.denominator
    coeffs = {HalfIntMat((0,), 1): (u,)}
    for m in range(1, theta + 1):
        coeffs[HalfIntMat((2 * m,), 1)] = (v * sigma(k - 1, m),)
    return QExpansion(1, 1, (k,), trivial_chi(1, 1), "Z", coeffs)


def _euler_product(theta: int) -> list[int]:
    """prod (1 - q^m) up to q^theta via the pentagonal number theorem."""
    c = [0] * (theta + 1)
    k = 0
    while True:
        done = True
        for kk in ((k, -k) if k else (0,)):
            e = kk * (3 * kk - 1) // 2
            if e <= theta:
                c[e] += -1 if kk % 2 else 1
                done = False
        if done:
            break
        k += 1
    return c


def _mul_trunc(a: list[int], b: list[int], theta: int) -> list[int]:
    out = [0] * (theta + 1)
    for i, x in enumerate(a):
        if x:
            for j in range(theta + 1 - i):
                if b[j]:
                    out[i + j] += x * b[j]
    return out


def delta(theta: int) -> QExpansion:
    """Delta = q prod (1-q^m)^24 on 0 <= m <= theta."""
    base = _euler_product(theta)
    power = [1] + [0] * theta
    e = 24
    while e:
        if e & 1:
            power = _mul_trunc(power, base, theta)
        base = _mul_trunc(base, base, theta)
        e >>= 1
    coeffs = {HalfIntMat((0,), 1): (0,)}
    for m in range(1, theta + 1):
        coeffs[HalfIntMat((2 * m,), 1)] = (power[m - 1],)
    return QExpansion(1, 1, (12,), trivial_chi(1, 1), "Z", coeffs)


# ---------------------------------------------------------------------------
# E8


def e8_gram() -> tuple:
    """Gram matrix of E8_BASIS: the E8 Cartan matrix (even, unimodular)."""
    g = tuple(
        tuple(sum(a * b for a, b in zip(u, v)) // 4 for v in E8_BASIS) for u in E8_BASIS
    )
    assert all(g[i][i] == 2 for i in range(8)) and det(g) == 1
    return g


@lru_cache(maxsize=None)
def e8_count(norm: int) -> int:
    """#{x in E8 : x.x = norm}, by dynamic programming over coordinates."""
    if norm < 0 or norm % 2:
        return 0
    target = 4 * norm
    total = 0
    for parity in (0, 1):
        vals = [y for y in range(-int(target**0.5) - 1, int(target**0.5) + 2) if y % 2 == parity]
        states = {(0, 0): 1}
        for _ in range(8):
            nxt: dict = {}
            for (sq, sm), c in states.items():
                for y in vals:
                    s2 = sq + y * y
                    if s2 <= target:
                        key = (s2, (sm + y) % 4)
                        nxt[key] = nxt.get(key, 0) + c
            states = nxt
        total += states.get((target, 0), 0)
    return total


def _patterns(target: int, parity: int) -> list[tuple[int, ...]]:
    """Non-increasing tuples of 8 non-negative ints of given parity with sum of squares = target."""
    out = []

    def rec(prefix, left, cap, slots):
        if slots == 0:
            if left == 0:
                out.append(tuple(prefix))
            return
        for y in range(cap, -1, -1):
            if y % 2 != parity or y * y > left:
                continue
            if slots * y * y < left:
                break
            rec(prefix + [y], left - y * y, y, slots - 1)

    top = int(target**0.5)
    rec([], target, top, 8)
    return out


def _shell_from_disk(norm: int):
    root = os.environ.get(CACHE_ENV)
    if not root:
        return None
    path = Path(root) / f"e8_shell_v{CACHE_VERSION}_{norm}.txt"
    if not path.exists():
        return None
    lines = path.read_text().splitlines()
    if not lines or lines[0] != f"E8SHELL {CACHE_VERSION} {norm}":
        return None
    count = int(lines[1].split(":")[1])
    arr = np.array([[int(x) for x in ln.split()] for ln in lines[2:]], dtype=np.int64).reshape(-1, 8)
    if len(arr) != count:
        return None
    return arr


def _shell_to_disk(norm: int, arr) -> None:
    root = os.environ.get(CACHE_ENV)
    if not root:
        return
    Path(root).mkdir(parents=True, exist_ok=True)
    path = Path(root) / f"e8_shell_v{CACHE_VERSION}_{norm}.txt"
    body = "\n".join(" ".join(str(int(x)) for x in row) for row in arr)
    path.write_text(f"E8SHELL {CACHE_VERSION} {norm}\n{norm}: {len(arr)}\n{body}\n")


@lru_cache(maxsize=None)
def e8_shell(norm: int) -> np.ndarray:
    """All vectors of E8 with x.x = norm, doubled coordinates, sorted lexicographically."""
    if norm > MAX_SHELL_NORM:
        raise CapExceeded(f"shell norm {norm} exceeds cap {MAX_SHELL_NORM}")
    cached = _shell_from_disk(norm)
    if cached is not None:
        return cached
    target = 4 * norm
    rows = []
    for parity in (0, 1):
        for pat in _patterns(target, parity):
            nonzero = [x for x in pat if x]
            zeros = [0] * (8 - len(nonzero))
            signed = set()
            for sg in itertools.product((1, -1), repeat=len(nonzero)):
                vec = tuple(sorted(x * s for x, s in zip(nonzero, sg))) + tuple(zeros)
                if sum(vec) % 4 == 0:
                    signed.add(tuple(sorted(vec)))
            for vec in sorted(signed):
                rows.append(np.array(list(multiset_permutations(list(vec))), dtype=np.int64))
    arr = np.unique(np.concatenate(rows), axis=0) if rows else np.zeros((0, 8), dtype=np.int64)
    _shell_to_disk(norm, arr)
    return arr


def _orbit_reps(shell: np.ndarray) -> list[tuple[np.ndarray, int]]:
    """Representatives of shell under signed permutations with an even number of sign changes."""
    reps = []
    seen = set()
    for row in shell:
        absrow = tuple(sorted((abs(int(x)) for x in row), reverse=True))
        if absrow in seen:
            continue
        seen.add(absrow)
        mult = {}
        for x in absrow:
            mult[x] = mult.get(x, 0) + 1
        perms = factorial(8)
        for c in mult.values():
            perms //= factorial(c)
        nonzero = sum(1 for x in absrow if x)
        base = np.array(absrow, dtype=np.int64)
        if nonzero == 8:
            size = perms * 2 ** 7
            flipped = base.copy()
            flipped[-1] = -flipped[-1]
            for v in (base, flipped):
                if int(v.sum()) % 4 == 0:
                    reps.append((v, size))
        else:
            reps.append((base, perms * 2 ** nonzero))
    return reps


def e8_pair_count(a: int, b: int, c: int) -> int:
    """#{(x, y) in E8^2 : x.x = a, y.y = c, x.y = b}."""
    if a == 0 or c == 0:
        if b != 0:
            return 0
        return e8_count(a + c) if (a == 0) != (c == 0) else 1
    if a > c:
        a, c = c, a
    big = e8_shell(c)
    total = 0
    for v, size in _orbit_reps(e8_shell(a)):
        total += size * int(np.count_nonzero(big @ v == 4 * b))
    return total


def theta_e8_value(t: HalfIntMat) -> int:
    if t.n == 1:
        return e8_count(t.key[0])
    if t.n != 2:
        raise ValueError("theta series only for n <= 2")
    r, _ = reduce_binary(t)
    g = r.gram
    if r.rank() <= 1:
        return e8_count(g[0][0])
    return e8_pair_count(g[0][0], g[0][1], g[1][1])


def theta_e8(n: int, indices) -> QExpansion:
    """Degree-n theta series of E8 (weight det^4, level 1) on the requested indices."""
    if n not in (1, 2):
        raise ValueError("n must be 1 or 2")
    coeffs = {}
    for t in indices:
        if t.n != n:
            raise ValueError("index degree mismatch")
        key = canonical(t, "class")
        coeffs[key] = (theta_e8_value(key),)
    return QExpansion(n, 1, (4,) * n, trivial_chi(n, 1), "Z", coeffs, mode="class")
