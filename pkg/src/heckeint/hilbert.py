"""Ideals of Q and of real quadratic fields, and the Hecke recursion on
ideal-indexed coefficients

    C(m, T'(p) f) = sum_{a | m + p} chi(a) N(a)^(k0 - 1) C(a^-2 m p, f).

An ideal of O_F, F = Q(sqrt d), is stored in Hermite normal form [a, b + c w]
(a, c > 0, c | a, c | b, 0 <= b < a), where w = (1 + sqrt d)/2 if d = 1 mod 4
and w = sqrt d otherwise.  F = Q is the case d = 1; its ideals are (a) and
are stored as [a, 0 + 1 w] with the convention w = 0.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt
from typing import Callable, Iterable, Mapping


MAX_RATIONAL_PRIME = 10**6


def _squarefree(d: int) -> bool:
    return d >= 1 and all(d % (q * q) for q in range(2, isqrt(d) + 1))


def _primes_upto(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
    return [i for i, v in enumerate(sieve) if v]


def _hnf2(vecs) -> tuple[int, int, int]:
    """HNF [a, b + c w] of the Z-span of vectors (x, y) = x + y w, as (c, b, a)."""
    # gcd of the w-coordinates, tracking the combination that attains it
    c, bx = 0, 0
    a = 0
    for x, y in vecs:
        # combine (bx, c) with (x, y) by the extended Euclidean algorithm
        while y:
            q = c // y
            c, y = y, c - q * y
            bx, x = x, bx - q * x
        a = gcd(a, x)
    if c < 0:
        c, bx = -c, -bx
    if a:
        bx %= a
    return c, bx, a


@dataclass(frozen=True, order=True)
class QuadIdeal:
    # sort key first so that ordering is (norm, a, b, c)
    norm_: int = field(compare=True)
    a: int = field(compare=True)
    b: int = field(compare=True)
    c: int = field(compare=True)
    d: int = field(compare=True)

    @property
    def norm(self) -> int:
        return self.norm_

    def __str__(self):
        return f"[{self.a}, {self.b}+{self.c}w]" if self.d > 1 else f"({self.a})"


class QuadField:
    """Q (d = 1) or the real quadratic field Q(sqrt d)."""

    def __init__(self, d: int):
        if not _squarefree(d):
            raise ValueError(f"{d} is not a positive squarefree integer")
        self.d = d
        self.degree = 1 if d == 1 else 2
        if d == 1:
            self.disc = 1
        elif d % 4 == 1:
            self.disc = d
        else:
            self.disc = 4 * d
        # w^2 = t w + s
        if d % 4 == 1:
            self.t, self.s = 1, (d - 1) // 4
        else:
            self.t, self.s = 0, d

    def __eq__(self, other):
        return isinstance(other, QuadField) and other.d == self.d

    def __hash__(self):
        return hash(("QuadField", self.d))

    def __repr__(self):
        return "QuadField(Q)" if self.d == 1 else f"QuadField(Q(sqrt {self.d}))"

    # elements are pairs (x, y) = x + y w
    def elt_mul(self, u, v):
        x1, y1 = u
        x2, y2 = v
        if self.degree == 1:
            return (x1 * x2, 0)
        return (x1 * x2 + self.s * y1 * y2, x1 * y2 + x2 * y1 + self.t * y1 * y2)

    def elt_conj(self, u):
        x, y = u
        if self.degree == 1:
            return u
        return (x + self.t * y, -y)

    # ------------------------------------------------------------------
    # ideals

    def ideal_from_gens(self, gens: Iterable[tuple[int, int]]) -> QuadIdeal:
        """Ideal generated (as an O-module) by the given elements."""
        w = (0, 1)
        zmod = []
        for g in gens:
            zmod.append(g)
            if self.degree == 2:
                zmod.append(self.elt_mul(g, w))
        return self._from_zbasis(zmod)

    def _from_zbasis(self, vecs) -> QuadIdeal:
        if self.degree == 1:
            a = 0
            for x, _ in vecs:
                a = gcd(a, x)
            if a == 0:
                raise ValueError("zero ideal")
            return QuadIdeal(a, a, 0, 1, self.d)
        c, b, a = _hnf2(vecs)
        if c == 0 or a == 0:
            raise ValueError("not a full-rank ideal")
        ideal = QuadIdeal(a * c, a, b, c, self.d)
        self._check(ideal)
        return ideal

    def _check(self, I: QuadIdeal) -> None:
        if self.degree == 1:
            return
        if not (I.a > 0 and I.c > 0 and I.a % I.c == 0 and I.b % I.c == 0 and 0 <= I.b < I.a):
            raise ValueError(f"{I} is not in Hermite normal form")
        for g in self.zbasis(I):
            if not self.contains_elt(I, self.elt_mul(g, (0, 1))):
                raise ValueError(f"{I} is not closed under multiplication by w")

    def ideal(self, a: int, b: int = 0, c: int = 1) -> QuadIdeal:
        """Ideal with Z-basis {a, b + c w} (validated)."""
        if self.degree == 1:
            if b != 0 or c != 1 or a < 1:
                raise ValueError("ideals of Z are given as (a, 0, 1)")
            return QuadIdeal(a, a, 0, 1, 1)
        I = QuadIdeal(a * c, a, b, c, self.d)
        self._check(I)
        return I

    def principal(self, x: int, y: int = 0) -> QuadIdeal:
        if self.degree == 1:
            return self.ideal(abs(x))
        return self.ideal_from_gens([(x, y)])

    def unit(self) -> QuadIdeal:
        return self.principal(1)

    def zbasis(self, I: QuadIdeal):
        if self.degree == 1:
            return [(I.a, 0)]
        return [(I.a, 0), (I.b, I.c)]

    def contains_elt(self, I: QuadIdeal, u) -> bool:
        x, y = u
        if self.degree == 1:
            return x % I.a == 0
        if y % I.c:
            return False
        x -= (y // I.c) * I.b
        return x % I.a == 0

    def _require(self, *ideals):
        for I in ideals:
            if I.d != self.d:
                raise ValueError("ideal belongs to a different field")

    def mul(self, I: QuadIdeal, J: QuadIdeal) -> QuadIdeal:
        self._require(I, J)
        if self.degree == 1:
            return self.ideal(I.a * J.a)
        return self._from_zbasis([self.elt_mul(u, v) for u in self.zbasis(I) for v in self.zbasis(J)])

    def add(self, I: QuadIdeal, J: QuadIdeal) -> QuadIdeal:
        self._require(I, J)
        return self._from_zbasis(self.zbasis(I) + self.zbasis(J))

    def contains(self, I: QuadIdeal, J: QuadIdeal) -> bool:
        """I contains J (I divides J)."""
        self._require(I, J)
        return all(self.contains_elt(I, u) for u in self.zbasis(J))

    divides = contains

    def conj(self, I: QuadIdeal) -> QuadIdeal:
        if self.degree == 1:
            return I
        return self._from_zbasis([self.elt_conj(u) for u in self.zbasis(I)])

    def div(self, J: QuadIdeal, I: QuadIdeal) -> QuadIdeal | None:
        """J I^-1 if it is integral, else None."""
        self._require(I, J)
        if not self.contains(I, J):
            return None
        if self.degree == 1:
            return self.ideal(J.a // I.a)
        prod = self.mul(J, self.conj(I))
        n = I.norm
        vecs = self.zbasis(prod)
        if any(x % n or y % n for x, y in vecs):
            return None
        return self._from_zbasis([(x // n, y // n) for x, y in vecs])

    def pow(self, I: QuadIdeal, e: int) -> QuadIdeal:
        out = self.unit()
        for _ in range(e):
            out = self.mul(out, I)
        return out

    # ------------------------------------------------------------------
    # primes and factorisation

    def primes_above(self, p: int) -> list[QuadIdeal]:
        if p > MAX_RATIONAL_PRIME:
            raise ValueError(f"prime {p} above the supported range")
        if self.degree == 1:
            return [self.ideal(p)]
        roots = [r for r in range(p) if (r * r - self.t * r - self.s) % p == 0]
        if not roots:
            return [self.principal(p)]
        return sorted({self.ideal_from_gens([(p, 0), (-r, 1)]) for r in roots})

    def is_prime(self, I: QuadIdeal) -> bool:
        n = I.norm
        if n < 2:
            return False
        for p in _primes_upto(isqrt(n) + 1) + [n]:
            if n % p == 0:
                return I in self.primes_above(p)
        return False

    def factor(self, I: QuadIdeal) -> list[tuple[QuadIdeal, int]]:
        out = []
        n = I.norm
        rest = I
        for p in _primes_upto(n):
            if n % p:
                continue
            for P in self.primes_above(p):
                e = 0
                while True:
                    q = self.div(rest, P)
                    if q is None:
                        break
                    rest = q
                    e += 1
                if e:
                    out.append((P, e))
        if rest.norm != 1:
            raise AssertionError("factorisation incomplete")
        return out

    def divisors(self, I: QuadIdeal) -> list[QuadIdeal]:
        fac = self.factor(I)
        out = []
        for es in itertools.product(*[range(e + 1) for _, e in fac]):
            J = self.unit()
            for (P, _), e in zip(fac, es):
                J = self.mul(J, self.pow(P, e))
            out.append(J)
        return sorted(out)

    def divisors_of_sum(self, m: QuadIdeal, p: QuadIdeal) -> list[QuadIdeal]:
        """All a with a containing m + p."""
        return self.divisors(self.add(m, p))

    def ideals_up_to(self, bound: int) -> list[QuadIdeal]:
        """All nonzero ideals of norm <= bound, sorted."""
        primes = []
        for p in _primes_upto(bound):
            primes += [P for P in self.primes_above(p) if P.norm <= bound]
        out = [self.unit()]
        for P in primes:
            new = []
            for I in out:
                J = I
                while J.norm * P.norm <= bound:
                    J = self.mul(J, P)
                    new.append(J)
            out += new
        return sorted(set(out))


def ideal_arith(F: QuadField, I: QuadIdeal, J: QuadIdeal | None, op: str):
    if op == "mul":
        return F.mul(I, J)
    if op == "norm":
        return I.norm
    if op == "divides":
        return F.divides(I, J)
    if op == "divisors_of_sum":
        return F.divisors_of_sum(I, J)
    raise ValueError(f"unknown op {op!r}")


# ---------------------------------------------------------------------------
# coefficient maps and the recursion


class MissingIdealsError(KeyError):
    def __init__(self, missing):
        self.missing = sorted(set(missing))
        super().__init__(f"missing ideals: {[str(m) for m in self.missing]}")


@dataclass(frozen=True)
class IdealCoeffMap:
    field: QuadField
    k0: int
    coeffs: Mapping[QuadIdeal, object]
    chi: Callable[[QuadIdeal], object] | None = None
    level: QuadIdeal | None = None

    def char(self, a: QuadIdeal):
        if self.chi is None:
            return 1
        return self.chi(a)

    def replace(self, coeffs) -> "IdealCoeffMap":
        return IdealCoeffMap(self.field, self.k0, dict(coeffs), self.chi, self.level)


def _terms(F: QuadField, m: QuadIdeal, p: QuadIdeal):
    mp = F.mul(m, p)
    for a in F.divisors_of_sum(m, p):
        q = F.div(mp, F.mul(a, a))
        yield a, q


def hecke_prime(C: IdealCoeffMap, p: QuadIdeal, support: Iterable[QuadIdeal] | None = None) -> IdealCoeffMap:
    """T'(p) on an ideal-indexed coefficient map.

    With ``support`` the output covers exactly those ideals and any missing
    input is an error; without it the output is every stored m for which
    all required inputs are present.
    """
    F = C.field
    if not F.is_prime(p):
        raise ValueError(f"{p} is not a prime ideal")
    if C.level is not None and F.add(C.level, p).norm != 1:
        raise ValueError("p is not coprime to the level")
    strict = support is not None
    targets = sorted(support) if strict else sorted(C.coeffs)
    out = {}
    missing = []
    for m in targets:
        acc = 0
        ok = True
        for a, q in _terms(F, m, p):
            if q not in C.coeffs:
                ok = False
                missing.append(q)
                continue
            acc = acc + C.char(a) * a.norm ** (C.k0 - 1) * C.coeffs[q]
        if ok:
            out[m] = acc
    if strict and missing:
        raise MissingIdealsError(missing)
    return C.replace(out)


def needed_for(F: QuadField, support: Iterable[QuadIdeal], p: QuadIdeal) -> set[QuadIdeal]:
    return {q for m in support for _, q in _terms(F, m, p)}


def commute_check(C: IdealCoeffMap, p: QuadIdeal, q: QuadIdeal, support: Iterable[QuadIdeal]) -> bool:
    support = sorted(support)
    if p == q:
        return True
    F = C.field
    pq = hecke_prime(hecke_prime(C, q, needed_for(F, support, p)), p, support)
    qp = hecke_prime(hecke_prime(C, p, needed_for(F, support, q)), q, support)
    return pq.coeffs == qp.coeffs


def certify_maps(basis: list[IdealCoeffMap], p: QuadIdeal, support: Iterable[QuadIdeal], params: tuple = ()):
    """Integrality certificate for T'(p) on the span of the basis maps, read on the support."""
    from .integrality import certify, operator_matrix

    support = sorted(support)
    rows = [[C.coeffs[m] for m in support] for C in basis]
    images = [[hecke_prime(C, p, support).coeffs[m] for m in support] for C in basis]
    matrix = operator_matrix(rows, images)
    return certify(matrix, rows, params=params)


def classical_rule(C: Mapping[int, object], m: int, p: int, k0: int, chi=lambda x: 1):
    """C(mp) + chi(p) p^(k0-1) C(m/p), the F = Q form of the recursion."""
    val = C[m * p]
    if m % p == 0:
        val = val + chi(p) * p ** (k0 - 1) * C[m // p]
    return val


def random_map(F: QuadField, bound: int, k0: int, rng: random.Random, lo: int = -50, hi: int = 50) -> IdealCoeffMap:
    ideals = F.ideals_up_to(bound)
    return IdealCoeffMap(F, k0, {I: rng.randint(lo, hi) for I in ideals})


# ---------------------------------------------------------------------------
# text format


def format_map(C: IdealCoeffMap) -> str:
    lines = ["HILBERT 1", f"d={C.field.d} k0={C.k0} chi=trivial"]
    for I in sorted(C.coeffs):
        v = C.coeffs[I]
        if isinstance(v, Fraction) and v.denominator == 1:
            v = v.numerator
        lines.append(f"{I.a} {I.b} {I.c} : {v}")
    return "\n".join(lines) + "\n"


class HilbertParseError(ValueError):
    def __init__(self, line: int, msg: str):
        self.line = line
        super().__init__(f"line {line}: {msg}")


def parse_map(text: str) -> IdealCoeffMap:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0].strip() != "HILBERT 1":
        raise HilbertParseError(1, "expected 'HILBERT 1'")
    if len(lines) < 2:
        raise HilbertParseError(2, "missing header")
    params = {}
    for tok in lines[1].split():
        if "=" not in tok:
            raise HilbertParseError(2, f"malformed token {tok!r}")
        k, v = tok.split("=", 1)
        if k not in ("d", "k0", "chi") or k in params:
            raise HilbertParseError(2, f"unknown or repeated key {k!r}")
        params[k] = v
    if set(params) != {"d", "k0", "chi"}:
        raise HilbertParseError(2, "header needs d, k0 and chi")
    if params["chi"] != "trivial":
        raise HilbertParseError(2, "only chi=trivial is supported in files")
    try:
        F = QuadField(int(params["d"]))
        k0 = int(params["k0"])
    except ValueError as exc:
        raise HilbertParseError(2, str(exc)) from None
    coeffs = {}
    for no, line in enumerate(lines[2:], start=3):
        if ":" not in line:
            raise HilbertParseError(no, "missing ':'")
        left, right = line.split(":", 1)
        try:
            a, b, c = (int(x) for x in left.split())
            I = F.ideal(a, b, c)
            v = Fraction(right.strip())
        except ValueError as exc:
            raise HilbertParseError(no, str(exc)) from None
        if I in coeffs:
            raise HilbertParseError(no, "duplicate ideal")
        coeffs[I] = v.numerator if v.denominator == 1 else v
    return IdealCoeffMap(F, k0, coeffs)
