"""Dirichlet characters mod N with values in Q(zeta_phi(N))."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd

from .exact import CycInt, euler_phi


def units(n: int) -> list[int]:
    return [a for a in range(n) if gcd(a, n) == 1] if n > 1 else [0]


def _factor(n: int) -> list[tuple[int, int]]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1
    if n > 1:
        out.append((n, 1))
    return out


def _order(a: int, n: int) -> int:
    k, x = 1, a % n
    while x != 1 % n:
        x = x * a % n
        k += 1
    return k


def unit_generators(n: int) -> list[tuple[int, int]]:
    """Independent generators of (Z/n)^x with their orders (CRT lifts)."""
    gens = []
    for p, e in _factor(n):
        q = p**e
        rest = n // q
        local = []
        if p == 2:
            if e >= 2:
                local.append((q - 1, 2))
            if e >= 3:
                local.append((5, q // 4))
        else:
            g = next(g for g in range(2, q) if gcd(g, q) == 1 and _order(g, q) == q // p * (p - 1))
            local.append((g, q // p * (p - 1)))
        for g, o in local:
            # lift: g mod q, 1 mod rest
            lift = g if rest == 1 else (g * rest * pow(rest, -1, q) + q * pow(q, -1, rest)) % n
            gens.append((lift, o))
    return gens


@dataclass(frozen=True)
class DirichletChar:
    """chi(a) = zeta_{phi(N)}^{exps[i]} for a = units(N)[i]."""

    modulus: int
    exps: tuple[int, ...]

    def __post_init__(self):
        if len(self.exps) != len(units(self.modulus)):
            raise ValueError("exponent table does not match the unit group")
        phi = self.order_bound
        us = units(self.modulus)
        table = dict(zip(us, self.exps))
        for a in us:
            for b in us:
                ab = a * b % self.modulus if self.modulus > 1 else 0
                if (table[a] + table[b] - table[ab]) % phi:
                    raise ValueError("exponent table is not multiplicative")

    @property
    def order_bound(self) -> int:
        return euler_phi(self.modulus)

    @classmethod
    def trivial(cls, modulus: int) -> "DirichletChar":
        return cls(modulus, (0,) * len(units(modulus)))

    def is_trivial(self) -> bool:
        return not any(x % self.order_bound for x in self.exps)

    def exponent(self, a: int) -> int | None:
        if gcd(a, self.modulus) != 1:
            return None
        us = units(self.modulus)
        return self.exps[us.index(a % self.modulus if self.modulus > 1 else 0)]

    def __call__(self, a: int):
        e = self.exponent(a)
        if e is None:
            return 0
        phi = self.order_bound
        if e % phi == 0:
            return 1
        if (2 * e) % phi == 0:
            return -1
        return CycInt.zeta(phi, e)

    def spec(self) -> str:
        return ":".join(str(e % self.order_bound) for e in self.exps)

    @classmethod
    def from_spec(cls, modulus: int, text: str) -> "DirichletChar":
        if text == "trivial":
            return cls.trivial(modulus)
        return cls(modulus, tuple(int(x) for x in text.split(":")))


def all_characters(n: int) -> list[DirichletChar]:
    phi = euler_phi(n)
    gens = unit_generators(n)
    us = units(n)
    # discrete log of each unit in terms of the generators
    logs = {}
    for ks in itertools.product(*[range(o) for _, o in gens]):
        a = 1 % n if n > 1 else 0
        for (g, _), k in zip(gens, ks):
            a = a * pow(g, k, n) % n if n > 1 else 0
        logs[a] = ks
    out = []
    for choice in itertools.product(*[range(o) for _, o in gens]):
        exps = tuple(
            sum(c * (phi // o) * k for c, (_, o), k in zip(choice, gens, logs[a])) % phi for a in us
        )
        out.append(DirichletChar(n, exps))
    return out


def parse_chi(text: str, modulus: int, n: int) -> tuple[DirichletChar, ...]:
    if text == "trivial":
        return tuple(DirichletChar.trivial(modulus) for _ in range(n))
    parts = text.split(";")
    if len(parts) != n:
        raise ValueError(f"character spec needs {n} components")
    return tuple(DirichletChar.from_spec(modulus, p) for p in parts)


def format_chi(chi: tuple[DirichletChar, ...]) -> str:
    if all(c.is_trivial() for c in chi):
        return "trivial"
    return ";".join(c.spec() for c in chi)
