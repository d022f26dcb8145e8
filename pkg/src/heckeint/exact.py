"""Exact integer/rational/cyclotomic arithmetic and integer linear algebra.

Matrices are tuples of row tuples.  Entries are Python ``int`` (arbitrary
precision), ``fractions.Fraction`` or :class:`CycInt`; every function here is
pure and returns fresh immutable values.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence

Matrix = tuple  # tuple[tuple[entry, ...], ...]


class CapExceeded(RuntimeError):
    """A configured resource cap (dimension, enumeration size, ...) was hit."""


class SingularMatrixError(ValueError):
    pass


# ---------------------------------------------------------------------------
# matrix helpers


def mat(rows: Iterable[Iterable]) -> Matrix:
    out = tuple(tuple(r) for r in rows)
    if out and any(len(r) != len(out[0]) for r in out):
        raise ValueError("ragged matrix")
    return out


def identity(n: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def zeros(r: int, c: int) -> Matrix:
    return tuple((0,) * c for _ in range(r))


def diag(entries: Sequence) -> Matrix:
    n = len(entries)
    return tuple(tuple(entries[i] if i == j else 0 for j in range(n)) for i in range(n))


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a)) if a else ()


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    if a and len(a[0]) != len(b):
        raise ValueError("dimension mismatch")
    bt = transpose(b)
    return tuple(tuple(sum((x * y for x, y in zip(row, col)), 0) for col in bt) for row in a)


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x + y for x, y in zip(r, s)) for r, s in zip(a, b))


def mat_scale(c, a: Matrix) -> Matrix:
    return tuple(tuple(c * x for x in r) for r in a)


def mat_vec(a: Matrix, v: Sequence) -> tuple:
    return tuple(sum((x * y for x, y in zip(row, v)), 0) for row in a)


def block(a: Matrix, b: Matrix, c: Matrix, d: Matrix) -> Matrix:
    top = tuple(tuple(ra) + tuple(rb) for ra, rb in zip(a, b))
    bot = tuple(tuple(rc) + tuple(rd) for rc, rd in zip(c, d))
    return top + bot


def det(a: Matrix):
    """Determinant; Bareiss elimination for integers, Gauss for fields."""
    n = len(a)
    if n == 0:
        return 1
    if all(isinstance(x, int) for r in a for x in r):
        m = [list(r) for r in a]
        sign, prev = 1, 1
        for k in range(n - 1):
            if m[k][k] == 0:
                for i in range(k + 1, n):
                    if m[i][k] != 0:
                        m[k], m[i] = m[i], m[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            prev = m[k][k]
        return sign * m[n - 1][n - 1]
    m = [[Fraction(x) if not isinstance(x, CycInt) else x for x in r] for r in a]
    result = 1
    for k in range(n):
        piv = next((i for i in range(k, n) if m[i][k] != 0), None)
        if piv is None:
            return 0
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
            result = -result
        result = result * m[k][k]
        inv = 1 / m[k][k]
        for i in range(k + 1, n):
            f = m[i][k] * inv
            if f != 0:
                m[i] = [x - f * y for x, y in zip(m[i], m[k])]
    return result


def inverse(a: Matrix) -> Matrix:
    """Exact inverse over Q (or a cyclotomic field)."""
    n = len(a)
    m = [[_field(x) for x in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(a)]
    for k in range(n):
        piv = next((i for i in range(k, n) if m[i][k] != 0), None)
        if piv is None:
            raise SingularMatrixError("matrix is singular")
        m[k], m[piv] = m[piv], m[k]
        inv = 1 / m[k][k]
        m[k] = [x * inv for x in m[k]]
        for i in range(n):
            if i != k and m[i][k] != 0:
                f = m[i][k]
                m[i] = [x - f * y for x, y in zip(m[i], m[k])]
    return tuple(tuple(_demote(x) for x in r[n:]) for r in m)


def _field(x):
    return x if isinstance(x, (Fraction, CycInt)) else Fraction(x)


def _demote(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def is_integer_matrix(a: Matrix) -> bool:
    return all(isinstance(x, int) or (isinstance(x, Fraction) and x.denominator == 1) for r in a for x in r)


def to_int_matrix(a: Matrix) -> Matrix:
    if not is_integer_matrix(a):
        raise ValueError("matrix has non-integral entries")
    return tuple(tuple(int(x) for x in r) for r in a)


def rank(a: Matrix) -> int:
    return len(rref(a)[1])


def rref(a: Matrix):
    """Reduced row echelon form over a field; returns (rows, pivot_columns)."""
    m = [[_field(x) for x in r] for r in a]
    rows = len(m)
    cols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def nullspace(a: Matrix) -> list[list]:
    """Basis of {x : a x = 0} over the field of the entries."""
    m, pivots = rref(a)
    cols = len(a[0]) if a else 0
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -m[i][f]
        basis.append(v)
    return basis


def rank_mod_p(a: Matrix, p: int) -> int:
    m = [[x % p for x in r] for r in a]
    rows = len(m)
    cols = len(m[0]) if m else 0
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], -1, p)
        m[r] = [(x * inv) % p for x in m[r]]
        for i in range(r + 1, rows):
            if m[i][c]:
                f = m[i][c]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[r])]
        r += 1
    return r


# ---------------------------------------------------------------------------
# Smith and Hermite normal forms


def snf(a: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """Smith normal form ``U @ a @ V = S`` of a square nonsingular integer matrix.

    Pivoting always picks the entry of smallest absolute value (first in
    row-major order on ties), so U and V are reproducible.
    """
    n = len(a)
    if any(len(r) != n for r in a):
        raise ValueError("snf needs a square matrix")
    if det(a) == 0:
        raise SingularMatrixError("snf of a singular matrix")
    s = [list(r) for r in a]
    u = [list(r) for r in identity(n)]
    v = [list(r) for r in identity(n)]

    def swap_rows(i, j):
        s[i], s[j] = s[j], s[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in s:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    for t in range(n):
        while True:
            best = None
            for i in range(t, n):
                for j in range(t, n):
                    if s[i][j] != 0 and (best is None or abs(s[i][j]) < abs(s[best[0]][best[1]])):
                        best = (i, j)
            i, j = best
            swap_rows(t, i)
            swap_cols(t, j)
            piv = s[t][t]
            done = True
            for i in range(t + 1, n):
                q = s[i][t] // piv
                if q:
                    s[i] = [x - q * y for x, y in zip(s[i], s[t])]
                    u[i] = [x - q * y for x, y in zip(u[i], u[t])]
                if s[i][t]:
                    done = False
            for j in range(t + 1, n):
                q = s[t][j] // piv
                if q:
                    for row in s:
                        row[j] -= q * row[t]
                    for row in v:
                        row[j] -= q * row[t]
                if s[t][j]:
                    done = False
            if not done:
                continue
            # divisibility: fold a non-multiple into row t and retry
            bad = next(((i, j) for i in range(t + 1, n) for j in range(t + 1, n) if s[i][j] % piv), None)
            if bad is None:
                break
            i = bad[0]
            s[t] = [x + y for x, y in zip(s[t], s[i])]
            u[t] = [x + y for x, y in zip(u[t], u[i])]
        if s[t][t] < 0:
            s[t] = [-x for x in s[t]]
            u[t] = [-x for x in u[t]]
    return mat(u), mat(s), mat(v)


def elementary_divisors(a: Matrix) -> tuple[int, ...]:
    _, s, _ = snf(a)
    return tuple(s[i][i] for i in range(len(s)))


def hnf(a: Matrix) -> tuple[Matrix, Matrix]:
    """Row-style Hermite normal form ``H = U @ a`` (U unimodular).

    H is upper echelon with positive pivots and entries above each pivot
    reduced into ``[0, pivot)``; zero rows go last.  Canonical for the row
    lattice of ``a``.
    """
    rows = len(a)
    cols = len(a[0]) if a else 0
    h = [list(r) for r in a]
    u = [list(r) for r in identity(rows)]
    r = 0
    pivots = []
    for c in range(cols):
        if r == rows:
            break
        while True:
            nz = [i for i in range(r, rows) if h[i][c] != 0]
            if not nz:
                break
            i = min(nz, key=lambda k: (abs(h[k][c]), k))
            h[r], h[i] = h[i], h[r]
            u[r], u[i] = u[i], u[r]
            clean = True
            for k in range(r + 1, rows):
                if h[k][c]:
                    q = h[k][c] // h[r][c]
                    h[k] = [x - q * y for x, y in zip(h[k], h[r])]
                    u[k] = [x - q * y for x, y in zip(u[k], u[r])]
                    if h[k][c]:
                        clean = False
            if clean:
                break
        if r < rows and h[r][c] != 0:
            if h[r][c] < 0:
                h[r] = [-x for x in h[r]]
                u[r] = [-x for x in u[r]]
            for k in range(r):
                q = h[k][c] // h[r][c]
                if q:
                    h[k] = [x - q * y for x, y in zip(h[k], h[r])]
                    u[k] = [x - q * y for x, y in zip(u[k], u[r])]
            pivots.append(c)
            r += 1
    return mat(h), mat(u)


# ---------------------------------------------------------------------------
# cyclotomic integers


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients (low to high) of the n-th cyclotomic polynomial."""
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _poly_exact_div(poly, list(cyclotomic_polynomial(d)))
    return tuple(poly)


def _poly_exact_div(num: list[int], den: list[int]) -> list[int]:
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1]
        out[i] = c
        if c:
            for j, d in enumerate(den):
                num[i + j] -= c * d
    if any(num[: len(den) - 1]):
        raise ArithmeticError("inexact polynomial division")
    return out


def euler_phi(n: int) -> int:
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def _reduce_mod_phi(coeffs: list, n: int) -> tuple:
    phi = cyclotomic_polynomial(n)
    deg = len(phi) - 1
    c = list(coeffs)
    for i in range(len(c) - 1, deg - 1, -1):
        x = c[i]
        if x:
            for j in range(deg):
                c[i - deg + j] -= x * phi[j]
            c[i] = 0
    c = c[:deg] + [0] * (deg - len(c))
    return tuple(Fraction(x) for x in c)


class CycInt:
    """Element of Q(zeta_N) in the power basis 1, zeta, ..., zeta^(phi(N)-1).

    Despite the name the coordinates are rationals; :meth:`is_integral` tells
    whether the element lies in Z[zeta_N] (the power basis is an integral
    basis there).
    """

    __slots__ = ("conductor", "coeffs", "_hash")

    def __init__(self, conductor: int, coeffs: Sequence = ()):
        if conductor < 1:
            raise ValueError("conductor must be positive")
        self.conductor = conductor
        self.coeffs = _reduce_mod_phi([Fraction(x) for x in coeffs], conductor)
        self._hash = None

    @classmethod
    def zeta(cls, n: int, e: int = 1) -> "CycInt":
        c = [0] * n
        c[e % n] = 1
        return cls(n, c)

    @classmethod
    def from_exponent_counts(cls, n: int, counts: dict[int, int] | Sequence[int]) -> "CycInt":
        c = [0] * n
        items = counts.items() if isinstance(counts, dict) else enumerate(counts)
        for e, k in items:
            c[e % n] += k
        return cls(n, c)

    def _coerce(self, other) -> "CycInt":
        if isinstance(other, CycInt):
            if other.conductor != self.conductor:
                if other.is_rational():
                    return CycInt(self.conductor, [other.coeffs[0]])
                if self.is_rational():
                    return NotImplemented
                raise ValueError(f"conductor mismatch {self.conductor} vs {other.conductor}; embed first")
            return other
        if isinstance(other, (int, Fraction)):
            return CycInt(self.conductor, [other])
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return other.__radd__(self) if isinstance(other, CycInt) else NotImplemented
        return CycInt(self.conductor, [x + y for x, y in zip(self.coeffs, o.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CycInt(self.conductor, [-x for x in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return other.__rmul__(self) if isinstance(other, CycInt) else NotImplemented
        a, b = self.coeffs, o.coeffs
        prod = [Fraction(0)] * (len(a) + len(b))
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        return CycInt(self.conductor, prod)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return (1 / self) ** (-e)
        result = CycInt(self.conductor, [1])
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def _mult_matrix(self):
        d = len(self.coeffs)
        cols = []
        for i in range(d):
            basis = [0] * d
            basis[i] = 1
            cols.append((self * CycInt(self.conductor, basis)).coeffs)
        return transpose(tuple(cols))

    def inverse(self) -> "CycInt":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        m = self._mult_matrix()
        d = len(self.coeffs)
        rhs = [Fraction(int(i == 0)) for i in range(d)]
        sol = mat_vec(inverse(m), rhs)
        return CycInt(self.conductor, sol)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycInt(self.conductor, [x / other for x in self.coeffs])
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return CycInt(self.conductor, [other]) * self.inverse()

    def galois(self, a: int) -> "CycInt":
        """Apply zeta -> zeta^a (a coprime to the conductor)."""
        if gcd(a, self.conductor) != 1:
            raise ValueError("Galois exponent must be a unit")
        c = [Fraction(0)] * self.conductor
        for i, x in enumerate(self.coeffs):
            c[(i * a) % self.conductor] += x
        return CycInt(self.conductor, c)

    def conj(self) -> "CycInt":
        return self.galois(-1 % self.conductor) if self.conductor > 1 else self

    def embed(self, m: int) -> "CycInt":
        """Same element viewed in Q(zeta_m), m a multiple of the conductor."""
        if m % self.conductor:
            raise ValueError("target conductor must be a multiple")
        step = m // self.conductor
        c = [Fraction(0)] * (step * len(self.coeffs))
        for i, x in enumerate(self.coeffs):
            c[i * step] = x
        return CycInt(m, c)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("element is not rational")
        return self.coeffs[0]

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for x in self.coeffs)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coeffs[0] == other
        if isinstance(other, CycInt):
            if other.conductor != self.conductor:
                return self.is_rational() and other.is_rational() and self.coeffs[0] == other.coeffs[0]
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.coeffs[0]) if self.is_rational() else hash((self.conductor, self.coeffs))
        return self._hash

    def __repr__(self):
        return f"CycInt({self.conductor}, {[str(x) for x in self.coeffs]})"

    def __str__(self):
        return "[" + ",".join(str(x) for x in self.coeffs) + "]"


def cyclotomic_ops(a, b, op: str):
    """Dispatch helper: op in {'add', 'mul', 'conj', 'embed'} (embed: b is the target conductor)."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "conj":
        return a.conj()
    if op == "embed":
        return a.embed(b)
    raise ValueError(f"unknown op {op!r}")


# ---------------------------------------------------------------------------
# characteristic polynomials


class MonicPoly:
    """Polynomial with coefficients stored low degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence):
        c = list(coeffs)
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(_demote(x) if isinstance(x, Fraction) else x for x in c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def monic(self) -> bool:
        return self.coeffs[-1] == 1

    def __eq__(self, other):
        if isinstance(other, MonicPoly):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def evaluate_matrix(self, m: Matrix) -> Matrix:
        n = len(m)
        acc = zeros(n, n)
        for c in reversed(self.coeffs):
            acc = mat_add(mat_mul(acc, m), mat_scale(c, identity(n)))
        return acc

    def __repr__(self):
        return f"MonicPoly({list(self.coeffs)!r})"

    def __str__(self):
        terms = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mono = "" if k == 0 else ("X" if k == 1 else f"X^{k}")
            if isinstance(c, CycInt):
                terms.append(f"+ {c}{mono}")
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            txt = mono if (mag == 1 and mono) else f"{mag}{mono}"
            terms.append(f"{sign} {txt}")
        if not terms:
            return "0"
        s = " ".join(terms)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]


def charpoly(m: Matrix) -> MonicPoly:
    """det(X*I - m) by Berkowitz's division-free algorithm."""
    n = len(m)
    if any(len(r) != n for r in m):
        raise ValueError("charpoly needs a square matrix")
    if n == 0:
        return MonicPoly([1])
    # vect holds coefficients high degree first
    vect = [1, -m[0][0]]
    for r in range(1, n):
        col = [m[i][r] for i in range(r)]
        row = [m[r][j] for j in range(r)]
        a = [[m[i][j] for j in range(r)] for i in range(r)]
        # Toeplitz column: 1, -m_rr, -R C, -R A C, ..., -R A^{r-1} C
        t = [1, -m[r][r]]
        acol = col
        for _ in range(r):
            t.append(-sum((x * y for x, y in zip(row, acol)), 0))
            acol = [sum((a[i][j] * acol[j] for j in range(r)), 0) for i in range(r)]
        new = []
        for i in range(r + 2):
            acc = 0
            for j in range(min(i, r) + 1):
                if i - j < len(t):
                    acc = acc + t[i - j] * vect[j]
            new.append(acc)
        vect = new
    return MonicPoly(list(reversed(vect)))


def is_integral(p: MonicPoly) -> bool:
    """True iff a monic polynomial has coefficients in Z (or Z[zeta])."""
    if not p.monic:
        raise ValueError("is_integral expects a monic polynomial")
    for c in p.coeffs:
        if isinstance(c, CycInt):
            if not c.is_integral():
                return False
        elif isinstance(c, Fraction) and c.denominator != 1:
            return False
    return True


def rational_roots(p: MonicPoly) -> list[int]:
    """Integer roots of a monic integer polynomial (with multiplicity)."""
    coeffs = [int(c) for c in p.coeffs]
    roots = []
    while len(coeffs) > 1:
        c0 = coeffs[0]
        if c0 == 0:
            roots.append(0)
            coeffs = coeffs[1:]
            continue
        found = None
        for d in _divisors(abs(c0)):
            for r in (d, -d):
                if MonicPoly(coeffs)(r) == 0:
                    found = r
                    break
            if found is not None:
                break
        if found is None:
            break
        roots.append(found)
        # synthetic division by (X - found)
        q = [0] * (len(coeffs) - 1)
        acc = 0
        for k in range(len(coeffs) - 1, 0, -1):
            acc = acc * found + coeffs[k]
            q[k - 1] = acc
        coeffs = q
    return sorted(roots)


def _divisors(n: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]
