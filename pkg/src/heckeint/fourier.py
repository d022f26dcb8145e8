"""Fourier-coefficient indices (half-integral matrices) and q-expansion containers.

An index T is stored through the integer matrix G = 2T (symmetric, even
diagonal).  Keys are the upper-triangular entries of G read row by row;
the canonical total order on indices is the lexicographic order on keys.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping

from .characters import DirichletChar, format_chi, parse_chi
from .exact import CycInt, Matrix, det, identity, mat_mul, transpose
from .weights import HighestWeight, model_dimension

MAX_DEGREE = 3


@dataclass(frozen=True, order=True)
class HalfIntMat:
    key: tuple[int, ...]
    n: int = field(compare=False)

    @classmethod
    def from_gram(cls, g: Matrix, check: bool = True) -> "HalfIntMat":
        n = len(g)
        if check:
            if any(g[i][j] != g[j][i] for i in range(n) for j in range(n)):
                raise ValueError("G is not symmetric")
            if any(g[i][i] % 2 for i in range(n)):
                raise ValueError("G has an odd diagonal entry")
            if not is_psd(g):
                raise ValueError("G is not positive semi-definite")
        return cls(tuple(int(g[i][j]) for i in range(n) for j in range(i, n)), n)

    @classmethod
    def from_key(cls, n: int, key) -> "HalfIntMat":
        return cls.from_gram(_gram_from_key(n, tuple(key)))

    @classmethod
    def zero(cls, n: int) -> "HalfIntMat":
        return cls((0,) * (n * (n + 1) // 2), n)

    @property
    def gram(self) -> Matrix:
        return _gram_from_key(self.n, self.key)

    @property
    def trace(self) -> int:
        g = self.gram
        return sum(g[i][i] for i in range(self.n)) // 2

    @property
    def T(self) -> Matrix:
        g = self.gram
        return tuple(tuple(Fraction(x, 2) for x in r) for r in g)

    def rank(self) -> int:
        from .exact import rank

        return rank(self.gram)

    def __repr__(self):
        return f"HalfIntMat(G={[list(r) for r in self.gram]})"


def _gram_from_key(n: int, key: tuple) -> Matrix:
    if len(key) != n * (n + 1) // 2:
        raise ValueError("key length does not match n")
    g = [[0] * n for _ in range(n)]
    it = iter(key)
    for i in range(n):
        for j in range(i, n):
            g[i][j] = g[j][i] = next(it)
    return tuple(tuple(r) for r in g)


def is_psd(g: Matrix) -> bool:
    """Exact test: every principal minor is non-negative."""
    n = len(g)
    for size in range(1, n + 1):
        for idx in itertools.combinations(range(n), size):
            if det(tuple(tuple(g[i][j] for j in idx) for i in idx)) < 0:
                return False
    return True


def enumerate_indices(n: int, theta: int) -> list[HalfIntMat]:
    """All T in A_n with tr(T) <= theta, in canonical (lexicographic key) order."""
    if n < 1 or n > MAX_DEGREE:
        raise ValueError(f"degree n={n} outside the supported range 1..{MAX_DEGREE}")
    if theta < 0:
        return []
    out = []
    for diag_t in itertools.product(range(theta + 1), repeat=n):
        if sum(diag_t) > theta:
            continue
        dg = [2 * t for t in diag_t]
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        ranges = []
        for i, j in pairs:
            b = _isqrt(dg[i] * dg[j])
            ranges.append(range(-b, b + 1))
        for offs in itertools.product(*ranges):
            g = [[0] * n for _ in range(n)]
            for i in range(n):
                g[i][i] = dg[i]
            for (i, j), v in zip(pairs, offs):
                g[i][j] = g[j][i] = v
            g = tuple(tuple(r) for r in g)
            if is_psd(g):
                out.append(HalfIntMat.from_gram(g, check=False))
    out.sort()
    return out


def _isqrt(x: int) -> int:
    from math import isqrt

    return isqrt(x)


def transform_index(t: HalfIntMat, d: Matrix, p: int, delta: int) -> HalfIntMat | None:
    """S = p^-delta D T D^t if that lies in A_n, else None."""
    g = mat_mul(mat_mul(d, t.gram), transpose(d))
    q = p**delta
    n = t.n
    if any(x % q for r in g for x in r):
        return None
    s = tuple(tuple(x // q for x in r) for r in g)
    if any(s[i][i] % 2 for i in range(n)):
        return None
    if not is_psd(s):
        return None
    return HalfIntMat.from_gram(s, check=False)


def _content(*xs: int) -> int:
    c = 0
    for x in xs:
        c = gcd(c, x)
    return c


def reduce_binary(t: HalfIntMat) -> tuple[HalfIntMat, Matrix]:
    """GL_2(Z)-reduced representative of a binary index and U with U T U^t = it.

    Positive definite: form (a, b, c) = (t11, 2 t12, t22) with 0 <= b <= a <= c.
    Rank 1: m * diag(1, 0) with m the content of the form.  Rank 0: 0.
    """
    if t.n != 2:
        raise ValueError("reduce_binary needs n = 2")
    g = t.gram
    a, b, c = g[0][0] // 2, g[0][1], g[1][1] // 2
    if a == b == c == 0:
        return t, identity(2)
    if 4 * a * c - b * b == 0:
        m = _content(a, b, c)
        # form = m (r x + s y)^2; find (r, s) with gcd 1
        if a:
            r = _isqrt(a // m)
            s = _isqrt(c // m)
            if b < 0:
                s = -s
        else:
            r, s = 0, 1
        # U maps (r, s)^t -> e1; rows of U: (u1, u2) with u1 r + u2 s = 1
        x, y = _bezout(r, s)
        u = ((x, y), (-s, r))
        res = HalfIntMat.from_gram(((2 * m, 0), (0, 0)), check=False)
        assert _congruent(t, u) == res.gram
        return res, u
    u = [[1, 0], [0, 1]]
    while True:
        if a > c:
            a, c = c, a
            b = -b
            u = [u[1], [-u[0][0], -u[0][1]]]
            continue
        if abs(b) > a:
            q = (b + a) // (2 * a)  # round b / 2a
            # y -> y - q x on the second basis vector
            c = c - q * b + q * q * a
            b = b - 2 * q * a
            u = [u[0], [u[1][0] - q * u[0][0], u[1][1] - q * u[0][1]]]
            continue
        break
    if b < 0:
        b = -b
        u = [u[0], [-u[1][0], -u[1][1]]]
    if a == c and b < 0:
        b = -b
    res = HalfIntMat.from_gram(((2 * a, b), (b, 2 * c)), check=False)
    umat = tuple(tuple(r) for r in u)
    assert _congruent(t, umat) == res.gram, (t, umat, res)
    return res, umat


def _congruent(t: HalfIntMat, u: Matrix) -> Matrix:
    return mat_mul(mat_mul(u, t.gram), transpose(u))


def _bezout(r: int, s: int) -> tuple[int, int]:
    old_r, rr = r, s
    old_x, x = 1, 0
    old_y, y = 0, 1
    while rr:
        q = old_r // rr
        old_r, rr = rr, old_r - q * rr
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r < 0:
        old_x, old_y = -old_x, -old_y
    return old_x, old_y


def canonical(t: HalfIntMat, mode: str) -> HalfIntMat:
    if mode == "class" and t.n == 2:
        return reduce_binary(t)[0]
    return t


# ---------------------------------------------------------------------------
# q-expansion container


class MissingIndicesError(KeyError):
    def __init__(self, missing: Iterable[HalfIntMat]):
        self.missing = sorted(set(missing))
        super().__init__(f"{len(self.missing)} required indices missing: {[m.key for m in self.missing]}")


@dataclass(frozen=True)
class QExpansion:
    n: int
    level: int
    weight: tuple[int, ...]
    chi: tuple[DirichletChar, ...]
    ring: str
    coeffs: Mapping[HalfIntMat, tuple]
    mode: str = "explicit"

    def __post_init__(self):
        object.__setattr__(self, "weight", tuple(self.weight))
        if len(self.weight) != self.n:
            raise ValueError("weight length must equal n")
        HighestWeight(self.weight)
        if self.mode not in ("explicit", "class"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "class":
            k = self.weight
            if self.level != 1 or len(set(k)) != 1 or k[0] % 2 or self.n > 2:
                raise ValueError("class mode needs level 1, even scalar weight and n <= 2")
        if len(self.chi) != self.n:
            raise ValueError("chi needs one component per j")
        dim = model_dimension(self.weight)
        clean = {}
        for key in sorted(self.coeffs):
            v = tuple(self.coeffs[key])
            if key.n != self.n:
                raise ValueError("index degree mismatch")
            if len(v) != dim:
                raise ValueError(f"coefficient vector has length {len(v)}, expected {dim}")
            if self.mode == "class" and canonical(key, "class") != key:
                raise ValueError(f"{key} is not a class representative")
            clean[key] = v
        object.__setattr__(self, "coeffs", clean)

    @property
    def dim(self) -> int:
        return model_dimension(self.weight)

    def support(self) -> list[HalfIntMat]:
        return list(self.coeffs)

    def has(self, t: HalfIntMat) -> bool:
        return canonical(t, self.mode) in self.coeffs

    def __getitem__(self, t: HalfIntMat) -> tuple:
        return self.coeffs[canonical(t, self.mode)]

    def get(self, t: HalfIntMat, default=None):
        return self.coeffs.get(canonical(t, self.mode), default)

    def replace(self, **kw) -> "QExpansion":
        fields = dict(n=self.n, level=self.level, weight=self.weight, chi=self.chi, ring=self.ring,
                      coeffs=self.coeffs, mode=self.mode)
        fields.update(kw)
        return QExpansion(**fields)

    def scalar_series(self) -> dict[int, object]:
        """n = 1, dim 1 convenience view: {m: a(m)}."""
        return {t.key[0] // 2: v[0] for t, v in self.coeffs.items()}


def trivial_chi(n: int, level: int) -> tuple[DirichletChar, ...]:
    return tuple(DirichletChar.trivial(level) for _ in range(n))


def series_from_scalars(values: Mapping[int, object], weight: int, ring: str = "Z") -> QExpansion:
    coeffs = {HalfIntMat((2 * m,), 1): (v,) for m, v in values.items()}
    return QExpansion(1, 1, (weight,), trivial_chi(1, 1), ring, coeffs)


# ---------------------------------------------------------------------------
# QEXP text format


class QExpParseError(ValueError):
    def __init__(self, line: int, msg: str):
        self.line = line
        super().__init__(f"line {line}: {msg}")


HEADER_KEYS = ("n", "N", "weight", "chi", "ring", "mode")


def format_coeff(x) -> str:
    if isinstance(x, CycInt):
        return "[" + ",".join(str(c) for c in x.coeffs) + "]"
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return str(int(x))


def _parse_coeff(text: str, ring: str):
    text = text.strip()
    if ring == "Z":
        return int(text)
    if ring == "Q":
        f = Fraction(text)
        return f.numerator if f.denominator == 1 else f
    if ring.startswith("cyc:"):
        m = int(ring[4:])
        if not (text.startswith("[") and text.endswith("]")):
            f = Fraction(text)
            return CycInt(m, [f])
        return CycInt(m, [Fraction(x) for x in text[1:-1].split(",") if x.strip()])
    raise ValueError(f"unknown ring {ring!r}")


def _split_coeffs(text: str) -> list[str]:
    out, depth, cur = [], 0, ""
    for ch in text:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "," and depth == 0:
            out.append(cur)
            cur = ""
        else:
            cur += ch
    if cur.strip():
        out.append(cur)
    return out


def _check_ring(ring: str):
    if ring in ("Z", "Q"):
        return
    if ring.startswith("cyc:") and ring[4:].isdigit() and int(ring[4:]) >= 1:
        return
    raise ValueError(f"unknown ring {ring!r}")


def parse_qexp(text: str) -> QExpansion:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines = lines[:-1]
    if not lines or lines[0].strip() != "QEXP 1":
        raise QExpParseError(1, "expected 'QEXP 1'")
    if len(lines) < 2:
        raise QExpParseError(2, "missing parameter line")
    params = {}
    for tok in lines[1].split():
        if "=" not in tok:
            raise QExpParseError(2, f"malformed header token {tok!r}")
        k, v = tok.split("=", 1)
        if k not in HEADER_KEYS:
            raise QExpParseError(2, f"unknown header key {k!r}")
        if k in params:
            raise QExpParseError(2, f"duplicate header key {k!r}")
        params[k] = v
    missing = [k for k in HEADER_KEYS if k not in params]
    if missing:
        raise QExpParseError(2, f"missing header keys {missing}")
    try:
        n = int(params["n"])
        level = int(params["N"])
        weight = tuple(int(x) for x in params["weight"].split(","))
        chi = parse_chi(params["chi"], level, n)
        ring = params["ring"]
        _check_ring(ring)
        mode = params["mode"]
        if n < 1 or n > MAX_DEGREE or level < 1:
            raise ValueError("n or N out of range")
        dim = model_dimension(weight)
    except ValueError as exc:
        raise QExpParseError(2, str(exc)) from None
    coeffs = {}
    prev = None
    width = n * (n + 1) // 2
    for lineno, line in enumerate(lines[2:], start=3):
        if not line.strip():
            raise QExpParseError(lineno, "blank line")
        if ":" not in line:
            raise QExpParseError(lineno, "missing ':'")
        left, right = line.split(":", 1)
        try:
            key = tuple(int(x) for x in left.split())
        except ValueError:
            raise QExpParseError(lineno, "non-integer index entry") from None
        if len(key) != width:
            raise QExpParseError(lineno, f"index needs {width} entries")
        g = _gram_from_key(n, key)
        if any(g[i][i] % 2 for i in range(n)):
            raise QExpParseError(lineno, "odd diagonal entry in G")
        if not is_psd(g):
            raise QExpParseError(lineno, "index is not positive semi-definite")
        t = HalfIntMat(key, n)
        if prev is not None and not prev < t:
            raise QExpParseError(lineno, "indices not strictly increasing")
        prev = t
        parts = _split_coeffs(right)
        if len(parts) != dim:
            raise QExpParseError(lineno, f"coefficient arity {len(parts)} != {dim}")
        try:
            coeffs[t] = tuple(_parse_coeff(x, ring) for x in parts)
        except (ValueError, ZeroDivisionError) as exc:
            raise QExpParseError(lineno, f"bad coefficient: {exc}") from None
        if mode == "class" and canonical(t, "class") != t:
            raise QExpParseError(lineno, "index is not a class representative")
    try:
        return QExpansion(n, level, weight, chi, ring, coeffs, mode)
    except ValueError as exc:
        raise QExpParseError(2, str(exc)) from None


def write_qexp(f: QExpansion) -> str:
    out = ["QEXP 1"]
    out.append(
        f"n={f.n} N={f.level} weight={','.join(map(str, f.weight))} chi={format_chi(f.chi)} "
        f"ring={f.ring} mode={f.mode}"
    )
    for t in sorted(f.coeffs):
        out.append(" ".join(map(str, t.key)) + " : " + ",".join(format_coeff(x) for x in f.coeffs[t]))
    return "\n".join(out) + "\n"


def normalize_qexp(text: str) -> str:
    return write_qexp(parse_qexp(text))
