"""Integrality certificates for Hecke eigenvalues and exhaustive bound checks.

Pipeline: a finite basis of q-expansions, an injective truncation, the
operator matrix on that basis, the saturated integral coefficient lattice,
the operator re-expressed on the lattice, and its characteristic polynomial.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, isqrt
from typing import Callable, Sequence

from .cosets import b_class_shape, v_cosets
from .exact import (
    CapExceeded,
    CycInt,
    Matrix,
    MonicPoly,
    charpoly,
    inverse,
    is_integral,
    mat_mul,
    mat_scale,
    nullspace,
    rank,
)
from .fourier import QExpansion
from .hecke import norm_factor
from .weights import HighestWeight, build_model, rho_matrix


class DependentBasisError(ValueError):
    def __init__(self, vector):
        self.vector = tuple(vector)
        super().__init__(f"basis is linearly dependent: {[str(x) for x in self.vector]}")


class InstabilityError(ValueError):
    def __init__(self, index, form: int):
        self.index = index
        self.form = form
        super().__init__(f"operator image of basis element {form} leaves the span at index {index}")


def _common_indices(basis: Sequence[QExpansion]) -> list:
    keys = set(basis[0].coeffs)
    for f in basis[1:]:
        keys &= set(f.coeffs)
    return sorted(keys)


def _rows(basis: Sequence[QExpansion], idx: list) -> list[list]:
    """Coefficient matrix: one row per basis element, columns (index, component)."""
    return [[x for t in idx for x in f.coeffs[t]] for f in basis]


def injective_truncation(basis: Sequence[QExpansion]) -> int:
    """Smallest N* such that the first N* shared indices separate the basis."""
    if not basis:
        raise ValueError("empty basis")
    idx = _common_indices(basis)
    k = len(basis)
    full = _rows(basis, idx)
    if _rank(full) < k:
        # dependency: left kernel of the coefficient matrix
        dep = nullspace(tuple(tuple(r) for r in _transpose(full)))[0]
        raise DependentBasisError(dep)
    dim = basis[0].dim
    for nstar in range(1, len(idx) + 1):
        sub = [r[: nstar * dim] for r in full]
        if _rank(sub) == k:
            return nstar
    raise AssertionError("unreachable")


def _transpose(m):
    return [list(c) for c in zip(*m)]


def _rank(m) -> int:
    if not m or not m[0]:
        return 0
    if any(isinstance(x, CycInt) for r in m for x in r):
        return len(_independent_columns(_transpose(m)))
    return rank(tuple(tuple(r) for r in m))


def _independent_columns(rows) -> list[int]:
    """Pivot rows of a generic-field matrix given as list of rows (row-reduction)."""
    m = [[x if isinstance(x, CycInt) else Fraction(x) for x in r] for r in rows]
    piv = []
    cols = len(m[0]) if m else 0
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        for i in range(r + 1, len(m)):
            if m[i][c] != 0:
                f = m[i][c] / m[r][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        piv.append(c)
        r += 1
    return piv


def _solve_square(a: list[list], b: list) -> list:
    """Solve x a = b for square invertible a over Q or Q(zeta)."""
    n = len(a)
    # transpose: a^t x^t = b^t
    m = [[a[j][i] for j in range(n)] + [b[i]] for i in range(n)]
    for c in range(n):
        p = next(i for i in range(c, n) if m[i][c] != 0)
        m[c], m[p] = m[p], m[c]
        inv = 1 / m[c][c] if not isinstance(m[c][c], int) else Fraction(1, m[c][c])
        m[c] = [x * inv for x in m[c]]
        for i in range(n):
            if i != c and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return [_clean(m[i][n]) for i in range(n)]


def _clean(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    if isinstance(x, CycInt) and x.is_rational():
        return _clean(x.to_rational())
    return x


def hecke_matrix(basis: Sequence[QExpansion], op: Callable[[QExpansion], QExpansion]) -> Matrix:
    """C with op(f_i) = sum_j C_ij f_j, solved on N* indices and checked on the rest."""
    nstar = injective_truncation(basis)
    images = [op(f) for f in basis]
    idx = _common_indices(basis)
    dim = basis[0].dim
    full = _rows(basis, idx)
    k = len(basis)
    # k coefficient positions among the first N* indices on which the basis is independent
    chosen = _independent_columns([r[: nstar * dim] for r in full])
    square = [[full[i][c] for c in chosen] for i in range(k)]
    C = []
    for i, g in enumerate(images):
        rhs = []
        for c in chosen:
            t = idx[c // dim]
            if not g.has(t):
                raise InstabilityError(t, i)
            rhs.append(g[t][c % dim])
        row = _solve_square(square, rhs)
        # verify on every index known to both the image and the basis
        for t in idx:
            if not g.has(t):
                continue
            pos = idx.index(t)
            for comp in range(dim):
                lhs = sum((row[j] * full[j][pos * dim + comp] for j in range(k)), 0)
                if lhs != g[t][comp]:
                    raise InstabilityError(t, i)
        C.append(tuple(row))
    return tuple(C)


def operator_matrix(rows: Sequence[Sequence], images: Sequence[Sequence]) -> Matrix:
    """C with images[i] = sum_j C_ij rows[j], solved on independent columns and checked on all."""
    k = len(rows)
    if _rank(rows) < k:
        raise DependentBasisError(nullspace(tuple(tuple(r) for r in _transpose(rows)))[0])
    chosen = _independent_columns(rows)
    square = [[rows[i][c] for c in chosen] for i in range(k)]
    C = []
    for i, img in enumerate(images):
        row = _solve_square(square, [img[c] for c in chosen])
        for c in range(len(img)):
            if sum((row[j] * rows[j][c] for j in range(k)), 0) != img[c]:
                raise InstabilityError(c, i)
        C.append(tuple(row))
    return tuple(C)


@dataclass(frozen=True)
class IntegralityCertificate:
    charpoly: MonicPoly
    ring: str
    truncation: int | None
    fingerprint: str
    verdict: bool
    lattice_matrix: Matrix = field(repr=False)
    witness: tuple | None = None
    params: tuple = ()

    def render(self) -> str:
        lines = ["CERTIFICATE 1"]
        for k, v in self.params:
            lines.append(f"{k}: {v}")
        lines.append(f"ring: {self.ring}")
        lines.append(f"truncation: {self.truncation if self.truncation is not None else '-'}")
        lines.append(f"lattice: {self.fingerprint}")
        lines.append("charpoly: " + str(self.charpoly))
        lines.append("coefficients: " + " ".join(_fmt(c) for c in self.charpoly.coeffs))
        if self.witness is not None:
            lines.append("witness: " + " ".join(_fmt(c) for c in self.witness))
        lines.append(f"INTEGRAL: {'yes' if self.verdict else 'no'}")
        return "\n".join(lines) + "\n"


def _fmt(x) -> str:
    if isinstance(x, CycInt):
        return str(x)
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return str(x)


def saturate(coeff_rows: Sequence[Sequence]) -> tuple[Matrix, Matrix]:
    """(P, L): L = P F is a Z-basis of span_Q(F) cap Z^m, F the rational rows."""
    k = len(coeff_rows)
    den = 1
    for r in coeff_rows:
        for x in r:
            den = den * Fraction(x).denominator // _gcd(den, Fraction(x).denominator)
    F = [[int(Fraction(x) * den) for x in r] for r in coeff_rows]
    m = len(F[0])
    if rank(tuple(tuple(r) for r in F)) < k:
        raise DependentBasisError(nullspace(tuple(tuple(r) for r in _transpose(F)))[0])
    u, s, _ = _snf_rect(F)
    P = [[Fraction(den * u[i][j], s[i]) for j in range(k)] for i in range(k)]
    L = [[sum(P[i][j] * Fraction(coeff_rows[j][c]) for j in range(k)) for c in range(m)] for i in range(k)]
    return tuple(tuple(r) for r in P), tuple(tuple(_clean(x) for x in r) for r in L)


def _gcd(a: int, b: int) -> int:
    from math import gcd

    return gcd(a, b)


def _snf_rect(F: list[list[int]]) -> tuple[Matrix, list[int], None]:
    """Row transform U and invariant factors s with U F = diag(s) W, W primitive rows.

    Works by reducing the k x m matrix with row and column operations.
    """
    k, m = len(F), len(F[0])
    a = [list(r) for r in F]
    u = [[int(i == j) for j in range(k)] for i in range(k)]
    for t in range(k):
        while True:
            nz = [(abs(a[i][j]), i, j) for i in range(t, k) for j in range(t, m) if a[i][j]]
            _, i, j = min(nz)
            a[t], a[i] = a[i], a[t]
            u[t], u[i] = u[i], u[t]
            for row in a:
                row[t], row[j] = row[j], row[t]
            piv = a[t][t]
            done = True
            for i in range(t + 1, k):
                q = a[i][t] // piv
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                    u[i] = [x - q * y for x, y in zip(u[i], u[t])]
                if a[i][t]:
                    done = False
            for j in range(t + 1, m):
                q = a[t][j] // piv
                if q:
                    for row in a:
                        row[j] -= q * row[t]
                if a[t][j]:
                    done = False
            if done:
                bad = next(((i, j) for i in range(t + 1, k) for j in range(t + 1, m) if a[i][j] % piv), None)
                if bad is None:
                    break
                a[t] = [x + y for x, y in zip(a[t], a[bad[0]])]
                u[t] = [x + y for x, y in zip(u[t], u[bad[0]])]
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
    return tuple(tuple(r) for r in u), [a[i][i] for i in range(k)], None


def fingerprint(rows) -> str:
    text = ";".join(",".join(_fmt(x) for x in r) for r in rows)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def certify(matrix: Matrix, lattice_basis: Sequence[Sequence] | None = None, ring: str = "Z",
            truncation: int | None = None, params: tuple = ()) -> IntegralityCertificate:
    """Charpoly of the operator on the saturated lattice and the integrality verdict.

    ``matrix`` acts on row vectors of coefficients of the basis: op(f_i) =
    sum_j C_ij f_j.  ``lattice_basis`` gives the coefficient rows of the basis
    forms (defaults to the standard lattice).  Over cyclotomic rings only the
    characteristic polynomial is examined.
    """
    C = tuple(tuple(r) for r in matrix)
    k = len(C)
    cyc = any(isinstance(x, CycInt) for r in C for x in r)
    if lattice_basis is None:
        lattice_basis = [[int(i == j) for j in range(k)] for i in range(k)]
    if cyc or ring.startswith("cyc"):
        CL = C
        lat = tuple(tuple(r) for r in lattice_basis)
    else:
        P, lat = saturate(lattice_basis)
        CL = tuple(tuple(_clean(x) for x in r) for r in mat_mul(mat_mul(P, C), inverse(P)))
    cp = charpoly(CL)
    witness = None
    for i, r in enumerate(CL):
        if any(not _is_int(x) for x in r):
            witness = tuple(lat[i])
            break
    return IntegralityCertificate(cp, ring, truncation, fingerprint(lat), is_integral(cp), CL, witness, params)


def _is_int(x) -> bool:
    if isinstance(x, CycInt):
        return x.is_integral()
    return Fraction(x).denominator == 1


def certify_basis(basis: Sequence[QExpansion], op, params: tuple = ()) -> IntegralityCertificate:
    nstar = injective_truncation(basis)
    C = hecke_matrix(basis, op)
    idx = _common_indices(basis)
    rows = _rows(basis, idx)
    ring = basis[0].ring
    return certify(C, rows, ring, nstar, params)


# ---------------------------------------------------------------------------
# inequality scans


def F_b(n: int, kn: int, a: int, b: int) -> int:
    return (2 * n - a - 2 * b) * kn - n * (n + 1) + b * (a + b + 1)


def F_b0_printed(n: int, kn: int, b: int) -> int:
    """The closed expression printed for F_b(0); differs from F_b(0) by b - k_n."""
    return 2 * (n - b) * kn - (n - b) * (n + b) - (n - b) - kn + b


@dataclass
class ScanReport:
    checked: int = 0
    violations: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_Fb(n: int, kn: int, report: ScanReport | None = None) -> ScanReport:
    rep = report or ScanReport()
    floor = -n * (n - kn + 1)
    for b in range(n + 1):
        vals = {a: F_b(n, kn, a, b) for a in range(n - b + 1)}
        rep.checked += len(vals)
        lo = min(vals.values())
        if kn > n:
            want = (n - b) * (kn - n - 1)
            if lo != want or vals[n - b] != want or want < 0:
                rep.violations.append(("min", n, kn, b, lo, want))
        else:
            if any(v < floor for v in vals.values()):
                rep.violations.append(("floor", n, kn, b, lo, floor))
            if b >= kn:
                if lo != vals[0] or vals[0] < -(n - kn) * (n - kn + 1):
                    rep.violations.append(("b>=kn", n, kn, b, lo, vals[0]))
                if F_b0_printed(n, kn, b) != vals[0]:
                    rep.notes.append(("F_b(0) expression off by b-kn", n, kn, b, vals[0], F_b0_printed(n, kn, b)))
            else:
                want = -(n - b) * (n - kn + 1)
                if lo != vals[n - b] or vals[n - b] != want or want < floor:
                    rep.violations.append(("b<kn", n, kn, b, lo, want))
    return rep


def scan_Fb(max_n: int = 6, max_kn: int = 12) -> ScanReport:
    rep = ScanReport()
    for n in range(1, max_n + 1):
        for kn in range(0, max_kn + 1):
            check_Fb(n, kn, rep)
    return rep


def weight_margins(k) -> list[int]:
    k = HighestWeight(tuple(k)).k
    n = len(k)
    return [k[j - 1] - k[-1] + j - 1 for j in range(1, n + 1)]


def check_weight_exponent(n: int, k, delta: int = 1, p: int = 2, sample: int | None = None) -> ScanReport:
    """Margins k_j - k_n + j - 1 >= 0 and integrality of the normalised single-coset operators.

    For each D of V(p^delta) the matrix
        p^e rho(p^delta D^-1) prod_j (p^delta)^-(n-j+1) d_j^(n-j+1)
    must be integral on the monomial lattice (e the T(p^delta) normalisation).
    """
    rep = ScanReport()
    k = tuple(k)
    if len(k) != n:
        raise ValueError("weight length must equal n")
    m = weight_margins(k)
    rep.checked += len(m)
    if any(x < 0 for x in m):
        rep.violations.append(("margin", k, m))
    if sample == 0:
        return rep
    model = build_model(k)
    e = norm_factor(n, k[-1], "T", delta)
    nu = p**delta
    seen = set()
    for r in v_cosets(n, p, delta, 1):
        if r.D in seen:
            continue
        seen.add(r.D)
        if sample is not None and len(seen) > sample:
            break
        _, d = b_class_shape(r.D)
        scal = Fraction(p**e)
        for j in range(1, n + 1):
            scal *= Fraction(d[j - 1] ** (n - j + 1), nu ** (n - j + 1))
        mat = rho_matrix(model, mat_scale(nu, inverse(r.D)))
        rep.checked += 1
        if any(Fraction(scal * x).denominator != 1 for row in mat for x in row):
            rep.violations.append(("operator", k, r.D))
    return rep


def scan_weight_exponent(max_n: int = 6, max_kn: int = 12, spread: int = 2) -> ScanReport:
    """Margin scan over all weights with k_n <= max_kn and k_1 - k_n <= spread."""
    rep = ScanReport()
    for n in range(1, max_n + 1):
        for kn in range(max_kn + 1):
            for steps in itertools.product(range(spread + 1), repeat=n - 1):
                if sum(steps) > spread:
                    continue
                k = [kn]
                for s in reversed(steps):
                    k.insert(0, k[0] + s)
                sub = check_weight_exponent(n, k, sample=0)
                rep.checked += sub.checked
                rep.violations += sub.violations
    return rep


# ---------------------------------------------------------------------------
# E(M, d)

COUNT_E_CAP = 2_000_000


def count_E(M: int, d: int, cap: int = COUNT_E_CAP) -> tuple[int, int]:
    """(#E(M, d), (16M)^(d^2)); E(M,d) = algebraic integers of degree <= d with all |conjugates| <= M."""
    if M < 1 or d < 1:
        raise ValueError("need M, d >= 1")
    bound = (16 * M) ** (d * d)
    count = 2 * M + 1
    if d >= 2:
        count += 2 * _count_quadratic(M)
    if d >= 3:
        count += _count_higher(M, d, cap)
    if count > bound:
        raise AssertionError(f"#E({M},{d}) = {count} exceeds {bound}")
    return count, bound


def _is_square(x: int) -> bool:
    return x >= 0 and isqrt(x) ** 2 == x


def _count_quadratic(M: int) -> int:
    """Irreducible X^2 + bX + c with both roots of modulus <= M."""
    n = 0
    for b in range(-2 * M, 2 * M + 1):
        for c in range(-M * M, M * M + 1):
            disc = b * b - 4 * c
            if disc < 0:
                ok = c <= M * M
            else:
                if _is_square(disc):
                    continue
                room = 2 * M - abs(b)
                ok = room >= 0 and disc <= room * room
            n += ok
    return n


def _count_higher(M: int, d: int, cap: int) -> int:
    """Degrees 3..d, best effort with sympy irreducibility and numerical root moduli."""
    from sympy import Poly, Symbol

    x = Symbol("x")
    total = 0
    for e in range(3, d + 1):
        ranges = [range(-comb(e, j) * M**j, comb(e, j) * M**j + 1) for j in range(1, e + 1)]
        size = 1
        for r in ranges:
            size *= len(r)
        if size > cap:
            raise CapExceeded(f"count_E enumeration of degree {e} needs {size} polynomials")
        for cs in itertools.product(*ranges):
            poly = Poly([1, *cs], x)
            if not poly.is_irreducible:
                continue
            if all(abs(complex(r)) <= M + 1e-9 for r in poly.nroots(n=30)):
                total += e
    return total
