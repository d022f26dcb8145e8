"""Tensor model of the GL_n representation with highest weight (k_1, ..., k_n).

The model is  Sym^{k1-k2}(C^n) (x) Sym^{k2-k3}(L^2 C^n) (x) ... (x) det^{k_n},
with the monomial basis of each symmetric power ordered lexicographically.
For n <= 2 it is irreducible; for n >= 3 it may strictly contain the
irreducible representation (flagged by ``TensorModel.irreducible``).
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

from .exact import CapExceeded, Matrix, det, identity, mat_vec

DEFAULT_DIMENSION_CAP = 10000


class DimensionCapError(CapExceeded, ValueError):
    pass


@dataclass(frozen=True)
class HighestWeight:
    k: tuple[int, ...]

    def __post_init__(self):
        k = tuple(int(x) for x in self.k)
        object.__setattr__(self, "k", k)
        if not k:
            raise ValueError("empty weight")
        if any(a < b for a, b in zip(k, k[1:])):
            raise ValueError(f"weight {k} is not weakly decreasing")
        if k[-1] < 0:
            raise ValueError("k_n must be non-negative")

    @property
    def n(self) -> int:
        return len(self.k)

    @property
    def is_scalar(self) -> bool:
        return len(set(self.k)) == 1


def model_dimension(k) -> int:
    n = len(k)
    dim = 1
    for i in range(1, n):
        dim *= comb(comb(n, i) + k[i - 1] - k[i] - 1, k[i - 1] - k[i])
    return dim


@dataclass(frozen=True)
class TensorModel:
    hw: HighestWeight
    factors: tuple[tuple[int, int], ...]  # (exterior degree i, symmetric power m)
    basis: tuple[tuple, ...] = field(repr=False)
    weights: tuple[tuple[int, ...], ...] = field(repr=False)
    irreducible: bool = True

    @property
    def n(self) -> int:
        return self.hw.n

    @property
    def dim(self) -> int:
        return len(self.basis)


def _subsets(n: int, i: int) -> list[tuple[int, ...]]:
    return list(itertools.combinations(range(n), i))


def _monomials(r: int, m: int) -> list[tuple[int, ...]]:
    return list(itertools.combinations_with_replacement(range(r), m))


def build_model(hw: HighestWeight | tuple, cap: int = DEFAULT_DIMENSION_CAP) -> TensorModel:
    if not isinstance(hw, HighestWeight):
        hw = HighestWeight(tuple(hw))
    return _build_model(hw, cap)


@lru_cache(maxsize=None)
def _build_model(hw: HighestWeight, cap: int) -> TensorModel:
    n, k = hw.n, hw.k
    dim = model_dimension(k)
    if dim > cap:
        raise DimensionCapError(f"model dimension {dim} exceeds cap {cap}")
    factors = tuple((i, k[i - 1] - k[i]) for i in range(1, n) if k[i - 1] - k[i] > 0)
    per_factor = []
    for i, m in factors:
        subs = _subsets(n, i)
        per_factor.append([(i, mono) for mono in _monomials(len(subs), m)])
    basis = tuple(itertools.product(*per_factor)) if per_factor else ((),)
    weights = []
    for vec in basis:
        w = [k[-1]] * n
        for i, mono in vec:
            subs = _subsets(n, i)
            for idx in mono:
                for j in subs[idx]:
                    w[j] += 1
        weights.append(tuple(w))
    irreducible = len(factors) <= 1 and all(i in (1, n - 1) for i, _ in factors)
    return TensorModel(hw, factors, basis, tuple(weights), irreducible)


def weight_list(model: TensorModel) -> list[tuple[tuple[int, ...], int]]:
    counts = Counter(model.weights)
    out = sorted(counts.items(), reverse=True)
    lowest = min(min(mu) for mu in model.weights)
    # every weight component is at least k_n
    assert lowest >= model.hw.k[-1], (lowest, model.hw.k)
    return out


def _compound(g: Matrix, i: int) -> list[list]:
    n = len(g)
    subs = _subsets(n, i)
    return [[det(tuple(tuple(g[r][c] for c in J) for r in I)) for J in subs] for I in subs]


def _sym_power(a: list[list], m: int) -> list[list]:
    r = len(a)
    monos = _monomials(r, m)
    index = {mono: t for t, mono in enumerate(monos)}
    out = [[0] * len(monos) for _ in monos]
    for col, mono in enumerate(monos):
        poly = {(): 1}
        for s in mono:
            nxt: dict = {}
            for key, c in poly.items():
                for t in range(r):
                    x = a[t][s]
                    if x:
                        nk = tuple(sorted(key + (t,)))
                        nxt[nk] = nxt.get(nk, 0) + c * x
            poly = nxt
        for key, c in poly.items():
            out[index[key]][col] += c
    return out


def _kron(a: list[list], b: list[list]) -> list[list]:
    return [[x * y for x in ra for y in rb] for ra in a for rb in b]


def rho_matrix(model: TensorModel, g: Matrix) -> Matrix:
    """Matrix of rho(g) in the monomial basis (entries int or Fraction)."""
    g = tuple(tuple(r) for r in g)
    if len(g) != model.n:
        raise ValueError("matrix size does not match the model")
    return _rho_matrix(model.hw, g)


@lru_cache(maxsize=4096)
def _rho_matrix(hw: HighestWeight, g: Matrix) -> Matrix:
    d = det(g)
    if d == 0:
        raise ValueError("rho of a singular matrix")
    model = build_model(hw)
    result = [[1]]
    for i, m in model.factors:
        result = _kron(result, _sym_power(_compound(g, i), m))
    scal = Fraction(d) ** hw.k[-1]
    if scal.denominator == 1:
        scal = scal.numerator
    return tuple(tuple(_clean(scal * x) for x in r) for r in result)


def _clean(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def rho_apply(model: TensorModel, g: Matrix, v) -> tuple:
    if len(v) != model.dim:
        raise ValueError("vector length does not match the model dimension")
    return tuple(_clean(x) for x in mat_vec(rho_matrix(model, g), v))


def lowest_weight_attained(model: TensorModel) -> bool:
    kn = model.hw.k[-1]
    return any(kn in mu for mu in model.weights)


def identity_action(model: TensorModel) -> Matrix:
    return identity(model.dim)
