"""Autoregressive linear threshold generators, the latch embedding and LTF enumeration."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from ..core import Generator
from ..tokens import Bits, all_strings


def _q(v) -> Fraction:
    if isinstance(v, float):
        raise TypeError("use exact rationals (int, Fraction or str), not float")
    return Fraction(v)


@dataclass(frozen=True)
class LinearGen:
    """f_{w,b}(x) = 1[sum_{i <= min(d,|x|)} w[-i] x[-i] + b >= 0]."""

    w: tuple
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "w", tuple(_q(v) for v in self.w))
        object.__setattr__(self, "b", _q(self.b))
        if len(self.w) < 1:
            raise ValueError("d must be >= 1")

    @property
    def d(self) -> int:
        return len(self.w)

    def score(self, x) -> Fraction:
        x = Bits.of(x)
        window = x.suffix(self.d)
        ws = self.w[self.d - len(window) :]
        return sum((wi for wi, xi in zip(ws, window) if xi), Fraction(0)) + self.b

    def __call__(self, x) -> int:
        return int(self.score(x) >= 0)

    def generator(self) -> Generator:
        name = "lin[w=(" + ",".join(map(str, self.w)) + f"),b={self.b}]"
        return Generator(self, name)


def linear_eval(g: LinearGen, x) -> int:
    return g(x)


@dataclass(frozen=True)
class LatchEmbedding:
    inner: LinearGen
    outer: LinearGen
    L: Fraction
    U: Fraction
    A: Fraction
    B: Fraction


def latch_constants(v: Sequence, c) -> LatchEmbedding:
    inner = LinearGen(tuple(v), c)
    scores = [inner.score(z) for z in all_strings(inner.d)]
    L, U = min(scores), max(scores)
    B = max(Fraction(0), U) + 1
    A = B - L + 1
    outer = LinearGen(tuple(inner.w) + (B, 2 * A), inner.b - B)
    return LatchEmbedding(inner, outer, L, U, A, B)


def latch_embed(v: Sequence, c) -> LinearGen:
    """f_{w,b} on d = m+2 with e2e(f_{w,b}, z 1 0, M) = f_{v,c}(z) for every M >= 2."""
    return latch_constants(v, c).outer


def latch_instance(z) -> Bits:
    return Bits.of(z) + "10"


# --------------------------------------------------------------------------
# threshold functions on the cube


def cube(d: int) -> np.ndarray:
    """Rows are the points of {0,1}^d in ``all_strings`` order."""
    return np.array([[int(c) for c in str(s)] for s in all_strings(d)], dtype=np.int64).reshape(2**d, d)


def threshold_truth_tables(d: int, weight_bound: int = 3) -> dict[tuple, tuple[tuple, int]]:
    """Distinct truth tables of 1[<w,z> + b >= 0] over an integer grid, with one representative each."""
    if d < 1:
        raise ValueError("d must be >= 1")
    pts = cube(d)
    W = weight_bound
    reps: dict[tuple, tuple[tuple, int]] = {}
    weights = np.array(list(itertools.product(range(-W, W + 1), repeat=d)), dtype=np.int64)
    dots = weights @ pts.T  # (n_w, 2^d)
    for b in range(-d * W - 1, d * W + 1):
        tables = (dots + b >= 0).astype(np.uint8)
        for i, row in enumerate(tables):
            key = tuple(int(v) for v in row)
            if key not in reps:
                reps[key] = (tuple(int(v) for v in weights[i]), b)
    return reps


def ltf_representatives(d: int, weight_bound: int = 3) -> list[LinearGen]:
    tables = threshold_truth_tables(d, weight_bound)
    return [LinearGen(w, b) for _, (w, b) in sorted(tables.items())]


def is_threshold_function(table: Sequence[int], d: int) -> bool:
    """Linear-programming separability test with margin 1 (scale-free for finite point sets)."""
    from scipy.optimize import linprog

    pts = cube(d).astype(float)
    # variables (w, b); need <w,z> + b >= 0 on ones and <= -1 on zeros
    A, rhs = [], []
    for z, y in zip(pts, table):
        if y:
            A.append(np.concatenate([-z, [-1.0]]))
            rhs.append(0.0)
        else:
            A.append(np.concatenate([z, [1.0]]))
            rhs.append(-1.0)
    res = linprog(np.zeros(d + 1), A_ub=np.array(A), b_ub=np.array(rhs), bounds=[(None, None)] * (d + 1))
    return res.status == 0


def all_boolean_functions(d: int) -> Iterable[tuple]:
    return itertools.product((0, 1), repeat=2**d)
