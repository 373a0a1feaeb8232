"""The random hard class over Z = {0^i : i in [M^2]} and its green/red branch rules."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .. import rng
from ..core import Generator
from ..dims import FiniteClassTable
from ..tokens import Bits
from .rules import Atom, Const, Or, And, Rule, conj, disj, prefix_path_rule

DEFAULT_BUDGET = 50_000_000


class BudgetError(RuntimeError):
    pass


@dataclass(frozen=True)
class HardClassParams:
    d: int = 1
    M: int = 8
    N: Optional[int] = None
    minority_prob: Optional[Fraction] = None
    seed: int = 0
    budget: int = DEFAULT_BUDGET

    @property
    def size(self) -> int:
        if self.N is not None:
            return self.N
        return min(self.M ** (10 * self.d), self.budget // (self.M * self.M))

    @property
    def p(self) -> Fraction:
        return Fraction(1, self.M) if self.minority_prob is None else Fraction(self.minority_prob)

    def in_Z(self, x: Bits) -> bool:
        return 1 <= len(x) <= self.M**2 and x.is_constant(0)

    def in_Z1(self, x: Bits) -> bool:
        return self.in_Z(x) and len(x) % self.M == 0

    def majority(self, x: Bits) -> int:
        """Majority label of an instance of Z (1 on Z_1, 0 on Z_0)."""
        return 1 if self.in_Z1(x) else 0

    def p_one(self, x: Bits) -> Fraction:
        """Pr[f(x) = 1] for a freshly drawn member."""
        if not self.in_Z(x):
            return Fraction(0)
        return 1 - self.p if self.in_Z1(x) else self.p


def x_j(j: int, M: int) -> Bits:
    """x^(j) = 0^{(j-1)M + 1}."""
    return Bits.zeros((j - 1) * M + 1)


def green_red_branches(j: int, M: int) -> tuple[Bits, list[Bits]]:
    """Green 0^{M-1} 1 and reds 0^{q-1} 1 0^{M-q} for q in [M-1]."""
    if M < 2:
        raise ValueError("M must be >= 2")
    green = Bits.pattern((0, M - 1), (1, 1))
    reds = [Bits.pattern((0, q - 1), (1, 1), (0, M - q)) for q in range(1, M)]
    return green, reds


def green_rule(j: int, M: int) -> Rule:
    green, _ = green_red_branches(j, M)
    return prefix_path_rule(x_j(j, M), green, M)


def red_rule(j: int, M: int) -> Rule:
    _, reds = green_red_branches(j, M)
    return disj(prefix_path_rule(x_j(j, M), r, M) for r in reds)


def version_rule(u: Sequence[int], M: int) -> Rule:
    """Q_u: green at x^(j) where u_j = 1 and some red where u_j = 0."""
    return conj(green_rule(j, M) if b else red_rule(j, M) for j, b in enumerate(u, start=1))


def branch_probability(params: HardClassParams, branch: Bits, j: int) -> Fraction:
    """Closed-form product probability that a member follows ``branch`` from x^(j)."""
    out = Fraction(1)
    cur = x_j(j, params.M)
    for y in branch:
        q = params.p_one(cur)
        out *= q if y == 1 else 1 - q
        cur = cur.append(y)
    return out


@dataclass
class HardClassSample:
    params: HardClassParams
    labels: np.ndarray  # (N, M^2); column i-1 is the label of 0^i

    @property
    def N(self) -> int:
        return self.labels.shape[0]

    def label(self, a: int, x) -> int:
        x = Bits.of(x)
        if not self.params.in_Z(x):
            return 0
        return int(self.labels[a, len(x) - 1])

    def member(self, a: int) -> Generator:
        row = self.labels[a].copy()
        in_Z = self.params.in_Z
        M = self.params.M
        domain = frozenset(Bits.zeros(i) for i in range(1, M * M + 1))
        return Generator(lambda x: int(row[len(x) - 1]) if in_Z(x) else 0, f"hard[{a}]", domain=domain)

    def generators(self, limit: Optional[int] = None) -> list[Generator]:
        n = self.N if limit is None else min(limit, self.N)
        return [self.member(a) for a in range(n)]

    def table(self, pool: Optional[Iterable] = None, budget: int = 2_000_000) -> FiniteClassTable:
        pool = [Bits.zeros(i) for i in range(1, self.params.M**2 + 1)] if pool is None else [Bits.of(x) for x in pool]
        if self.N * len(pool) > budget:
            raise BudgetError(f"table of {self.N} x {len(pool)} exceeds budget {budget}")
        cols = [self.column(x) for x in pool]
        rows = [tuple(int(c[a]) for c in cols) for a in range(self.N)]
        return FiniteClassTable(pool, [f"hard[{a}]" for a in range(self.N)], rows)

    def column(self, x) -> np.ndarray:
        x = Bits.of(x)
        if not self.params.in_Z(x):
            return np.zeros(self.N, dtype=np.uint8)
        return self.labels[:, len(x) - 1]

    def satisfies(self, rule: Rule) -> np.ndarray:
        """Boolean mask of members satisfying ``rule``."""
        if isinstance(rule, Const):
            return np.full(self.N, rule.value)
        if isinstance(rule, Atom):
            return self.column(rule.x) == rule.y
        parts = [self.satisfies(c) for c in rule.children]
        if isinstance(rule, And):
            return np.logical_and.reduce(parts)
        if isinstance(rule, Or):
            return np.logical_or.reduce(parts)
        raise TypeError(rule)

    def count(self, rule: Rule) -> int:
        return int(self.satisfies(rule).sum())

    def e2e_column(self, j: int) -> np.ndarray:
        """e2e-M output at x^(j) per member: 1 iff the green branch is followed."""
        M = self.params.M
        start = (j - 1) * M  # column of x^(j)
        if start + M > M * M:
            raise ValueError(f"x^({j}) walk leaves Z")
        block = self.labels[:, start : start + M]
        return ((block[:, : M - 1] == 0).all(axis=1) & (block[:, M - 1] == 1)).astype(np.uint8)

    def to_csv(self, path, limit: Optional[int] = None) -> None:
        n = self.N if limit is None else min(limit, self.N)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["member_id", "instance", "label"])
            for a in range(n):
                for i in range(1, self.params.M**2 + 1):
                    w.writerow([a, "0" * i, int(self.labels[a, i - 1])])


_TAG = rng.stream_tag("hard-class")


def hard_class_sample(params: HardClassParams) -> HardClassSample:
    """Draw every (member, instance) label from its own counter-derived uniform."""
    M, N = params.M, params.size
    width = M * M
    if N * width > params.budget:
        raise BudgetError(f"N * |Z| = {N * width} exceeds budget {params.budget}")
    p = float(params.p)
    labels = np.empty((N, width), dtype=np.uint8)
    cols = np.arange(width)
    z1 = (cols + 1) % M == 0
    chunk = max(1, 2_000_000 // width)
    for lo in range(0, N, chunk):
        rows = np.arange(lo, min(N, lo + chunk))
        u = rng.uniforms(params.seed, _TAG, rows[:, None], cols[None, :])
        minority = u < p
        # minority label is 0 on Z_1 and 1 on Z_0
        labels[lo : lo + len(rows)] = np.where(z1[None, :], ~minority, minority)
    return HardClassSample(params, labels)


def preregistered_rules(M: int, m: int = 2) -> list[tuple[str, Rule]]:
    """Version rules Q_u (|u| <= m) and branch rules Q_u ∧ P_t(x^(|u|+1), b)."""
    out: list[tuple[str, Rule]] = []
    labelings: list[tuple[int, ...]] = [()]
    for t in range(1, m + 1):
        labelings += [tuple((i >> (t - 1 - s)) & 1 for s in range(t)) for i in range(2**t)]
    for u in labelings:
        if u:
            out.append((f"Q[{''.join(map(str, u))}]", version_rule(u, M)))
    for u in labelings:
        if len(u) >= m:
            continue
        j = len(u) + 1
        green, reds = green_red_branches(j, M)
        tag = "".join(map(str, u)) or "∅"
        for name, b in [("green", green)] + [(f"red{q}", r) for q, r in enumerate(reds, start=1)]:
            out.append((f"Q[{tag}]∧P_{M}(x{j},{name})", version_rule(u, M) & prefix_path_rule(x_j(j, M), b, M)))
    green, reds = green_red_branches(1, M)
    for t in (1, M // 2):
        out.append((f"P_{t}(x1,green)", prefix_path_rule(x_j(1, M), green, t)))
    for t in (2, 3):
        out.append((f"P_{t}(x1,red3)", prefix_path_rule(x_j(1, M), reds[2], t)))
    return out
