"""The alternating-horizons class: e2e behaviour that is rich at even horizons and trivial at odd ones."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional

from ..core import Generator
from ..tokens import Bits


def u(m: int, n: int) -> Bits:
    """u_{m,n} = 0^m 1 0^n 1."""
    return Bits.pattern((0, m), (1, 1), (0, n), (1, 1))


def parse_u(x: Bits) -> Optional[tuple[int, int, Bits]]:
    """(m, n, tail) when x = u_{m,n} ∘ tail with m >= 2."""
    runs = x.runs
    if len(runs) < 2 or runs[0][0] != 0 or runs[0][1] < 2 or runs[1][0] != 1:
        return None
    m = runs[0][1]
    if runs[1][1] >= 2:
        n, used = 0, m + 2
    elif len(runs) >= 4 and runs[2][0] == 0 and runs[3][0] == 1:
        n, used = runs[2][1], m + 1 + runs[2][1] + 1
    else:
        return None
    return m, n, x[used:]


@dataclass(frozen=True)
class AlternatingParams:
    alpha: Mapping[tuple[int, int], int] = field(default_factory=dict)
    m_max: int = 3
    n_max: int = 3
    m_min: int = 2

    def __post_init__(self):
        if self.m_min < 2 or self.m_max < self.m_min or self.n_max < 0:
            raise ValueError("window needs 2 <= m_min <= m_max and n_max >= 0")
        for (m, n), v in self.alpha.items():
            if not (self.m_min <= m <= self.m_max and 0 <= n <= self.n_max):
                raise ValueError(f"alpha cell {(m, n)} outside the window")
            if v not in (0, 1):
                raise ValueError("alpha values must be bits")

    def cells(self) -> list[tuple[int, int]]:
        return [(m, n) for m in range(self.m_min, self.m_max + 1) for n in range(self.n_max + 1)]

    def value(self, m: int, n: int) -> int:
        return int(self.alpha.get((m, n), 0))

    def with_alpha(self, bits) -> "AlternatingParams":
        return AlternatingParams(dict(zip(self.cells(), bits)), self.m_max, self.n_max, self.m_min)


def alternating_rule(p: AlternatingParams):
    def rule(x: Bits) -> int:
        parsed = parse_u(x)
        if parsed is None:
            return 0
        m, n, tail = parsed
        if not tail:
            return p.value(m, n)
        b, rest = tail[0], tail[1:]
        if not rest.is_constant(0):
            return 0
        t = len(rest)
        if t < 2 * m - 2:
            return 0
        if t == 2 * m - 2:
            return b
        return 0

    return rule


def alternating_member(p: AlternatingParams) -> Generator:
    tag = "".join(str(p.value(m, n)) for m, n in p.cells())
    return Generator(alternating_rule(p), f"alt[{tag}]")


def all_alphas(p: AlternatingParams) -> Iterator[AlternatingParams]:
    for bits in itertools.product((0, 1), repeat=len(p.cells())):
        yield p.with_alpha(bits)


def special_instances(p: AlternatingParams) -> list[Bits]:
    """Every u_{m,n} in the window and every u_{m,n} b 0^t with t <= 2m - 2."""
    out = []
    for m, n in p.cells():
        base = u(m, n)
        out.append(base)
        for b in (0, 1):
            for t in range(2 * m - 1):
                out.append(base + Bits.pattern((b, 1), (0, t)))
    return out
