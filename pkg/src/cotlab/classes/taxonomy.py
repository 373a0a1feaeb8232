"""The taxonomy class: a single-point perturbation family of one baseline generator.

Every member f_{s,k} agrees with the baseline except at 0^s 1 0^k, where it
outputs 1. The baseline writes the bits of k - r(s) after the pattern
0^s 1 0^k 1 0^{s-k-1}, one bit per generated position.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from ..core import Generator, cot, e2e
from ..tokens import Bits

# bit j+1 of an integer counts from the least significant end
BIT_ORDER = "lsb"


def _bit(value: int, position: int) -> int:
    """1-based bit of ``value`` under ``BIT_ORDER``."""
    if BIT_ORDER != "lsb":
        raise NotImplementedError(BIT_ORDER)
    return (value >> (position - 1)) & 1


def default_rate(M: int) -> int:
    return max(1, (M.bit_length() - 1) // 4)


@dataclass(frozen=True)
class RateFunction:
    r: Callable[[int], int] = default_rate
    M0: int = 256
    name: str = "floor(log2 M / 4)"

    def __call__(self, M: int) -> int:
        return self.r(M)

    def violations(self, Ms: Sequence[int]) -> list[str]:
        """Failures of sub-logarithmic, monotone and sub-additive growth on ``Ms``."""
        out = []
        Ms = sorted(set(Ms))
        for M in Ms:
            if M >= self.M0 and self.r(M) > math.log2(M) / 4:
                out.append(f"r({M}) = {self.r(M)} exceeds log2({M})/4")
        for a, b in zip(Ms, Ms[1:]):
            if self.r(a) > self.r(b):
                out.append(f"r decreases between {a} and {b}")
        for a in Ms:
            for b in Ms:
                if a <= b and self.r(a + b) > self.r(a) + self.r(b):
                    out.append(f"r({a}+{b}) > r({a}) + r({b})")
        return out


def bucket_range(rate: RateFunction, s: int) -> range:
    """K_s = {r(s), ..., r(s) + 2^{r(s)} - 1}."""
    r = rate(s)
    return range(r, r + 2**r)


@dataclass(frozen=True)
class TaxonomyParams:
    rate: RateFunction = field(default_factory=RateFunction)
    s_max: int = 4096

    def __post_init__(self):
        self.validate()

    def validate(self, s_values: Optional[Sequence[int]] = None) -> None:
        s_values = range(self.rate.M0, self.s_max + 1) if s_values is None else s_values
        for s in s_values:
            r = self.rate(s)
            if r < 1:
                raise ValueError(f"invalid taxonomy params: r({s}) = {r} < 1")
            if r + 2**r > math.isqrt(s) or math.isqrt(s) > s - 1:
                raise ValueError(
                    f"invalid taxonomy params at s = {s}: r(s) + 2^r(s) = {r + 2**r} exceeds sqrt(s)"
                )

    def K(self, s: int) -> range:
        return bucket_range(self.rate, s)


def parse_baseline_input(x: Bits, p: TaxonomyParams) -> Optional[tuple[int, int, int]]:
    """(s, k, |z|) if x = 0^s 1 0^k 1 0^{s-k-1} z with s >= M0, k in K_s, |z| < r(s)."""
    runs = x.runs
    if len(runs) < 4 or runs[0][0] != 0 or runs[1] != (1, 1) or runs[2][0] != 0 or runs[3][0] != 1:
        return None
    s, k = runs[0][1], runs[2][1]
    if s < p.rate.M0 or k not in p.K(s):
        return None
    head = s + 1 + k + 1
    pad = s - k - 1
    j = len(x) - head - pad
    if not 0 <= j < p.rate(s):
        return None
    if runs[3][1] != 1:
        return None
    if not x[head : head + pad].is_constant(0):
        return None
    return s, k, j


def taxonomy_baseline(p: TaxonomyParams) -> Generator:
    def rule(x: Bits) -> int:
        parsed = parse_baseline_input(x, p)
        if parsed is None:
            return 0
        s, k, j = parsed
        return _bit(k - p.rate(s), j + 1)

    return Generator(rule, "taxonomy-baseline")


def special_point(s: int, k: int) -> Bits:
    return Bits.pattern((0, s), (1, 1), (0, k))


def taxonomy_member(p: TaxonomyParams, s: int, k: int, baseline: Optional[Generator] = None) -> Generator:
    if s < p.rate.M0:
        raise ValueError(f"s = {s} is below M0 = {p.rate.M0}")
    if k not in p.K(s):
        raise ValueError(f"k = {k} is not in K_{s} = [{p.K(s).start}, {p.K(s).stop - 1}]")
    base = baseline or taxonomy_baseline(p)
    target = special_point(s, k).runs

    def rule(x: Bits) -> int:
        if x.runs == target:
            return 1
        return base(x)

    return Generator(rule, f"taxonomy[s={s},k={k}]")


def taxonomy_window(p: TaxonomyParams, s_values: Sequence[int]) -> list[Generator]:
    """All f_{s,k} with s in ``s_values`` and k in K_s."""
    p.validate(s_values)
    base = taxonomy_baseline(p)
    return [taxonomy_member(p, s, k, base) for s in s_values for k in p.K(s)]


def bucket_instance(s: int, i: int) -> Bits:
    """0^s 1 0^i, the i-th point of bucket B_s (also a_i when s = M)."""
    return Bits.pattern((0, s), (1, 1), (0, i))


def shatter_set(p: TaxonomyParams, M: int) -> list[Bits]:
    """A_M = {0^M 1 0^i : 1 <= i <= r(M)}."""
    return [bucket_instance(M, i) for i in range(1, p.rate(M) + 1)]


class WitnessError(AssertionError):
    pass


@dataclass
class WitnessReport:
    M: int
    labeling: tuple[int, ...]
    k: int
    trajectories: list[Bits]
    outputs: tuple[int, ...]

    @property
    def ok(self) -> bool:
        return self.outputs == self.labeling


def taxonomy_shatter_witness(p: TaxonomyParams, M: int, labeling: Sequence[int]) -> tuple[int, WitnessReport]:
    """The member realising ``labeling`` on A_M, with every trajectory checked by simulation."""
    if M < p.rate.M0:
        raise ValueError(f"M = {M} is below M0 = {p.rate.M0}")
    r = p.rate(M)
    y = tuple(int(v) for v in labeling)
    if len(y) != r:
        raise ValueError(f"labeling must have length r(M) = {r}")
    b = sum(bit << (i - 1) for i, bit in enumerate(y, start=1))
    k = r + b
    g = taxonomy_member(p, M, k)
    trajectories = [cot(g, a, M) for a in shatter_set(p, M)]
    outputs = tuple(t.last() for t in trajectories)
    report = WitnessReport(M, y, k, trajectories, outputs)
    for i, (want, got) in enumerate(zip(y, outputs), start=1):
        if want != got:
            raise WitnessError(f"witness f_[{M},{k}] gives {got} on a_{i}, labeling asks {want}")
    return k, report


def expected_trajectory(M: int, k: int, i: int, labeling_bits: int) -> Bits:
    """0^{k-i} 1 0^{M-k-1} y_1 ... y_i for the witness f_{M,k} on a_i."""
    ys = [_bit(labeling_bits, j) for j in range(1, i + 1)]
    return Bits.pattern((0, k - i), (1, 1), (0, M - k - 1)) + Bits.of(ys)


def bucket_e2e(p: TaxonomyParams, s: int, k: int, i: int, M: int) -> int:
    """Simulated e2e output of f_{s,k} on 0^s 1 0^i."""
    return e2e(taxonomy_member(p, s, k), bucket_instance(s, i), M)
