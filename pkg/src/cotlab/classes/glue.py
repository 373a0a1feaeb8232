"""Gluing classes onto disjoint length bands by zero-prefix shifts."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from ..core import Generator
from ..tokens import Bits


def support_length(generators: Sequence[Generator]) -> int:
    """Longest input on which some member may output 1, read from ``domain`` metadata."""
    out = 0
    for g in generators:
        if g.domain is None:
            raise ValueError(f"{g.name} has no finite domain; pass the support length explicitly")
        out = max(out, max((len(x) for x in g.domain), default=0))
    return out


@dataclass(frozen=True)
class GluePart:
    generators: tuple
    shift: int
    support: Optional[int] = None

    def support_len(self) -> int:
        return support_length(self.generators) if self.support is None else self.support


def shifted(g: Generator, shift: int) -> Generator:
    """ĝ(0^shift ∘ x) = g(x); 0 on inputs without the zero prefix."""

    def rule(x: Bits) -> int:
        runs = x.runs
        if shift == 0:
            return g(x)
        if not runs or runs[0][0] != 0 or runs[0][1] < shift:
            return 0
        return g(x[shift:])

    domain = None if g.domain is None else frozenset(Bits.zeros(shift) + x for x in g.domain)
    return Generator(rule, f"{g.name}>>{shift}", domain=domain)


def glue_classes(parts: Sequence) -> list[Generator]:
    """Union of the shifted parts; shifts must place supports in disjoint length bands."""
    parts = [p if isinstance(p, GluePart) else GluePart(tuple(p[0]), *p[1:]) for p in parts]
    for a, b in zip(parts, parts[1:]):
        if b.shift <= a.shift + a.support_len():
            raise ValueError(
                f"shift {b.shift} must exceed {a.shift} + {a.support_len()} to keep supports disjoint"
            )
    out = []
    for i, p in enumerate(parts):
        for g in p.generators:
            h = shifted(g, p.shift)
            h.name = f"part{i}:{h.name}"
            out.append(h)
    return out


def support(generators: Sequence[Generator], candidates) -> set[Bits]:
    """Candidates mapped to 1 by at least one generator."""
    return {Bits.of(x) for x in candidates if any(g(x) for g in generators)}
