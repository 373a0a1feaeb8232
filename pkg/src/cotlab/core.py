"""Deterministic next-token generators and M-step autoregressive generation."""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Callable, Iterator, Mapping, Optional

from .tokens import EMPTY, Bits, BitsLike


class Generator:
    """A total deterministic map from binary strings to a bit.

    ``rule`` is the intensional definition. ``domain`` is optional metadata: a
    finite set outside of which the generator is known to output 0 (table
    generators and the hard class set it). With ``memo=True`` outputs are cached
    per input; the cache is lock-protected so a generator can be shared across
    threads.
    """

    def __init__(
        self,
        rule: Callable[[Bits], int],
        name: str,
        domain: Optional[frozenset[Bits]] = None,
        memo: bool = False,
    ):
        self.rule = rule
        self.name = name
        self.domain = domain
        self._cache: Optional[dict[Bits, int]] = {} if memo else None
        self._lock = threading.Lock() if memo else None

    def __call__(self, x: BitsLike) -> int:
        x = Bits.of(x)
        if self._cache is None:
            return self.rule(x)
        with self._lock:
            hit = self._cache.get(x)
        if hit is not None:
            return hit
        y = self.rule(x)
        with self._lock:
            self._cache[x] = y
        return y

    def __repr__(self) -> str:
        return f"Generator({self.name!r})"

    def __getstate__(self):
        state = self.__dict__.copy()
        state["_lock"] = None
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        if self._cache is not None:
            self._lock = threading.Lock()

    @classmethod
    def from_table(cls, table: Mapping[BitsLike, int], name: str, default: int = 0) -> "Generator":
        """Lookup-table generator; inputs missing from ``table`` map to ``default``."""
        tab = {Bits.of(k): int(v) for k, v in table.items()}
        for v in tab.values():
            if v not in (0, 1):
                raise ValueError(f"table value {v!r} is not a bit")
        dom = frozenset(tab) if default == 0 else None
        return cls(lambda x: tab.get(x, default), name, domain=dom)

    @classmethod
    def constant(cls, bit: int) -> "Generator":
        return cls(lambda x: bit, f"const{bit}")


def copy_last_bit() -> Generator:
    """g(x) = last bit of x, with g(∅) = 0."""
    return Generator(lambda x: x.last(0), "copy-last")


def apply_and_append(g: Callable[[Bits], int], x: BitsLike) -> Bits:
    x = Bits.of(x)
    return x.append(g(x))


def iterate(g: Callable[[Bits], int], x: BitsLike, M: int) -> Iterator[int]:
    """Yield the M generated bits one at a time."""
    cur = Bits.of(x)
    for _ in range(M):
        y = g(cur)
        yield y
        cur = cur.append(y)


def cot(g: Callable[[Bits], int], x: BitsLike, M: int) -> Bits:
    """The length-M chain of thought: the suffix of the M-fold apply-and-append."""
    if M < 1:
        raise ValueError("M must be >= 1")
    return Bits.of(list(iterate(g, x, M)))


def e2e(g: Callable[[Bits], int], x: BitsLike, M: int) -> int:
    """Final bit of ``cot(g, x, M)``."""
    if M < 1:
        raise ValueError("M must be >= 1")
    y = 0
    for y in iterate(g, x, M):
        pass
    return y


def trajectory_branch(g: Callable[[Bits], int], x: BitsLike, M: int) -> tuple[int, ...]:
    """Edge-label sequence of the generation-tree branch followed by ``g``."""
    return tuple(cot(g, x, M))


@dataclass(frozen=True)
class GenerationTree:
    """Depth-M tree rooted at x; the node at prefix u is labelled x∘u."""

    root_instance: Bits
    depth: int

    def node(self, u: BitsLike) -> Bits:
        u = Bits.of(u)
        if len(u) > self.depth:
            raise ValueError("prefix longer than tree depth")
        return self.root_instance + u

    def prefixes(self, internal_only: bool = False) -> Iterator[Bits]:
        top = self.depth - 1 if internal_only else self.depth
        for n in range(top + 1):
            for i in range(2**n):
                yield Bits.of(format(i, f"0{n}b")) if n else EMPTY

    def nodes(self) -> list[Bits]:
        return [self.node(u) for u in self.prefixes()]

    def branches(self) -> list[tuple[int, ...]]:
        return [tuple(int(c) for c in format(i, f"0{self.depth}b")) for i in range(2**self.depth)]


def generation_tree(x: BitsLike, M: int) -> GenerationTree:
    if M < 1:
        raise ValueError("M must be >= 1")
    return GenerationTree(Bits.of(x), M)


def generation_closure(pool, M: int) -> list[Bits]:
    """Every string fed to a generator while generating M bits from a pool instance.

    This is the internal-node set of the generation trees of the pool; the
    behaviour of a class outside it never affects CoT or e2e outputs on the pool.
    """
    seen: dict[Bits, None] = {}
    for x in pool:
        for u in GenerationTree(Bits.of(x), M).prefixes(internal_only=True):
            seen.setdefault(Bits.of(x) + u, None)
    return list(seen)
